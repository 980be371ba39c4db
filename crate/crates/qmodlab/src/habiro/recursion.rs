//! Linear q-difference recursions and their jet evaluation in O(N) steps.
//!
//! A spec encodes sum_i P_i(q, q^n) J_{n-i} = R(q, q^n) together with the
//! first `order` values J_1 .. J_order as Laurent polynomials. Away from
//! the target index the leading coefficient P_0 is invertible at the
//! evaluation root and each step solves for J_n directly. At n = N, the
//! order of the root, P_0 vanishes to the declared multiplicity r, so the
//! step instead uses the r-th q-derivative of the whole identity: the
//! unknown higher jets of J_N enter multiplied by the vanishing
//! derivatives of P_0 and drop out, leaving J_N itself with the nonzero
//! coefficient P_0^{(r)}. Jets of length r+1 are carried the whole way,
//! and the per-step powers q^{a+nb} are updated incrementally, one
//! multiplication per stored term.

use super::{complex_root_pow, num_mod, zeta_powers, MAX_EXACT_ORDER};
use crate::fields::{FieldElement, NumberField};
use crate::mpcore::{Cf, Coeff, PrecCtx};
use rug::{Complete, Complex, Integer, Rational};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

/// A recursion for a q-holonomic sequence. Coefficient polynomials are
/// term lists (a, b, c) denoting c q^a x^b with x = q^n at the running
/// index n; `coeffs[0]` is the leading polynomial P_0 and must vanish at
/// x = 1 to order exactly `multiplicity`.
#[derive(Clone, Debug, PartialEq)]
pub struct RecursionSpec {
    pub order: usize,
    pub multiplicity: usize,
    pub coeffs: Vec<Vec<(i64, i64, Integer)>>,
    pub inhomog: Vec<(i64, i64, Integer)>,
    /// J_1 .. J_order as Laurent polynomials, exponent and coefficient.
    pub initials: Vec<Vec<(i64, Integer)>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RecursionError {
    /// P_0 (or its r-th derivative at the singular step) vanished at an
    /// evaluation point where the declared multiplicity says it must not.
    LeadingCoefficientVanishes { n: u64 },
    MissingInitials { needed: usize, got: usize },
    /// Exact evaluation requested beyond the cyclotomic degree limit.
    OrderTooLarge(u64),
}

impl std::fmt::Display for RecursionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecursionError::LeadingCoefficientVanishes { n } => {
                write!(f, "leading coefficient vanishes at step {n}")
            }
            RecursionError::MissingInitials { needed, got } => {
                write!(f, "recursion of order {needed} given {got} initial values")
            }
            RecursionError::OrderTooLarge(n) => {
                write!(f, "exact recursion limited to root order {MAX_EXACT_ORDER}, got {n}")
            }
        }
    }
}

impl std::error::Error for RecursionError {}

impl RecursionSpec {
    /// Structural and multiplicity check: the term lists are complete and
    /// P_0, as a polynomial in x, is divisible by (x - 1) exactly
    /// `multiplicity` times.
    pub fn validate(&self) -> bool {
        if self.coeffs.len() != self.order + 1 || self.initials.len() != self.order {
            return false;
        }
        for t in 0..self.multiplicity {
            if !x_derivative_at_one_is_zero(&self.coeffs[0], t) {
                return false;
            }
        }
        !x_derivative_at_one_is_zero(&self.coeffs[0], self.multiplicity)
    }
}

/// Whether (d/dx)^t P(q, x) at x = 1 is the zero Laurent polynomial in q.
fn x_derivative_at_one_is_zero(terms: &[(i64, i64, Integer)], t: usize) -> bool {
    let mut by_exp: HashMap<i64, Integer> = HashMap::new();
    for (a, b, c) in terms {
        let f = falling(*b, t);
        if f != 0 {
            *by_exp.entry(*a).or_insert_with(Integer::new) += (c * f).complete();
        }
    }
    by_exp.values().all(|c| *c == 0)
}

/// Falling factorial v (v-1) ... (v-t+1) as i64; desk-scale exponents
/// keep this far from overflow.
fn falling(v: i64, t: usize) -> i64 {
    let mut acc: i128 = 1;
    for j in 0..t as i64 {
        acc *= (v - j) as i128;
    }
    i64::try_from(acc).expect("falling factorial fits i64")
}

fn binom_small(l: usize, t: usize) -> i64 {
    let mut acc: i64 = 1;
    for j in 0..t {
        acc = acc * (l - j) as i64 / (j + 1) as i64;
    }
    acc
}

/// l-th q-derivative of a Laurent polynomial, evaluated through qp.
fn laurent_jet<C: Coeff, F: Fn(i64) -> C>(poly: &[(i64, Integer)], l: usize, qp: &F) -> C {
    let mut acc = C::zero_like(&qp(0));
    for (e, c) in poly {
        let f = falling(*e, l);
        if f != 0 {
            let c = c.to_i64().expect("initial coefficient fits i64");
            acc = acc.add(&qp(e - l as i64).mul_i64(f).mul_i64(c));
        }
    }
    acc
}

struct TermState<C> {
    a: i64,
    b: i64,
    c: i64,
    /// q^{a + n b} at the current step index n.
    cur: C,
    /// q^b, the per-step update factor.
    step: C,
}

/// Jet-propagating evaluation of J at index n_target, where q has exact
/// multiplicative order n_target.
fn run<C: Coeff, F: Fn(i64) -> C>(
    spec: &RecursionSpec,
    n_target: u64,
    qp: &F,
) -> Result<C, RecursionError> {
    let ord = spec.order;
    let r = spec.multiplicity;
    if (n_target as usize) <= ord {
        let init = spec.initials.get(n_target as usize - 1).ok_or(
            RecursionError::MissingInitials { needed: n_target as usize, got: spec.initials.len() },
        )?;
        return Ok(laurent_jet(init, 0, qp));
    }
    if spec.initials.len() < ord {
        return Err(RecursionError::MissingInitials { needed: ord, got: spec.initials.len() });
    }

    // window[i] holds the jet of J_{n - ord + i}; newest last.
    let mut window: Vec<Vec<C>> = (1..=ord)
        .map(|n| (0..=r).map(|l| laurent_jet(&spec.initials[n - 1], l, qp)).collect())
        .collect();

    let n_first = (ord + 1) as i64;
    let mut polys: Vec<Vec<TermState<C>>> = spec
        .coeffs
        .iter()
        .chain(std::iter::once(&spec.inhomog))
        .map(|terms| {
            terms
                .iter()
                .map(|(a, b, c)| TermState {
                    a: *a,
                    b: *b,
                    c: c.to_i64().expect("recursion coefficient fits i64"),
                    cur: qp(a + n_first * b),
                    step: qp(*b),
                })
                .collect()
        })
        .collect();
    let qinv: Vec<C> = (0..=r).map(|t| qp(-(t as i64))).collect();

    let eval_jet = |states: &[TermState<C>], n: i64, t: usize| {
        let mut acc = C::zero_like(&qinv[0]);
        for s in states {
            let f = falling(s.a + n * s.b, t);
            if f != 0 {
                acc = acc.add(&s.cur.mul(&qinv[t]).mul_i64(f).mul_i64(s.c));
            }
        }
        acc
    };

    for n in (ord as u64 + 1)..=n_target {
        let ni = n as i64;
        let singular = n == n_target;
        let pv: Vec<Vec<C>> =
            (0..=ord).map(|i| (0..=r).map(|t| eval_jet(&polys[i], ni, t)).collect()).collect();
        let rv: Vec<C> = (0..=r).map(|t| eval_jet(&polys[ord + 1], ni, t)).collect();

        if singular {
            // The identities of lower derivative order are consistency
            // statements here; the r-th one determines J_N because the
            // lower derivatives of P_0 vanish at the root.
            let mut acc = rv[r].clone();
            for i in 1..=ord {
                for t in 0..=r {
                    let w = pv[i][t].mul(&window[ord - i][r - t]).mul_i64(binom_small(r, t));
                    acc = acc.sub(&w);
                }
            }
            let lead =
                pv[0][r].inv().ok_or(RecursionError::LeadingCoefficientVanishes { n })?;
            return Ok(acc.mul(&lead));
        }

        let lead = pv[0][0].inv().ok_or(RecursionError::LeadingCoefficientVanishes { n })?;
        let mut jn: Vec<C> = Vec::with_capacity(r + 1);
        for l in 0..=r {
            let mut acc = rv[l].clone();
            for t in 1..=l {
                acc = acc.sub(&pv[0][t].mul(&jn[l - t]).mul_i64(binom_small(l, t)));
            }
            for i in 1..=ord {
                for t in 0..=l {
                    let w = pv[i][t].mul(&window[ord - i][l - t]).mul_i64(binom_small(l, t));
                    acc = acc.sub(&w);
                }
            }
            jn.push(acc.mul(&lead));
        }
        window.remove(0);
        window.push(jn);
        for states in polys.iter_mut() {
            for s in states.iter_mut() {
                s.cur = s.cur.mul(&s.step);
            }
        }
    }
    unreachable!("the singular step returns");
}

/// J_N(e(-x)) for N = den(x), at the working precision of ctx. The
/// numeric path trusts the declared multiplicity: a leading coefficient
/// that merely rounds to a tiny value is not detected.
pub fn evaluate_recursion(
    spec: &RecursionSpec,
    x: &Rational,
    ctx: &PrecCtx,
) -> Result<Complex, RecursionError> {
    let n = x.denom().to_u64().expect("denominator fits u64");
    let q = ctx.e_of(&(-x).complete());
    let qp = move |e: i64| Cf(complex_root_pow(&q, e));
    run(spec, n, &qp).map(|v| v.0)
}

/// J_N(e(-x)) as an exact element of Q(zeta_N), N = den(x) within the
/// cyclotomic degree limit.
pub fn evaluate_exact(spec: &RecursionSpec, x: &Rational) -> Result<FieldElement, RecursionError> {
    let n = x
        .denom()
        .to_u64()
        .filter(|&n| n <= MAX_EXACT_ORDER)
        .ok_or_else(|| RecursionError::OrderTooLarge(x.denom().to_u64().unwrap_or(u64::MAX)))?;
    let nf = NumberField::cyclotomic_field(n as u32);
    let powers = zeta_powers(&nf, n as usize);
    let p = num_mod(&(-x).complete(), n);
    let qp = move |e: i64| {
        let idx = (p as i64 * (e % n as i64)).rem_euclid(n as i64) as usize;
        powers[idx].clone()
    };
    run(spec, n, &qp)
}

/// The figure-eight recursion: order 3, leading coefficient vanishing
/// simply at q^n = 1, derived from the three-term identity of the
/// descendant family by eliminating the shifts.
pub fn fig8_recursion() -> &'static RecursionSpec {
    static SPEC: OnceLock<RecursionSpec> = OnceLock::new();
    SPEC.get_or_init(|| {
        let terms = |v: &[(i64, i64, i64)]| {
            v.iter().map(|(a, b, c)| (*a, *b, Integer::from(*c))).collect::<Vec<_>>()
        };
        let laurent =
            |v: &[(i64, i64)]| v.iter().map(|(e, c)| (*e, Integer::from(*c))).collect::<Vec<_>>();
        RecursionSpec {
            order: 3,
            multiplicity: 1,
            coeffs: vec![
                terms(&[(-1, 3, -1), (-1, 4, 1)]),
                terms(&[
                    (1, 1, 1),
                    (0, 2, -2),
                    (2, 2, -1),
                    (0, 3, -1),
                    (1, 3, 1),
                    (-2, 4, 1),
                    (-2, 5, 2),
                    (-3, 6, -1),
                ]),
                terms(&[
                    (6, 0, 1),
                    (4, 1, -2),
                    (1, 2, -1),
                    (0, 3, 1),
                    (1, 3, -1),
                    (-3, 4, 2),
                    (-1, 4, 1),
                    (-5, 5, -1),
                ]),
                terms(&[(2, 2, -1), (-1, 3, 1)]),
            ],
            inhomog: terms(&[(4, 1, -1), (0, 2, -1), (2, 2, -1), (-3, 4, 1), (-1, 4, 1), (-2, 5, 1)]),
            initials: vec![
                laurent(&[(0, 1)]),
                laurent(&[(-2, 1), (-1, -1), (0, 1), (1, -1), (2, 1)]),
                laurent(&[
                    (-6, 1),
                    (-5, -1),
                    (-4, -1),
                    (-3, 2),
                    (-2, -1),
                    (-1, -1),
                    (0, 3),
                    (1, -1),
                    (2, -1),
                    (3, 2),
                    (4, -1),
                    (5, -1),
                    (6, 1),
                ]),
            ],
        }
    })
}

static RECURSIONS: OnceLock<RwLock<HashMap<String, Arc<RecursionSpec>>>> = OnceLock::new();

fn registry() -> &'static RwLock<HashMap<String, Arc<RecursionSpec>>> {
    RECURSIONS.get_or_init(|| {
        let mut m = HashMap::new();
        m.insert("4_1".to_string(), Arc::new(fig8_recursion().clone()));
        RwLock::new(m)
    })
}

pub fn register_recursion(knot: &str, spec: RecursionSpec) {
    registry().write().unwrap().insert(knot.to_string(), Arc::new(spec));
}

pub fn registered_recursion(knot: &str) -> Option<Arc<RecursionSpec>> {
    registry().read().unwrap().get(knot).cloned()
}

pub fn recursion_to_json(spec: &RecursionSpec) -> Value {
    let terms = |ts: &Vec<(i64, i64, Integer)>| {
        ts.iter().map(|(a, b, c)| json!([a, b, c.to_string()])).collect::<Vec<_>>()
    };
    json!({
        "order": spec.order,
        "r": spec.multiplicity,
        "coeffs": spec.coeffs.iter().map(terms).collect::<Vec<_>>(),
        "inhomog": terms(&spec.inhomog),
        "initials": spec
            .initials
            .iter()
            .map(|p| p.iter().map(|(e, c)| json!([e, c.to_string()])).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub fn recursion_from_json(v: &Value) -> Option<RecursionSpec> {
    let int = |w: &Value| w.as_str().and_then(|s| s.parse::<Integer>().ok());
    let term = |w: &Value| -> Option<(i64, i64, Integer)> {
        let t = w.as_array()?;
        Some((t.first()?.as_i64()?, t.get(1)?.as_i64()?, int(t.get(2)?)?))
    };
    let poly = |w: &Value| w.as_array()?.iter().map(term).collect::<Option<Vec<_>>>();
    let spec = RecursionSpec {
        order: v.get("order")?.as_u64()? as usize,
        multiplicity: v.get("r")?.as_u64()? as usize,
        coeffs: v.get("coeffs")?.as_array()?.iter().map(poly).collect::<Option<Vec<_>>>()?,
        inhomog: poly(v.get("inhomog")?)?,
        initials: v
            .get("initials")?
            .as_array()?
            .iter()
            .map(|p| {
                p.as_array()?
                    .iter()
                    .map(|w| {
                        let t = w.as_array()?;
                        Some((t.first()?.as_i64()?, int(t.get(1)?)?))
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>()?,
    };
    if spec.coeffs.len() != spec.order + 1 || spec.initials.len() != spec.order {
        return None;
    }
    Some(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::habiro::{kashaev, kashaev_numeric};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn fig8_spec_validates() {
        assert!(fig8_recursion().validate());
        let mut wrong = fig8_recursion().clone();
        wrong.multiplicity = 2;
        assert!(!wrong.validate());
    }

    #[test]
    fn exact_recursion_matches_direct_sum() {
        for n in [4i64, 5, 7, 9, 12, 25, 40] {
            for p in [1i64, n - 1] {
                if rug::Integer::from(p).gcd(&rug::Integer::from(n)) != 1 {
                    continue;
                }
                let x = rat(p, n);
                let via_rec = evaluate_exact(fig8_recursion(), &x).unwrap();
                let direct = kashaev("4_1", &(-&x).complete()).unwrap();
                assert_eq!(via_rec, direct, "N = {n}, p = {p}");
            }
        }
    }

    #[test]
    fn exact_recursion_covers_initial_segment() {
        for n in [1i64, 2, 3] {
            let via_rec = evaluate_exact(fig8_recursion(), &rat(1, n)).unwrap();
            let direct = kashaev("4_1", &rat(-1, n)).unwrap();
            assert_eq!(via_rec, direct, "N = {n}");
        }
    }

    #[test]
    fn numeric_recursion_matches_direct_sum() {
        let ctx = PrecCtx::new(256);
        let via_rec = evaluate_recursion(fig8_recursion(), &rat(1, 100), &ctx).unwrap();
        let direct = kashaev_numeric("4_1", &rat(-1, 100), &ctx).unwrap();
        assert!(PrecCtx::agreement_bits(&via_rec, &direct).unwrap() >= 128);
    }

    #[test]
    fn constant_recursion_evaluates_to_one() {
        let spec = RecursionSpec {
            order: 1,
            multiplicity: 0,
            coeffs: vec![vec![(0, 0, Integer::from(1))], vec![(0, 0, Integer::from(-1))]],
            inhomog: vec![],
            initials: vec![vec![(0, Integer::from(1))]],
        };
        assert!(spec.validate());
        let v = evaluate_exact(&spec, &rat(3, 7)).unwrap();
        assert_eq!(v.to_rational(), Some(Rational::from(1)));
        let ctx = PrecCtx::new(64);
        let w = evaluate_recursion(&spec, &rat(2, 9), &ctx).unwrap();
        assert!((w - Complex::with_val(64, 1)).abs().real().to_f64() < 1e-15);
    }

    #[test]
    fn undeclared_singularity_is_reported() {
        // J_n (x - 1) = J_{n-1} with r declared 0: the true vanishing at
        // the final step must surface as an error, not a division.
        let spec = RecursionSpec {
            order: 1,
            multiplicity: 0,
            coeffs: vec![
                vec![(0, 1, Integer::from(1)), (0, 0, Integer::from(-1))],
                vec![(0, 0, Integer::from(-1))],
            ],
            inhomog: vec![],
            initials: vec![vec![(0, Integer::from(1))]],
        };
        let err = evaluate_exact(&spec, &rat(1, 6)).unwrap_err();
        assert!(matches!(err, RecursionError::LeadingCoefficientVanishes { n: 6 }));
    }

    #[test]
    fn registered_knot_serves_kashaev() {
        register_recursion("fig8_alias", fig8_recursion().clone());
        let x = rat(-1, 9);
        assert_eq!(kashaev("fig8_alias", &x).unwrap(), kashaev("4_1", &x).unwrap());
    }

    #[test]
    fn json_round_trip_preserves_spec() {
        let spec = fig8_recursion();
        let back = recursion_from_json(&recursion_to_json(spec)).unwrap();
        assert_eq!(&back, spec);
        assert!(back.validate());
    }

    #[test]
    fn large_order_high_precision_completes() {
        let ctx = PrecCtx::new(3000);
        let v = evaluate_recursion(fig8_recursion(), &rat(1, 5000), &ctx).unwrap();
        let mag = v.abs().into_real_imag().0;
        assert!(mag.is_finite() && mag > 1);
    }
}
