//! Series expansions at roots of unity.
//!
//! Substituting q = zeta e^{-h}, zeta = e(alpha) of order c, into a
//! summand family turns each element into a power series in h over
//! Q(zeta_c). The sums terminate on their own: every c-th Pochhammer
//! factor has a simple zero at h = 0, so summands sink below the
//! truncation order after finitely many steps and the same generic core
//! that evaluates elements exactly also expands them, with series as the
//! scalar domain.
//!
//! Factors (1 - q^j) with c | j vanish at h = 0 and cannot be inverted
//! as series. Wherever such a factor sits in a denominator it is kept in
//! the divided form (1 - e^{-jh})/h, a unit, while the balancing powers
//! of h are tracked separately and restored at the end. The q-binomials
//! of the Mahler-type resummation and the termwise q-derivative both
//! need this.

use super::{colored_jones_fig8, eval_with, num_mod, zeta_powers, Descriptor, HabiroError};
use crate::fields::{FieldElement, NumberField};
use crate::mpcore::{FormalSeries, Var};
use rug::{Complete, Integer, Rational};
use std::sync::Arc;

type Fs = FormalSeries<FieldElement>;

/// Series of q^e at q = e(alpha) e^{-h}: the root power times the
/// exponential series of -e h, to `len` terms.
fn q_power_series(powers: &[FieldElement], a: u64, e: i64, len: usize) -> Fs {
    let c = powers.len() as i64;
    let root = powers[(a as i64 * (e % c)).rem_euclid(c) as usize].clone();
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    let mut coeffs = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 {
            num *= -e;
            den *= k as u32;
        }
        coeffs.push(root.scale_rat(&Rational::from((num.clone(), den.clone()))));
    }
    FormalSeries::new(Var::H, coeffs)
}

/// (1 - e^{-sh})/h to `len` terms; a unit with constant term s.
fn divided_one_minus_exp(nf: &Arc<NumberField>, s: i64, len: usize) -> Fs {
    let mut p = Integer::from(-s);
    let mut den = Integer::from(1);
    let mut coeffs = Vec::with_capacity(len);
    for t in 0..len {
        if t > 0 {
            p *= -s;
            den *= (t + 1) as u32;
        }
        coeffs.push(nf.from_rational(Rational::from(((-&p).complete(), den.clone()))));
    }
    FormalSeries::new(Var::H, coeffs)
}

/// The expansion of an element at q = e(alpha) e^{-h}: coefficients of
/// h^0 .. h^{order-1} over Q(zeta_c), c = den(alpha). The constant term
/// is the exact value at the root.
pub fn expand_at_root(d: Descriptor, alpha: &Rational, order: usize) -> Fs {
    assert!(order > 0);
    let c = alpha.denom().to_u64().expect("denominator fits u64");
    let nf = NumberField::cyclotomic_field(c as u32);
    let powers = zeta_powers(&nf, c as usize);
    let a = num_mod(alpha, c);
    // two guard digits: the derivative split divides by h once, and the
    // final truncation hides the resulting shorter tail
    let len = order + 2;
    let qp = |e: i64| q_power_series(&powers, a, e, len);
    let d = match d {
        // the collapsed 5_2 sum divides by (1 - q^{-m}); the
        // division-free descendant form is the one that expands
        Descriptor::FiveTwo => Descriptor::FiveTwoDescendant { a: 0, b: 0 },
        other => other,
    };
    let s = match d {
        Descriptor::Fig8Derivative => derivative_series(&nf, c as i64, len, &qp),
        _ => eval_with(d, c * (len as u64 + 1) + 1, &qp),
    };
    s.truncate(order)
}

/// Termwise q d/dq of the figure-eight sum as a series. The logarithmic
/// derivative -sum_k k (1+q^k)/(1-q^k) splits into the invertible part
/// and the part with c | k, whose divided denominators leave one overall
/// 1/h; the double zero of the Pochhammer weight absorbs it.
fn derivative_series(nf: &Arc<NumberField>, c: i64, len: usize, qp: &impl Fn(i64) -> Fs) -> Fs {
    let one = qp(0);
    let zero = FormalSeries::zero(Var::H, len, one.coeff(0));
    let mut total = zero.clone();
    let mut a_acc = zero.clone();
    let mut b_acc = zero;
    let mut t = one.clone();
    for s in 1..=c * (len as i64 + 1) {
        let omq = one.sub(&qp(s));
        t = t.mul(&omq).mul(&one.sub(&qp(-s)));
        if t.is_zero() {
            break;
        }
        let num = one.add(&qp(s)).scale_i64(-s);
        if s % c == 0 {
            b_acc = b_acc.add(&num.mul(&divided_one_minus_exp(nf, s, len).series_inv()));
        } else {
            a_acc = a_acc.add(&num.mul(&omq.series_inv()));
        }
        total = total.add(&t.mul(&a_acc)).add(&t.mul(&b_acc).div_var_pow(1));
    }
    total
}

/// J_n of the figure-eight knot at q = e(alpha) e^{-h}, to `order` terms.
pub fn jones_series_fig8(n: u64, alpha: &Rational, order: usize) -> Fs {
    let c = alpha.denom().to_u64().expect("denominator fits u64");
    let nf = NumberField::cyclotomic_field(c as u32);
    let powers = zeta_powers(&nf, c as usize);
    let a = num_mod(alpha, c);
    let mut acc = FormalSeries::zero(Var::H, order, &nf.from_rational(Rational::new()));
    for (e, coef) in colored_jones_fig8(n) {
        let r = Rational::from(coef);
        acc = acc.add(&q_power_series(&powers, a, e, order).map(Var::H, |v| v.scale_rat(&r)));
    }
    acc
}

/// hat J_n, the n-th Mahler-type difference of the colored Jones values:
/// q^{-n(n+1)/2} sum_k (-1)^{n-k} [n over k]_q q^{k(k-1)/2} J_{n-k+1},
/// expanded at the root. Its h-valuation grows with n, which is what
/// makes the resummation below finite order by order.
fn hat_term(
    n: usize,
    jones: &[Fs],
    nf: &Arc<NumberField>,
    powers: &[FieldElement],
    a: u64,
    len: usize,
) -> Fs {
    let c = powers.len() as i64;
    let qp = |e: i64| q_power_series(powers, a, e, len);
    let one = FormalSeries::one(Var::H, len, jones[0].coeff(0));
    let mut acc = FormalSeries::zero(Var::H, len, jones[0].coeff(0));
    for k in 0..=n {
        // [n over k]_q factor by factor; h-powers from divided factors
        // are tallied and restored once, and stay nonnegative because
        // the q-binomial is a polynomial
        let mut b = one.clone();
        let mut shift = 0usize;
        for j in 1..=k as i64 {
            let top = (n - k) as i64 + j;
            if top % c == 0 {
                b = b.mul(&divided_one_minus_exp(nf, top, len));
                shift += 1;
            } else {
                b = b.mul(&one.sub(&qp(top)));
            }
            if j % c == 0 {
                b = b.mul(&divided_one_minus_exp(nf, j, len).series_inv());
                shift = shift.checked_sub(1).expect("q-binomial valuation is nonnegative");
            } else {
                b = b.mul(&one.sub(&qp(j)).series_inv());
            }
        }
        let ki = k as i64;
        let term =
            b.mul_var_pow(shift).mul(&qp(ki * (ki - 1) / 2)).mul(&jones[n - k].truncate(len));
        acc = if (n - k) % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    let ni = n as i64;
    acc.mul(&qp(-(ni * (ni + 1) / 2)))
}

/// Resummation of colored Jones expansions into the element expansion:
/// sum of hat J_n at q = e(alpha) e^{-h} through h^order inclusive. The
/// slice must hold J_1 .. J_{n_max+1} for n_max = c (order + 2), each to
/// at least order + 2 terms.
pub fn mahler_expand(jones: &[Fs], alpha: &Rational, order: usize) -> Result<Fs, HabiroError> {
    let c = alpha.denom().to_u64().expect("denominator fits u64") as usize;
    let n_max = c * (order + 2);
    if jones.len() < n_max + 1 {
        return Err(HabiroError::InsufficientDepth { needed: n_max + 1, got: jones.len() });
    }
    let len = order + 2;
    if let Some(short) = jones.iter().map(|s| s.order()).min().filter(|&l| l < len) {
        return Err(HabiroError::InsufficientDepth { needed: len, got: short });
    }
    let nf = NumberField::cyclotomic_field(c as u32);
    let powers = zeta_powers(&nf, c);
    let a = num_mod(alpha, c as u64);
    let mut total = FormalSeries::zero(Var::H, len, jones[0].coeff(0));
    for n in 0..=n_max {
        total = total.add(&hat_term(n, jones, &nf, &powers, a, len));
    }
    Ok(total.truncate(order + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::habiro::kashaev;
    use std::collections::BTreeMap;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn rational_coeffs(s: &Fs) -> Vec<Rational> {
        s.coeffs.iter().map(|c| c.to_rational().expect("rational coefficient")).collect()
    }

    fn parse_all(lits: &[&str]) -> Vec<Rational> {
        lits.iter().map(|t| t.parse().unwrap()).collect()
    }

    #[test]
    fn fig8_expansion_at_one() {
        let s = expand_at_root(Descriptor::Fig8, &Rational::new(), 9);
        let want = parse_all(&[
            "1",
            "0",
            "-1",
            "0",
            "47/12",
            "0",
            "-12361/360",
            "0",
            "10771487/20160",
        ]);
        assert_eq!(rational_coeffs(&s), want);
    }

    #[test]
    fn five_two_expansion_at_one() {
        let s = expand_at_root(Descriptor::FiveTwo, &Rational::new(), 6);
        let want = parse_all(&["1", "1", "5/2", "49/6", "797/24", "19921/120"]);
        assert_eq!(rational_coeffs(&s), want);
    }

    #[test]
    fn derivative_expansion_at_one() {
        let s = expand_at_root(Descriptor::Fig8Derivative, &Rational::new(), 8);
        let want = parse_all(&["0", "-1", "0", "11/6", "0", "-1261/120", "0", "611771/5040"]);
        assert_eq!(rational_coeffs(&s), want);
    }

    #[test]
    fn fig8_expansion_is_even() {
        for alpha in [Rational::new(), rat(1, 2)] {
            let s = expand_at_root(Descriptor::Fig8, &alpha, 12);
            for m in (1..12).step_by(2) {
                assert!(s.coeff(m).is_zero(), "alpha = {alpha}, m = {m}");
            }
        }
    }

    #[test]
    fn derivative_matches_h_derivative_of_expansion() {
        // q d/dq turns into -d/dh under q = zeta e^{-h}
        for (alpha, ord) in [(Rational::new(), 8usize), (rat(1, 3), 5)] {
            let lhs = expand_at_root(Descriptor::Fig8Derivative, &alpha, ord);
            let rhs = expand_at_root(Descriptor::Fig8, &alpha, ord + 1).derivative().neg();
            assert_eq!(lhs, rhs, "alpha = {alpha}");
        }
    }

    #[test]
    fn derivative_constant_term_matches_laurent_oracle() {
        // Truncating the sum below the root order keeps both the value
        // and the q-derivative: each dropped summand has a double zero
        // at the root. The oracle differentiates the truncated Laurent
        // polynomial exactly, with no series machinery involved.
        let n = 3i64;
        let mut poly: BTreeMap<i64, Integer> = BTreeMap::new();
        poly.insert(0, Integer::from(1));
        let mut t = poly.clone();
        for s in 1..n {
            let mut next: BTreeMap<i64, Integer> = BTreeMap::new();
            // multiply t by (1-q^s)(1-q^{-s}) = 2 - q^s - q^{-s}
            for (e, c) in &t {
                for (shift, mult) in [(0i64, 2i64), (s, -1), (-s, -1)] {
                    *next.entry(e + shift).or_insert_with(Integer::new) += (c * mult).complete();
                }
            }
            t = next;
            for (e, c) in &t {
                *poly.entry(*e).or_insert_with(Integer::new) += c;
            }
        }
        let nf = NumberField::cyclotomic_field(3);
        let powers = zeta_powers(&nf, 3);
        let mut want = nf.from_rational(Rational::new());
        for (e, c) in &poly {
            let ze = &powers[e.rem_euclid(3) as usize];
            want = want.add(&ze.scale_rat(&Rational::from((c * e).complete())));
        }
        let got = expand_at_root(Descriptor::Fig8Derivative, &rat(1, 3), 1);
        assert_eq!(got.coeff(0), &want);
    }

    fn jones_inputs(alpha: &Rational, order: usize) -> Vec<Fs> {
        let c = alpha.denom().to_u64().unwrap() as usize;
        let n_max = c * (order + 2);
        (1..=n_max as u64 + 1).map(|n| jones_series_fig8(n, alpha, order + 2)).collect()
    }

    #[test]
    fn mahler_sum_of_unknot_is_one() {
        let order = 5;
        let nf = NumberField::cyclotomic_field(1);
        let one = FormalSeries::one(Var::H, order + 2, &nf.from_rational(Rational::from(1)));
        let jones = vec![one.clone(); order + 3];
        let got = mahler_expand(&jones, &Rational::new(), order).unwrap();
        assert_eq!(got, FormalSeries::one(Var::H, order + 1, one.coeff(0)));
    }

    #[test]
    fn fig8_hat_terms_gain_valuation() {
        let alpha = Rational::new();
        let len = 9usize;
        let nf = NumberField::cyclotomic_field(1);
        let powers = zeta_powers(&nf, 1);
        let jones: Vec<Fs> = (1..=9u64).map(|n| jones_series_fig8(n, &alpha, len)).collect();
        for n in 1..=8usize {
            let hat = hat_term(n, &jones, &nf, &powers, 0, len);
            for m in 0..n.min(len) {
                assert!(hat.coeff(m).is_zero(), "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn mahler_matches_direct_expansion_at_one() {
        let alpha = Rational::new();
        let order = 6;
        let got = mahler_expand(&jones_inputs(&alpha, order), &alpha, order).unwrap();
        let want = expand_at_root(Descriptor::Fig8, &alpha, order + 1);
        assert_eq!(got, want);
    }

    #[test]
    fn mahler_matches_direct_expansion_at_minus_one() {
        let alpha = rat(1, 2);
        let order = 4;
        let got = mahler_expand(&jones_inputs(&alpha, order), &alpha, order).unwrap();
        let want = expand_at_root(Descriptor::Fig8, &alpha, order + 1);
        assert_eq!(got, want);
    }

    #[test]
    fn mahler_constant_term_is_kashaev() {
        for alpha in [Rational::new(), rat(1, 3)] {
            let got = mahler_expand(&jones_inputs(&alpha, 0), &alpha, 0).unwrap();
            assert_eq!(got.order(), 1);
            assert_eq!(got.coeff(0), &kashaev("4_1", &alpha).unwrap(), "alpha = {alpha}");
        }
    }

    #[test]
    fn mahler_reports_missing_depth() {
        let alpha = Rational::new();
        let jones = jones_inputs(&alpha, 3);
        assert!(matches!(
            mahler_expand(&jones[..3], &alpha, 3),
            Err(HabiroError::InsufficientDepth { .. })
        ));
        let short: Vec<Fs> = jones.iter().map(|s| s.truncate(2)).collect();
        assert!(matches!(
            mahler_expand(&short, &alpha, 3),
            Err(HabiroError::InsufficientDepth { .. })
        ));
    }
}
