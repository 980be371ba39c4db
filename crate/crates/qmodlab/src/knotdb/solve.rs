//! Newton refinement of gluing seeds and the dilogarithmic volume.
//!
//! The gluing equations z^A = (−1)^ν (1−z)^B are solved in logarithmic
//! form: with branch integers k fixed by the seed, the map
//! f(z) = A·Log z − B·Log(1−z) − πiν − 2πik has an isolated zero that
//! Newton iteration reaches quadratically. Precision is raised in stages,
//! doubling until the requested working precision, so the expensive final
//! iterations start from an already accurate point.
//!
//! A solution carries chosen logarithms (u, v) with A·u − B·v = πiν
//! exactly in the lattice sense: the integer correction is found by an
//! exact solve against the concatenated matrix (A −B). The volume of a
//! solution is the dilogarithm sum Σ_j F(v_j) + u_j v_j / 2 − π²/6 plus,
//! when a completion (C, D) is supplied, the correction
//! (πi/2) Σ_j ν_j (Cu − Dv)_j. Without a completion the correction is
//! omitted and the result is only meaningful modulo π²/2 times integers.

use super::lattice::{solve_exact, IMat};
use super::{Completion, NZDatum};
use crate::fields::{FieldElement, NumberField};
use crate::mpcore::{bloch_wigner, li2, Coeff, PrecCtx};
use crate::recognition::recognize_in_field;
use rug::ops::CompleteRound;
use rug::{Complete, Complex, Float, Integer};
use std::sync::Arc;

/// Shapes recognized as exact field elements, with the embedding that
/// matches the numeric solution.
#[derive(Clone, Debug)]
pub struct ExactShapes {
    pub field: Arc<NumberField>,
    pub embedding: usize,
    pub z: Vec<FieldElement>,
}

/// One refined solution of the gluing equations.
#[derive(Clone, Debug)]
pub struct ShapeSolution {
    pub z: Vec<Complex>,
    /// Logarithms of z with A·u − B·v = πiν.
    pub u: Vec<Complex>,
    /// Logarithms of 1−z, branch-corrected jointly with u.
    pub v: Vec<Complex>,
    /// C·u − D·v when a completion was supplied to the solver.
    pub w: Option<Vec<Complex>>,
    pub exact: Option<ExactShapes>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    /// A seed coordinate sits at 0 or 1, where the equations degenerate.
    ExcludedSeed { seed: usize, coord: usize },
    NoConvergence { seed: usize },
    /// Newton hit a numerically singular Jacobian; the point is reported.
    SingularJacobian { seed: usize, at: Vec<(f64, f64)> },
    /// A refined coordinate could not be recognized in the given field.
    Recognition { seed: usize, coord: usize },
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::ExcludedSeed { seed, coord } => {
                write!(f, "seed {seed}: coordinate {coord} is at an excluded point (0 or 1)")
            }
            SolveError::NoConvergence { seed } => {
                write!(f, "seed {seed}: Newton iteration did not converge")
            }
            SolveError::SingularJacobian { seed, at } => {
                write!(f, "seed {seed}: singular Jacobian at [")?;
                for (i, (re, im)) in at.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{re}{im:+}i")?;
                }
                write!(f, "]")
            }
            SolveError::Recognition { seed, coord } => {
                write!(f, "seed {seed}: coordinate {coord} was not recognized in the field")
            }
        }
    }
}

impl std::error::Error for SolveError {}

fn abs_f(z: &Complex) -> Float {
    z.clone().abs().into_real_imag().0
}

fn pi_at(p: u32) -> Float {
    Float::with_val(p, rug::float::Constant::Pi)
}

/// Σ_j row_j · xs_j with integer row entries.
fn int_row_dot(row: &[Integer], xs: &[Complex], p: u32) -> Complex {
    let mut s = Complex::new(p);
    for (c, x) in row.iter().zip(xs) {
        if c.is_zero() {
            continue;
        }
        s += x.clone() * Float::with_val(p, c);
    }
    s
}

/// A·Log z − B·Log(1−z) − πiν at principal branches, one entry per row.
fn principal_residual(d: &NZDatum, z: &[Complex], p: u32) -> Vec<Complex> {
    let lz: Vec<Complex> = z.iter().map(|x| x.clone().ln()).collect();
    let lw: Vec<Complex> = z
        .iter()
        .map(|x| (Complex::with_val(p, 1u32) - x).ln())
        .collect();
    let pi = pi_at(p);
    (0..d.n)
        .map(|i| {
            let mut r = int_row_dot(&d.a[i], &lz, p) - int_row_dot(&d.b[i], &lw, p);
            let shift = pi.clone() * Float::with_val(p, &d.nu[i]);
            r -= Complex::with_val(p, (Float::new(p), shift));
            r
        })
        .collect()
}

/// Branch integers k with residual ≈ 2πik at the seed.
fn branch_integers(d: &NZDatum, z: &[Complex], p: u32) -> Vec<Integer> {
    let two_pi = pi_at(p) * 2u32;
    principal_residual(d, z, p)
        .iter()
        .map(|r| {
            (r.imag() / &two_pi)
                .complete(p)
                .round()
                .to_integer()
                .expect("branch residual is not finite")
        })
        .collect()
}

/// Gaussian elimination with partial pivoting; None when a pivot falls
/// below 2^{−p/2}, the working notion of a singular Jacobian.
fn solve_linear(mut m: Vec<Vec<Complex>>, mut rhs: Vec<Complex>, p: u32) -> Option<Vec<Complex>> {
    let n = rhs.len();
    let floor = Float::with_val(p, 1) >> (p / 2);
    for k in 0..n {
        let mut best = k;
        let mut best_abs = abs_f(&m[k][k]);
        for i in k + 1..n {
            let a = abs_f(&m[i][k]);
            if a > best_abs {
                best = i;
                best_abs = a;
            }
        }
        if !(best_abs > floor) {
            return None;
        }
        if best != k {
            m.swap(k, best);
            rhs.swap(k, best);
        }
        let pivot_row = m[k].clone();
        let pivot_rhs = rhs[k].clone();
        for i in k + 1..n {
            let factor = (&m[i][k] / &pivot_row[k]).complete((p, p));
            for j in k..n {
                let t = (&factor * &pivot_row[j]).complete((p, p));
                m[i][j] -= t;
            }
            rhs[i] -= factor * &pivot_rhs;
        }
    }
    let mut x = vec![Complex::new(p); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..n {
            acc -= (&m[i][j] * &x[j]).complete((p, p));
        }
        x[i] = acc / &m[i][i];
    }
    Some(x)
}

enum NewtonFailure {
    NoConvergence,
    Singular(Vec<(f64, f64)>),
}

/// Newton iteration at fixed precision toward f = 0 with fixed branch
/// integers; target residual 2^{−(p−16)}.
fn newton_at(
    d: &NZDatum,
    z: &mut Vec<Complex>,
    k: &[Integer],
    p: u32,
) -> Result<(), NewtonFailure> {
    let tol = Float::with_val(p, 1) >> (p - 16);
    let pi = pi_at(p);
    for _ in 0..120 {
        if z.iter().any(|x| !x.real().is_finite() || !x.imag().is_finite()) {
            return Err(NewtonFailure::NoConvergence);
        }
        let mut f = principal_residual(d, z, p);
        for (fi, ki) in f.iter_mut().zip(k) {
            let shift = pi.clone() * 2u32 * Float::with_val(p, ki);
            *fi -= Complex::with_val(p, (Float::new(p), shift));
        }
        let worst = f.iter().map(abs_f).fold(Float::new(p), |a, b| if b > a { b } else { a });
        if worst < tol {
            return Ok(());
        }
        // J_ij = A_ij / z_j + B_ij / (1 − z_j)
        let inv_z: Vec<Complex> = z.iter().map(|x| x.clone().recip()).collect();
        let inv_w: Vec<Complex> = z
            .iter()
            .map(|x| (Complex::with_val(p, 1u32) - x).recip())
            .collect();
        let jac: Vec<Vec<Complex>> = (0..d.n)
            .map(|i| {
                (0..d.n)
                    .map(|j| {
                        let mut e = inv_z[j].clone() * Float::with_val(p, &d.a[i][j]);
                        e += inv_w[j].clone() * Float::with_val(p, &d.b[i][j]);
                        e
                    })
                    .collect()
            })
            .collect();
        let neg_f: Vec<Complex> = f.iter().map(|x| (-x).complete((p, p))).collect();
        let delta = solve_linear(jac, neg_f, p).ok_or_else(|| {
            NewtonFailure::Singular(
                z.iter().map(|x| (x.real().to_f64(), x.imag().to_f64())).collect(),
            )
        })?;
        for (zi, di) in z.iter_mut().zip(delta) {
            *zi += di;
        }
    }
    Err(NewtonFailure::NoConvergence)
}

/// Try every embedding of the field until all coordinates recognize and
/// the equations hold exactly; reports the deepest failing coordinate.
fn recognize_shapes(
    d: &NZDatum,
    z: &[Complex],
    field: &Arc<NumberField>,
    ctx: &PrecCtx,
) -> Result<ExactShapes, usize> {
    let mut deepest = 0usize;
    for emb in 0..field.num_embeddings() {
        let mut elems = Vec::with_capacity(z.len());
        let mut ok = true;
        for (j, zj) in z.iter().enumerate() {
            match recognize_in_field(zj, field, emb, None, ctx) {
                Ok(e) => elems.push(e),
                Err(_) => {
                    deepest = deepest.max(j);
                    ok = false;
                    break;
                }
            }
        }
        if ok && exact_equations_hold(d, &elems) {
            return Ok(ExactShapes { field: Arc::clone(field), embedding: emb, z: elems });
        }
    }
    Err(deepest)
}

fn elem_int_pow(e: &FieldElement, k: &Integer) -> Option<FieldElement> {
    let mag = k.clone().abs().to_u32().expect("exponent exceeds u32");
    if *k >= 0 {
        Some(e.pow_u32(mag))
    } else {
        e.inv().map(|inv| inv.pow_u32(mag))
    }
}

/// z^A (1−z)^{−B} = (−1)^ν as an identity of field elements.
fn exact_equations_hold(d: &NZDatum, z: &[FieldElement]) -> bool {
    let one = FieldElement::one_like(&z[0]);
    for i in 0..d.n {
        let mut prod = one.clone();
        for j in 0..d.n {
            let Some(za) = elem_int_pow(&z[j], &d.a[i][j]) else {
                return false;
            };
            let w = one.sub(&z[j]);
            let Some(wb) = elem_int_pow(&w, &(-&d.b[i][j]).complete()) else {
                return false;
            };
            prod = prod.mul(&za).mul(&wb);
        }
        let want = if d.nu[i].is_odd() { one.neg() } else { one.clone() };
        if prod != want {
            return false;
        }
    }
    true
}

/// Refine each seed to a solution at the working precision.
///
/// When a field is given, shapes are recognized exactly in it (searching
/// over embeddings) and the equations are re-verified symbolically. When
/// a completion is given, w = C·u − D·v is attached to each solution.
pub fn solve_nz(
    d: &NZDatum,
    seeds: &[Vec<(f64, f64)>],
    field: Option<&Arc<NumberField>>,
    completion: Option<&Completion>,
    ctx: &PrecCtx,
) -> Result<Vec<ShapeSolution>, SolveError> {
    let bits = ctx.bits();
    let mut out = Vec::with_capacity(seeds.len());
    for (si, seed) in seeds.iter().enumerate() {
        assert_eq!(seed.len(), d.n, "seed {si} has wrong length");
        for (j, &(re, im)) in seed.iter().enumerate() {
            let at_zero = re * re + im * im < 1e-16;
            let at_one = (1.0 - re) * (1.0 - re) + im * im < 1e-16;
            if at_zero || at_one {
                return Err(SolveError::ExcludedSeed { seed: si, coord: j });
            }
        }

        let mut p = PrecCtx::MIN_BITS.min(bits);
        let mut z: Vec<Complex> =
            seed.iter().map(|&(re, im)| Complex::with_val(p, (re, im))).collect();
        let k = branch_integers(d, &z, p);
        loop {
            newton_at(d, &mut z, &k, p).map_err(|e| match e {
                NewtonFailure::NoConvergence => SolveError::NoConvergence { seed: si },
                NewtonFailure::Singular(at) => SolveError::SingularJacobian { seed: si, at },
            })?;
            if p == bits {
                break;
            }
            p = (p * 2).min(bits);
            z = z.iter().map(|x| Complex::with_val(p, x)).collect();
        }

        // Particular integer solution of A·m − B·l = −k lifts the
        // principal logarithms to branches with A·u − B·v = πiν.
        let mut concat: IMat = Vec::with_capacity(d.n);
        for i in 0..d.n {
            let row: Vec<Integer> = d.a[i]
                .iter()
                .cloned()
                .chain(d.b[i].iter().map(|x| (-x).complete()))
                .collect();
            concat.push(row);
        }
        let rhs: Vec<Integer> = k.iter().map(|x| (-x).complete()).collect();
        let ml = solve_exact(&concat, &rhs)
            .expect("branch correction unsolvable; datum violates the span condition");
        let two_pi = pi_at(bits) * 2u32;
        let lift = |principal: Complex, n: &Integer| {
            let shift = two_pi.clone() * Float::with_val(bits, n);
            principal + Complex::with_val(bits, (Float::new(bits), shift))
        };
        let u: Vec<Complex> = z
            .iter()
            .zip(&ml[..d.n])
            .map(|(x, m)| lift(x.clone().ln(), m))
            .collect();
        let v: Vec<Complex> = z
            .iter()
            .zip(&ml[d.n..])
            .map(|(x, l)| lift((Complex::with_val(bits, 1u32) - x).ln(), l))
            .collect();

        let w = completion.map(|comp| {
            (0..d.n)
                .map(|i| int_row_dot(&comp.c[i], &u, bits) - int_row_dot(&comp.d[i], &v, bits))
                .collect::<Vec<Complex>>()
        });

        let exact = match field {
            None => None,
            Some(f) => Some(
                recognize_shapes(d, &z, f, ctx)
                    .map_err(|coord| SolveError::Recognition { seed: si, coord })?,
            ),
        };

        out.push(ShapeSolution { z, u, v, w, exact });
    }
    Ok(out)
}

/// Ambiguity class of a volume value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeModulus {
    /// Full formula: well defined up to integer multiples of 4π².
    FourPiSq,
    /// Completion term omitted: meaningful only modulo π²/2.
    HalfPiSq,
}

#[derive(Clone, Debug)]
pub struct VolumeValue {
    pub value: Complex,
    pub modulus: VolumeModulus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VolumeError {
    /// A·u − B·v deviates from πiν in the given row.
    LogChoice { row: usize },
}

impl std::fmt::Display for VolumeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VolumeError::LogChoice { row } => {
                write!(f, "log choice violates A u - B v = pi i nu in row {row}")
            }
        }
    }
}

impl std::error::Error for VolumeError {}

/// Dilogarithmic volume of a solution.
///
/// Computes Σ_j [F(v_j) + u_j v_j / 2 − π²/6] with
/// F(v) = Li₂(z) − 2πi n Log z, n = round(Im v / 2π), plus the completion
/// correction (πi/2) Σ_j ν_j w_j when (C, D) is given. With a completion
/// the imaginary part is independently recomputed as the Bloch-Wigner sum
/// Σ_j D(z_j) and asserted to agree.
pub fn complex_volume(
    d: &NZDatum,
    s: &ShapeSolution,
    completion: Option<&Completion>,
    ctx: &PrecCtx,
) -> Result<VolumeValue, VolumeError> {
    let p = ctx.bits();
    let modulus = if completion.is_some() { VolumeModulus::FourPiSq } else { VolumeModulus::HalfPiSq };
    if d.n == 0 {
        return Ok(VolumeValue { value: Complex::new(p), modulus });
    }
    let pi = pi_at(p);
    let tol = Float::with_val(p, 1) >> (p / 4);

    for i in 0..d.n {
        let mut res = int_row_dot(&d.a[i], &s.u, p) - int_row_dot(&d.b[i], &s.v, p);
        let shift = pi.clone() * Float::with_val(p, &d.nu[i]);
        res -= Complex::with_val(p, (Float::new(p), shift));
        if abs_f(&res) > tol {
            return Err(VolumeError::LogChoice { row: i });
        }
    }

    let two_pi = pi.clone() * 2u32;
    let mut total = Complex::new(p);
    let pi_sq_over_6 = (pi.clone() * &pi) / 6u32;
    for j in 0..d.n {
        let n_j = (s.v[j].imag() / &two_pi)
            .complete(p)
            .round()
            .to_integer()
            .expect("log branch is not finite");
        let mut f_j = li2(&s.z[j], ctx);
        if !n_j.is_zero() {
            let scale = two_pi.clone() * Float::with_val(p, &n_j);
            f_j -= Complex::with_val(p, (Float::new(p), scale)) * s.z[j].clone().ln();
        }
        total += f_j;
        total += (&s.u[j] * &s.v[j]).complete((p, p)) / 2u32;
        total -= &pi_sq_over_6;
    }
    if let Some(comp) = completion {
        let w: Vec<Complex> = (0..d.n)
            .map(|i| int_row_dot(&comp.c[i], &s.u, p) - int_row_dot(&comp.d[i], &s.v, p))
            .collect();
        let mut nu_w = Complex::new(p);
        for (nu, wj) in d.nu.iter().zip(&w) {
            if nu.is_zero() {
                continue;
            }
            nu_w += wj.clone() * Float::with_val(p, nu);
        }
        let half_pi_i = Complex::with_val(p, (Float::new(p), pi.clone() / 2u32));
        total += half_pi_i * nu_w;

        // Independent imaginary part: the Bloch-Wigner sum over shapes.
        let mut bw = Float::new(p);
        for zj in &s.z {
            bw += bloch_wigner(zj, ctx);
        }
        let im_err = (total.imag() - &bw).complete(p).abs();
        assert!(
            im_err < tol,
            "volume imaginary part {} disagrees with dilogarithm sum {}",
            total.imag().to_f64(),
            bw.to_f64()
        );
    }
    Ok(VolumeValue { value: total, modulus })
}
