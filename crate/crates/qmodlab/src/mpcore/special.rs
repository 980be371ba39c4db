//! Bernoulli numbers and polynomials, the Taylor coefficients of
//! cot(pi/6 - x/2), odd double factorials, and the Gaussian moment map
//! I_lambda that turns formal integrands into perturbative coefficients.

use std::sync::Mutex;

use rug::ops::CompleteRound;
use rug::{Complete, Complex, Float, Integer, Rational};

use super::series::{Cf, Coeff, FormalSeries};
use super::PrecCtx;

static BERNOULLI_CACHE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// B_n in the convention B_1 = -1/2, via the recurrence
/// B_m = -1/(m+1) sum_{j<m} C(m+1, j) B_j. Cached under a lock.
pub fn bernoulli_number(n: usize) -> Rational {
    let mut cache = BERNOULLI_CACHE.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rational::from(1));
    }
    while cache.len() <= n {
        let m = cache.len();
        let mut acc = Rational::new();
        for (j, b) in cache.iter().enumerate() {
            let c = Integer::from(m as u32 + 1).binomial(j as u32);
            acc += Rational::from(c) * b;
        }
        let bm = -acc / Rational::from(m as u32 + 1);
        cache.push(bm);
    }
    cache[n].clone()
}

/// Coefficients of x^0 .. x^r in B_r(x) = sum_k C(r,k) B_{r-k} x^k.
pub fn bernoulli_poly_coeffs(r: usize) -> Vec<Rational> {
    (0..=r)
        .map(|k| {
            let c = Integer::from(r as u32).binomial(k as u32);
            bernoulli_number(r - k) * Rational::from(c)
        })
        .collect()
}

/// B_r(x) at an exact rational argument.
pub fn bernoulli_poly(r: usize, x: &Rational) -> Rational {
    let coeffs = bernoulli_poly_coeffs(r);
    let mut acc = Rational::new();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// m!! for odd m >= -1, with (-1)!! = 1.
pub fn double_factorial_odd(m: i64) -> Integer {
    assert!(m >= -1 && m % 2 != 0 || m == -1, "need odd m >= -1");
    let mut acc = Integer::from(1);
    let mut k = 1i64;
    while k <= m {
        acc *= k;
        k += 2;
    }
    acc
}

/// An exact element a + b sqrt(3).
#[derive(Debug, Clone, PartialEq)]
pub struct Sqrt3 {
    pub a: Rational,
    pub b: Rational,
}

impl Sqrt3 {
    pub fn new(a: Rational, b: Rational) -> Self {
        Sqrt3 { a, b }
    }

    pub fn to_float(&self, ctx: &PrecCtx) -> Float {
        let s3 = ctx.float_from(3).sqrt();
        ctx.float_from(&self.a) + ctx.float_from(&self.b) * s3
    }

    pub fn is_rational(&self) -> bool {
        self.b.cmp0() == std::cmp::Ordering::Equal
    }
}

/// Exact arithmetic in Q(zeta_12), basis 1, z, z^2, z^3 with z^4 = z^2 - 1.
/// Just enough to evaluate negative-index polylogarithms at sixth roots.
#[derive(Clone, PartialEq)]
struct Z12([Rational; 4]);

impl Z12 {
    fn zero() -> Self {
        Z12(std::array::from_fn(|_| Rational::new()))
    }

    fn zeta_pow(k: i64) -> Self {
        // z^6 = -1, so reduce mod 12 and fold 6..11 to negatives.
        let k = k.rem_euclid(12);
        let (k, sign) = if k >= 6 { (k - 6, -1) } else { (k, 1) };
        let mut v = Z12::zero();
        match k {
            0..=3 => v.0[k as usize] = Rational::from(sign),
            4 => {
                // z^4 = z^2 - 1
                v.0[2] = Rational::from(sign);
                v.0[0] = Rational::from(-sign);
            }
            5 => {
                // z^5 = z^3 - z
                v.0[3] = Rational::from(sign);
                v.0[1] = Rational::from(-sign);
            }
            _ => unreachable!(),
        }
        v
    }

    fn add(&self, rhs: &Self) -> Self {
        Z12(std::array::from_fn(|i| (&self.0[i] + &rhs.0[i]).complete()))
    }

    fn scale(&self, c: &Rational) -> Self {
        Z12(std::array::from_fn(|i| (&self.0[i] * c).complete()))
    }

    fn mul(&self, rhs: &Self) -> Self {
        let mut raw = [(); 7].map(|_| Rational::new());
        for i in 0..4 {
            if self.0[i].cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            for j in 0..4 {
                raw[i + j] += (&self.0[i] * &rhs.0[j]).complete();
            }
        }
        // fold z^4 = z^2 - 1, z^5 = z^3 - z, z^6 = -1
        let mut out = Z12::zero();
        for (k, c) in raw.into_iter().enumerate() {
            out = out.add(&Z12::zeta_pow(k as i64).scale(&c));
        }
        out
    }

    /// For elements of the real subfield Q(sqrt 3): g = a + b sqrt(3)
    /// reads off as a = g0, b = -g3, with g2 = 0 and g1 = -2 g3.
    fn to_sqrt3(&self) -> Sqrt3 {
        assert!(self.0[2].cmp0() == std::cmp::Ordering::Equal, "element not real");
        let twice = self.0[3].clone() * Rational::from(-2);
        assert!(self.0[1] == twice, "element not real");
        Sqrt3::new(self.0[0].clone(), -self.0[3].clone())
    }
}

/// Taylor coefficients c_r of cot(pi/6 - x/2) = sum_r c_r x^r / r!, given
/// exactly by c_r = 2 Im(i^{-r} Li_{-r}(e(1/6))) as elements of Q(sqrt 3).
///
/// Li_{-r}(z) = N_r(z)/(1-z)^{r+1} with N_0 = z and
/// N_{r+1} = z((1-z) N_r' + (r+1) N_r); at z = e(1/6) the denominator is
/// the root of unity zeta_12^{10(r+1)}, so everything stays exact.
pub fn cot_coeffs(r_max: usize) -> Vec<Sqrt3> {
    // N_r as integer polynomial coefficients in z.
    let mut n_poly: Vec<Integer> = vec![Integer::from(0), Integer::from(1)];
    let mut out = Vec::with_capacity(r_max + 1);
    for r in 0..=r_max {
        // evaluate N_r at zeta^2
        let mut val = Z12::zero();
        for (k, c) in n_poly.iter().enumerate() {
            if c.cmp0() != std::cmp::Ordering::Equal {
                val = val.add(&Z12::zeta_pow(2 * k as i64).scale(&Rational::from(c)));
            }
        }
        // Li_{-r}(e(1/6)) = N_r(zeta^2) * zeta^{-10(r+1)}
        let li = val.mul(&Z12::zeta_pow(-10 * (r as i64 + 1)));
        // xi = i^{-r} Li; 2 Im(xi) = -i (xi - conj xi)
        let xi = li.mul(&Z12::zeta_pow(-3 * r as i64));
        let xi_bar = conj(&xi);
        let diff = xi.add(&xi_bar.scale(&Rational::from(-1)));
        let c_r = Z12::zeta_pow(-3).mul(&diff).to_sqrt3();
        out.push(c_r);

        // N_{r+1} = z((1-z) N_r' + (r+1) N_r)
        let mut next = vec![Integer::from(0); n_poly.len() + 2];
        for (k, c) in n_poly.iter().enumerate() {
            if k >= 1 {
                // z * (1) * N_r' term gives k c z^k, the z * (-z) * N_r'
                // term gives -k c z^{k+1}
                next[k] += Integer::from(k as u32) * c;
                next[k + 1] -= Integer::from(k as u32) * c;
            }
            // z * (r+1) N_r term
            next[k + 1] += Integer::from(r as u32 + 1) * c;
        }
        while next.len() > 1 && next.last().unwrap().cmp0() == std::cmp::Ordering::Equal {
            next.pop();
        }
        n_poly = next;
    }
    out
}

fn conj(x: &Z12) -> Z12 {
    // complex conjugation sends zeta to zeta^11
    let mut out = Z12::zero();
    for k in 0..4 {
        if x.0[k].cmp0() != std::cmp::Ordering::Equal {
            out = out.add(&Z12::zeta_pow(11 * k as i64).scale(&x.0[k]));
        }
    }
    out
}

/// The backwards extrapolation of the cotangent coefficients: c_{-1} = 0.
pub fn cot_coeff_minus1() -> Sqrt3 {
    Sqrt3::new(Rational::new(), Rational::new())
}

/// c_{-2} = -Vol(4_1) = -2 Im Li_2(e(1/6)), a transcendental value.
pub fn cot_coeff_minus2(ctx: &PrecCtx) -> Float {
    let z = ctx.e_of(&Rational::from((1, 6)));
    let li = super::polylog::li2(&z, ctx);
    -(li.into_real_imag().1 * 2u32)
}

/// Result of the Gaussian moment map, with the branch actually used.
pub struct Moment {
    pub value: Complex,
    /// Principal lambda^{-1/2} that multiplied every term.
    pub inv_sqrt_lambda: Complex,
}

/// I_lambda[t^n] = (n-1)!! lambda^{-(n+1)/2} for even n, 0 for odd n,
/// extended linearly to a truncated integrand in t.
pub fn gaussian_moment(lambda: &Complex, phi: &FormalSeries<Cf>) -> Moment {
    assert!(!lambda.is_zero(), "zero lambda");
    let prec = lambda.prec().0;
    // principal branch: exp(-log(lambda)/2)
    let inv_sqrt = (-(lambda.clone().ln() / 2u32)).exp();
    let mut value = Complex::new(prec);
    let mut pow = inv_sqrt.clone();
    for (n, c) in phi.coeffs.iter().enumerate() {
        if n % 2 == 0 && !c.is_zero() {
            let df = double_factorial_odd(n as i64 - 1);
            value += (&c.0 * &pow).complete((prec, prec)) * Complex::with_val(prec, df);
        }
        pow = pow * &inv_sqrt;
    }
    Moment { value, inv_sqrt_lambda: inv_sqrt }
}
