//! Precision contract, truncated formal power series, and special functions.
//!
//! Everything downstream computes with midpoint values (no rigorous balls)
//! at a working precision carried by [`PrecCtx`]. Precision sufficiency is
//! established by recomputation: run the same pipeline at `bits` and at
//! `2*bits` and compare. [`FormalSeries`] is the common currency for
//! perturbative expansions; its arithmetic never extends truncation order,
//! so order bookkeeping stays explicit in every pipeline.

mod polylog;
mod series;
mod special;

pub use polylog::{bloch_wigner, li2, log_cut_avg, polylog, rogers};
pub use series::{CompletedSeries, Cf, Coeff, FormalSeries, Rat, Var};
pub use special::{
    bernoulli_number, bernoulli_poly, bernoulli_poly_coeffs, cot_coeffs, double_factorial_odd,
    gaussian_moment, Moment, Sqrt3,
};

use rug::ops::CompleteRound;
use rug::{Complex, Float};

/// Working precision in binary digits.
///
/// Every numeric value in the library is created through one of these.
/// The default of 640 bits gives just under 200 decimal digits, enough
/// headroom for the hardest desk checks (smoothed truncation at large
/// argument needs results trustworthy to 40+ digits after heavy
/// cancellation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecCtx {
    bits: u32,
}

impl Default for PrecCtx {
    fn default() -> Self {
        PrecCtx { bits: 640 }
    }
}

impl PrecCtx {
    /// Minimum accepted working precision.
    pub const MIN_BITS: u32 = 64;

    /// Panics below 64 bits, the floor under which the midpoint model is
    /// not worth running.
    pub fn new(bits: u32) -> Self {
        assert!(bits >= Self::MIN_BITS, "precision below {} bits", Self::MIN_BITS);
        PrecCtx { bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Doubled precision, for recomputation checks.
    pub fn double(&self) -> Self {
        PrecCtx { bits: self.bits * 2 }
    }

    /// Decimal digits that `bits` can actually support.
    pub fn decimal_digits(&self) -> u32 {
        (self.bits as f64 * std::f64::consts::LN_2 / std::f64::consts::LN_10).floor() as u32
    }

    pub fn float_from<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn float_zero(&self) -> Float {
        Float::new(self.bits)
    }

    /// Parse a decimal string at this precision.
    pub fn float_str(&self, s: &str) -> Float {
        Float::with_val(
            self.bits,
            Float::parse(s).unwrap_or_else(|e| panic!("bad float literal {s:?}: {e}")),
        )
    }

    pub fn complex_from<T>(&self, v: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.bits, v)
    }

    pub fn complex_zero(&self) -> Complex {
        Complex::new(self.bits)
    }

    pub fn complex(&self, re: Float, im: Float) -> Complex {
        Complex::with_val(self.bits, (re, im))
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, rug::float::Constant::Pi)
    }

    /// e(x) = exp(2 pi i x).
    pub fn e_of(&self, x: &rug::Rational) -> Complex {
        let two_pi_x = (self.pi() * 2u32) * self.float_from(x);
        let arg = Complex::with_val(self.bits, (Float::new(self.bits), two_pi_x));
        arg.exp()
    }

    /// Relative agreement in bits between two midpoint values; `None` when
    /// both are zero to working tolerance.
    pub fn agreement_bits(a: &Complex, b: &Complex) -> Option<u32> {
        let prec = a.prec().0.min(b.prec().0);
        let diff = (a - b).complete((prec, prec)).abs().into_real_imag().0;
        let scale = a.clone().abs().into_real_imag().0.max(&b.clone().abs().into_real_imag().0);
        if scale.is_zero() {
            return None;
        }
        if diff.is_zero() {
            return Some(prec);
        }
        let rel = diff / scale;
        let e = rel.get_exp().unwrap_or(0);
        if e >= 0 {
            Some(0)
        } else {
            Some((-e) as u32)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_640_bits() {
        assert_eq!(PrecCtx::default().bits(), 640);
    }

    #[test]
    #[should_panic]
    fn rejects_sub_64() {
        PrecCtx::new(32);
    }

    #[test]
    fn e_of_sixth_root() {
        let ctx = PrecCtx::new(128);
        let z = ctx.e_of(&rug::Rational::from((1, 6)));
        let (re, im) = z.into_real_imag();
        let half = ctx.float_from(0.5);
        assert!((re - &half).abs() < ctx.float_from(1e-30));
        let s3 = ctx.float_from(3).sqrt() / 2u32;
        assert!((im - s3).abs() < ctx.float_from(1e-30));
    }

    #[test]
    fn agreement_measures_shared_bits() {
        let ctx = PrecCtx::new(128);
        let a = ctx.complex_from(1.0);
        let mut b = ctx.complex_from(1.0);
        b += Complex::with_val(128, 1e-20);
        let bits = PrecCtx::agreement_bits(&a, &b).unwrap();
        assert!(bits > 60 && bits < 72, "got {bits}");
    }
}
