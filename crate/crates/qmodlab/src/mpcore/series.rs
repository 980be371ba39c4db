//! Truncated formal power series over an arbitrary coefficient ring.
//!
//! A series of order N stores exactly the coefficients of x^0 .. x^{N-1};
//! the truncation order is exclusive. Products of operands with different
//! orders truncate to the minimum of the two, never extend, so the reliable
//! order of any pipeline result can be read off its inputs.

use rug::ops::{CompleteRound, Pow};
use rug::{Complete, Complex, Float, Rational};
use serde_json::{json, Value};

pub type Rat = Rational;

/// Coefficient-ring contract for series arithmetic.
///
/// Constructors take a template value so that context-carrying types
/// (arbitrary-precision floats, number-field elements) can produce zeros
/// and ones of the right shape.
pub trait Coeff: Clone + PartialEq {
    fn zero_like(like: &Self) -> Self;
    fn one_like(like: &Self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn mul_i64(&self, k: i64) -> Self;
    /// Exact division by a nonzero integer; panics when the ring cannot divide.
    fn div_i64(&self, k: i64) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
}

impl Coeff for Rational {
    fn zero_like(_: &Self) -> Self {
        Rational::new()
    }
    fn one_like(_: &Self) -> Self {
        Rational::from(1)
    }
    fn add(&self, rhs: &Self) -> Self {
        (self + rhs).complete()
    }
    fn sub(&self, rhs: &Self) -> Self {
        (self - rhs).complete()
    }
    fn neg(&self) -> Self {
        (-self).complete()
    }
    fn mul(&self, rhs: &Self) -> Self {
        (self * rhs).complete()
    }
    fn mul_i64(&self, k: i64) -> Self {
        Rational::from(k) * self
    }
    fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0);
        self.clone() / Rational::from(k)
    }
    fn inv(&self) -> Option<Self> {
        if self.cmp0() == std::cmp::Ordering::Equal {
            None
        } else {
            Some(Rational::from(self.recip_ref()))
        }
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
}

/// Complex midpoint coefficient. The wrapped value carries its own
/// precision, which all derived values inherit.
#[derive(Debug, Clone, PartialEq)]
pub struct Cf(pub Complex);

impl Cf {
    pub fn prec(&self) -> u32 {
        self.0.prec().0
    }
    pub fn abs(&self) -> Float {
        self.0.clone().abs().into_real_imag().0
    }
}

impl Coeff for Cf {
    fn zero_like(like: &Self) -> Self {
        Cf(Complex::new(like.prec()))
    }
    fn one_like(like: &Self) -> Self {
        Cf(Complex::with_val(like.prec(), 1))
    }
    fn add(&self, rhs: &Self) -> Self {
        Cf((&self.0 + &rhs.0).complete((self.prec(), self.prec())))
    }
    fn sub(&self, rhs: &Self) -> Self {
        Cf((&self.0 - &rhs.0).complete((self.prec(), self.prec())))
    }
    fn neg(&self) -> Self {
        Cf((-&self.0).complete((self.prec(), self.prec())))
    }
    fn mul(&self, rhs: &Self) -> Self {
        Cf((&self.0 * &rhs.0).complete((self.prec(), self.prec())))
    }
    fn mul_i64(&self, k: i64) -> Self {
        Cf((&self.0 * k).complete((self.prec(), self.prec())))
    }
    fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0);
        Cf((&self.0 / k).complete((self.prec(), self.prec())))
    }
    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Cf(Complex::with_val(self.prec(), self.0.recip_ref())))
        }
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// Formal variable tag. Series in different variables never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// The perturbative parameter h = 2 pi i / X near a root of unity.
    H,
    /// The root-of-unity offset q = zeta e^eps.
    Eps,
    /// The inverted frame w = h* of a mapped expansion point.
    W,
    /// Integration dummy for Gaussian moments.
    T,
    /// Generic q-series variable.
    Q,
    /// Generic auxiliary variable.
    X,
}

impl Var {
    pub fn as_str(&self) -> &'static str {
        match self {
            Var::H => "h",
            Var::Eps => "eps",
            Var::W => "w",
            Var::T => "t",
            Var::Q => "q",
            Var::X => "x",
        }
    }

    pub fn from_str(s: &str) -> Option<Var> {
        Some(match s {
            "h" => Var::H,
            "eps" => Var::Eps,
            "w" => Var::W,
            "t" => Var::T,
            "q" => Var::Q,
            "x" => Var::X,
            _ => return None,
        })
    }
}

/// Truncated power series: coefficients of x^0 .. x^{order-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<T: Coeff> {
    pub var: Var,
    pub coeffs: Vec<T>,
}

impl<T: Coeff> FormalSeries<T> {
    pub fn new(var: Var, coeffs: Vec<T>) -> Self {
        FormalSeries { var, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn zero(var: Var, order: usize, like: &T) -> Self {
        FormalSeries { var, coeffs: vec![T::zero_like(like); order] }
    }

    pub fn one(var: Var, order: usize, like: &T) -> Self {
        let mut s = Self::zero(var, order, like);
        if order > 0 {
            s.coeffs[0] = T::one_like(like);
        }
        s
    }

    /// The monomial c * x^k, truncated to `order`.
    pub fn monomial(var: Var, order: usize, k: usize, c: T) -> Self {
        let mut s = Self::zero(var, order, &c);
        if k < order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn coeff(&self, k: usize) -> &T {
        &self.coeffs[k]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.coeffs.len());
        FormalSeries { var: self.var, coeffs: self.coeffs[..n].to_vec() }
    }

    fn check_var(&self, rhs: &Self) {
        assert_eq!(self.var, rhs.var, "series variable mismatch");
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.check_var(rhs);
        let n = self.order().min(rhs.order());
        let coeffs = (0..n).map(|i| self.coeffs[i].add(&rhs.coeffs[i])).collect();
        FormalSeries { var: self.var, coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.check_var(rhs);
        let n = self.order().min(rhs.order());
        let coeffs = (0..n).map(|i| self.coeffs[i].sub(&rhs.coeffs[i])).collect();
        FormalSeries { var: self.var, coeffs }
    }

    pub fn neg(&self) -> Self {
        FormalSeries { var: self.var, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    /// Product truncated to the minimum operand order.
    pub fn mul(&self, rhs: &Self) -> Self {
        self.check_var(rhs);
        let n = self.order().min(rhs.order());
        if n == 0 {
            return FormalSeries { var: self.var, coeffs: vec![] };
        }
        let like = &self.coeffs[0];
        let mut out = vec![T::zero_like(like); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(n - i) {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        FormalSeries { var: self.var, coeffs: out }
    }

    pub fn scale(&self, c: &T) -> Self {
        FormalSeries { var: self.var, coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect() }
    }

    pub fn scale_i64(&self, k: i64) -> Self {
        FormalSeries { var: self.var, coeffs: self.coeffs.iter().map(|a| a.mul_i64(k)).collect() }
    }

    /// Substitute x -> c * x.
    pub fn scale_var(&self, c: &T) -> Self {
        let mut pow = T::one_like(c);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i > 0 {
                    pow = pow.mul(c);
                }
                a.mul(&pow)
            })
            .collect();
        FormalSeries { var: self.var, coeffs }
    }

    /// Multiply by x^k, keeping the order (top k coefficients fall off).
    pub fn mul_var_pow(&self, k: usize) -> Self {
        let n = self.order();
        if n == 0 {
            return self.clone();
        }
        let like = &self.coeffs[0];
        let mut out = vec![T::zero_like(like); n];
        for i in 0..n.saturating_sub(k) {
            out[i + k] = self.coeffs[i].clone();
        }
        FormalSeries { var: self.var, coeffs: out }
    }

    /// Divide by x^k; the k lowest coefficients must vanish. The order drops by k.
    pub fn div_var_pow(&self, k: usize) -> Self {
        assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()), "nonzero low-order coefficient");
        FormalSeries { var: self.var, coeffs: self.coeffs[k.min(self.order())..].to_vec() }
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn series_inv(&self) -> Self {
        assert!(self.order() > 0);
        let c0 = self.coeffs[0].inv().expect("constant term not invertible");
        let n = self.order();
        let mut out = vec![T::zero_like(&c0); n];
        out[0] = c0.clone();
        for k in 1..n {
            let mut acc = T::zero_like(&c0);
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc = acc.add(&self.coeffs[j].mul(&out[k - j]));
                }
            }
            out[k] = acc.neg().mul(&c0);
        }
        FormalSeries { var: self.var, coeffs: out }
    }

    /// exp(f) for f with zero constant term, by the ODE recurrence
    /// n g_n = sum_{k=1}^{n} k f_k g_{n-k}.
    pub fn series_exp(&self) -> Self {
        assert!(self.order() > 0);
        assert!(self.coeffs[0].is_zero(), "exp needs zero constant term");
        let like = &self.coeffs[0];
        let n = self.order();
        let mut g = vec![T::zero_like(like); n];
        g[0] = T::one_like(like);
        for m in 1..n {
            let mut acc = T::zero_like(like);
            for k in 1..=m {
                if !self.coeffs[k].is_zero() {
                    acc = acc.add(&self.coeffs[k].mul_i64(k as i64).mul(&g[m - k]));
                }
            }
            g[m] = acc.div_i64(m as i64);
        }
        FormalSeries { var: self.var, coeffs: g }
    }

    /// log(f) for f with constant term 1.
    pub fn series_log(&self) -> Self {
        assert!(self.order() > 0);
        let like = &self.coeffs[0];
        assert!(self.coeffs[0] == T::one_like(like), "log needs constant term 1");
        let n = self.order();
        let mut l = vec![T::zero_like(like); n];
        for m in 1..n {
            let mut acc = self.coeffs[m].clone();
            for k in 1..m {
                acc = acc.sub(&l[k].mul_i64(k as i64).mul(&self.coeffs[m - k]).div_i64(m as i64));
            }
            l[m] = acc;
        }
        FormalSeries { var: self.var, coeffs: l }
    }

    pub fn pow_u64(&self, mut e: u64) -> Self {
        let like = &self.coeffs[0];
        let mut base = self.clone();
        let mut acc = Self::one(self.var, self.order(), like);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Formal derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_i64(i as i64))
            .collect();
        FormalSeries { var: self.var, coeffs }
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integrate(&self) -> Self {
        assert!(self.order() > 0);
        let like = &self.coeffs[0];
        let mut coeffs = vec![T::zero_like(like)];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.div_i64(i as i64 + 1));
        }
        FormalSeries { var: self.var, coeffs }
    }

    /// g(f) for f with zero constant term, by Horner over series.
    pub fn compose(&self, inner: &Self) -> Self {
        assert_eq!(self.var, inner.var);
        assert!(inner.order() == 0 || inner.coeffs[0].is_zero(), "composition needs f(0) = 0");
        let n = self.order().min(inner.order());
        if n == 0 {
            return FormalSeries { var: self.var, coeffs: vec![] };
        }
        let like = &self.coeffs[0];
        let inner = inner.truncate(n);
        let mut acc = FormalSeries::zero(self.var, n, like);
        for c in self.coeffs[..n].iter().rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        acc
    }

    pub fn map<U: Coeff>(&self, var: Var, f: impl Fn(&T) -> U) -> FormalSeries<U> {
        FormalSeries { var, coeffs: self.coeffs.iter().map(f).collect() }
    }
}

/// Series whose coefficients are themselves series form a ring; this is the
/// working representation for two-variable expansions such as phi(x, s).
impl<T: Coeff> Coeff for FormalSeries<T> {
    fn zero_like(like: &Self) -> Self {
        let inner = like.coeffs.first().expect("empty template series");
        FormalSeries::zero(like.var, like.order(), inner)
    }
    fn one_like(like: &Self) -> Self {
        let inner = like.coeffs.first().expect("empty template series");
        FormalSeries::one(like.var, like.order(), inner)
    }
    fn add(&self, rhs: &Self) -> Self {
        FormalSeries::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        FormalSeries::sub(self, rhs)
    }
    fn neg(&self) -> Self {
        FormalSeries::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        FormalSeries::mul(self, rhs)
    }
    fn mul_i64(&self, k: i64) -> Self {
        self.scale_i64(k)
    }
    fn div_i64(&self, k: i64) -> Self {
        FormalSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.div_i64(k)).collect(),
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.order() == 0 || self.coeffs[0].inv().is_none() {
            None
        } else {
            Some(self.series_inv())
        }
    }
    fn is_zero(&self) -> bool {
        FormalSeries::is_zero(self)
    }
}

impl FormalSeries<Rat> {
    /// Numeric image at the given precision.
    pub fn to_cf(&self, ctx: &super::PrecCtx) -> FormalSeries<Cf> {
        self.map(self.var, |r| Cf(ctx.complex_from(r)))
    }
}

impl FormalSeries<Cf> {
    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, x: &Complex) -> Complex {
        let prec = x.prec().0;
        let mut acc = Complex::new(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + &c.0;
        }
        acc
    }

    /// Largest coefficient magnitude, for sanity bounds.
    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(64);
        for c in self.coeffs.iter() {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }
}

/// Truncated series over a coefficient ring form a ring themselves, so a
/// series can serve as the scalar domain of a computation written once
/// against [`Coeff`]. Inversion requires a unit constant term; mixed
/// orders truncate to the shorter operand, as in the binary ops above.
impl<T: Coeff> Coeff for FormalSeries<T> {
    fn zero_like(like: &Self) -> Self {
        FormalSeries::zero(like.var, like.order(), like.coeff(0))
    }
    fn one_like(like: &Self) -> Self {
        FormalSeries::one(like.var, like.order(), like.coeff(0))
    }
    fn add(&self, rhs: &Self) -> Self {
        FormalSeries::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        FormalSeries::sub(self, rhs)
    }
    fn neg(&self) -> Self {
        FormalSeries::neg(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        FormalSeries::mul(self, rhs)
    }
    fn mul_i64(&self, k: i64) -> Self {
        self.scale_i64(k)
    }
    fn div_i64(&self, k: i64) -> Self {
        FormalSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| c.div_i64(k)).collect(),
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.order() == 0 || self.coeffs[0].inv().is_none() {
            None
        } else {
            Some(self.series_inv())
        }
    }
    fn is_zero(&self) -> bool {
        FormalSeries::is_zero(self)
    }
}

/// A perturbative series together with its exponential completion data:
/// the triple represents |c hbar|^kappa exp(v / (c^2 hbar)) * base, kept
/// symbolic so that different saddles can be combined exactly.
#[derive(Debug, Clone)]
pub struct CompletedSeries {
    pub base: FormalSeries<Cf>,
    /// The completed volume V(sigma) entering the exponential prefactor.
    pub volume: Complex,
    /// The half-integer weight kappa(sigma), zero or 3/2.
    pub weight: Rational,
    /// Denominator c of the root of unity the series is attached to.
    pub denom: u32,
}

impl CompletedSeries {
    pub fn new(base: FormalSeries<Cf>, volume: Complex, weight: Rational, denom: u32) -> Self {
        let w_ok = weight == Rational::from(0) || weight == Rational::from((3, 2));
        assert!(w_ok, "weight must be 0 or 3/2");
        assert!(denom > 0);
        CompletedSeries { base, volume, weight, denom }
    }

    /// |c hbar|^kappa exp(v / (c^2 hbar)) evaluated at hbar.
    pub fn prefactor(&self, hbar: &Complex) -> Complex {
        let prec = hbar.prec().0;
        let c = self.denom;
        let abs_ch = (Complex::with_val(prec, c) * hbar).abs();
        let kappa = Float::with_val(prec, &self.weight);
        let power = abs_ch.into_real_imag().0.pow(&kappa);
        let c2h = Complex::with_val(prec, c * c) * hbar;
        let expo = (&self.volume / &c2h).complete((prec, prec)).exp();
        expo * power
    }
}

fn float_to_json(x: &Float) -> Value {
    Value::String(x.to_string_radix(10, None))
}

fn float_from_json(v: &Value, bits: u32) -> Option<Float> {
    let s = v.as_str()?;
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}

/// Serialize a rational-coefficient series as {variable, order, domain, coeffs[]}
/// with rationals rendered "p/q".
pub fn rat_series_to_json(s: &FormalSeries<Rat>) -> Value {
    json!({
        "variable": s.var.as_str(),
        "order": s.order(),
        "domain": "rational",
        "coeffs": s.coeffs.iter().map(|c| Value::String(c.to_string())).collect::<Vec<_>>(),
    })
}

pub fn rat_series_from_json(v: &Value) -> Option<FormalSeries<Rat>> {
    let var = Var::from_str(v.get("variable")?.as_str()?)?;
    let order = v.get("order")?.as_u64()? as usize;
    if v.get("domain")?.as_str()? != "rational" {
        return None;
    }
    let coeffs: Option<Vec<Rat>> = v
        .get("coeffs")?
        .as_array()?
        .iter()
        .map(|c| c.as_str().and_then(|s| s.parse::<Rational>().ok()))
        .collect();
    let coeffs = coeffs?;
    if coeffs.len() != order {
        return None;
    }
    Some(FormalSeries::new(var, coeffs))
}

/// Serialize a complex-coefficient series; each coefficient is
/// {re, im, bits} with decimal strings.
pub fn cf_series_to_json(s: &FormalSeries<Cf>) -> Value {
    json!({
        "variable": s.var.as_str(),
        "order": s.order(),
        "domain": "complex",
        "coeffs": s
            .coeffs
            .iter()
            .map(|c| {
                json!({
                    "re": float_to_json(c.0.real()),
                    "im": float_to_json(c.0.imag()),
                    "bits": c.prec(),
                })
            })
            .collect::<Vec<_>>(),
    })
}

pub fn cf_series_from_json(v: &Value) -> Option<FormalSeries<Cf>> {
    let var = Var::from_str(v.get("variable")?.as_str()?)?;
    let order = v.get("order")?.as_u64()? as usize;
    if v.get("domain")?.as_str()? != "complex" {
        return None;
    }
    let coeffs: Option<Vec<Cf>> = v
        .get("coeffs")?
        .as_array()?
        .iter()
        .map(|c| {
            let bits = c.get("bits")?.as_u64()? as u32;
            let re = float_from_json(c.get("re")?, bits)?;
            let im = float_from_json(c.get("im")?, bits)?;
            Some(Cf(Complex::with_val(bits, (re, im))))
        })
        .collect();
    let coeffs = coeffs?;
    if coeffs.len() != order {
        return None;
    }
    Some(FormalSeries::new(var, coeffs))
}
