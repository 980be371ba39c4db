//! Exact number-field arithmetic with pinned complex embeddings.
//!
//! A field is Q[x]/(f) for a monic integer polynomial f. Elements are
//! rational vectors in the power basis. The embedding order is part of the
//! field's identity: every table downstream assumes a fixed numbering of
//! the roots, so constructors sort the roots by an explicit rule and the
//! index is stable across runs and precisions.
//!
//! The resident fields: the trace field Q(xi) with xi^3 - xi^2 + 1 = 0
//! (discriminant -23), ordered so that embedding 0 sends xi to the root
//! with negative imaginary part; Q(eta) with eta^3 + eta^2 - 2 eta - 1 = 0
//! (discriminant 49), ordered eta -> 2 cos(2 pi j / 7) for j = 1, 2, 3;
//! the quadratic fields Q(sqrt -3), Q(sqrt 3), Q(sqrt 5); and the
//! cyclotomic fields Q(zeta_n) with embeddings zeta -> e(k/n) in
//! increasing k coprime to n.

mod dedekind;
mod ext;
mod poly;

pub use dedekind::{dedekind_sum, dedekind_sum_sawtooth};
pub use ext::{CycloExt, ExtElement};
pub use poly::{cyclotomic, qp_deg, qp_from_ints, QPoly};

use std::sync::Arc;

use rug::{Complete, Complex, Float, Rational};
use serde_json::{json, Value};

use crate::mpcore::{Coeff, PrecCtx};
use poly::*;

/// Reference precision for the stored root approximations.
const ROOT_BITS: u32 = 512;

#[derive(Debug)]
pub struct NumberField {
    pub name: String,
    /// Monic defining polynomial with integer coefficients, low to high.
    pub poly: QPoly,
    pub degree: usize,
    /// One root per embedding, in the pinned order, at ROOT_BITS precision.
    embeddings: Vec<Complex>,
    /// Set for Q(zeta_n): the conductor n.
    pub conductor: Option<u32>,
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly && self.name == other.name
    }
}

impl NumberField {
    fn from_poly_sorted(
        name: &str,
        poly: QPoly,
        sort: impl Fn(&Complex, &Complex) -> std::cmp::Ordering,
    ) -> Arc<NumberField> {
        let degree = qp_deg(&poly).expect("constant defining polynomial");
        let ctx = PrecCtx::new(ROOT_BITS);
        let mut roots = if degree == 0 { vec![] } else { roots(&poly, &ctx) };
        roots.sort_by(&sort);
        Arc::new(NumberField { name: name.to_string(), poly, degree, embeddings: roots, conductor: None })
    }

    /// The rationals, as the degree-1 field Q[x]/(x).
    pub fn rationals() -> Arc<NumberField> {
        Arc::new(NumberField {
            name: "Q".into(),
            poly: qp_from_ints(&[0, 1]),
            degree: 1,
            embeddings: vec![Complex::new(ROOT_BITS)],
            conductor: None,
        })
    }

    /// Q(sqrt -3); embedding 0 sends the generator to +i sqrt(3).
    pub fn sqrt_minus3() -> Arc<NumberField> {
        Self::from_poly_sorted("Q(sqrt-3)", qp_from_ints(&[3, 0, 1]), |a, b| {
            b.imag().partial_cmp(a.imag()).unwrap()
        })
    }

    /// Q(sqrt 3); embedding 0 sends the generator to +sqrt(3).
    pub fn sqrt3() -> Arc<NumberField> {
        Self::from_poly_sorted("Q(sqrt3)", qp_from_ints(&[-3, 0, 1]), |a, b| {
            b.real().partial_cmp(a.real()).unwrap()
        })
    }

    /// Q(sqrt 5); embedding 0 sends the generator to +sqrt(5).
    pub fn sqrt5() -> Arc<NumberField> {
        Self::from_poly_sorted("Q(sqrt5)", qp_from_ints(&[-5, 0, 1]), |a, b| {
            b.real().partial_cmp(a.real()).unwrap()
        })
    }

    /// The cubic trace field with xi^3 - xi^2 + 1 = 0. Embedding order:
    /// 0 = negative imaginary part (the geometric one), 1 = positive
    /// imaginary part, 2 = the real root.
    pub fn xi_cubic() -> Arc<NumberField> {
        let class = |z: &Complex| {
            let im = z.imag().to_f64();
            if im < -1e-10 {
                0
            } else if im > 1e-10 {
                1
            } else {
                2
            }
        };
        Self::from_poly_sorted("Q(xi)", qp_from_ints(&[1, 0, -1, 1]), move |a, b| {
            class(a).cmp(&class(b))
        })
    }

    /// The totally real cubic field of conductor 7 with
    /// eta^3 + eta^2 - 2 eta - 1 = 0. Embedding j sends eta to
    /// 2 cos(2 pi (j+1) / 7), so the order is decreasing in the real value.
    pub fn eta_cubic() -> Arc<NumberField> {
        Self::from_poly_sorted("Q(eta)", qp_from_ints(&[-1, -2, 1, 1]), |a, b| {
            b.real().partial_cmp(a.real()).unwrap()
        })
    }

    /// Q(zeta_n) with the full cyclotomic polynomial; embeddings ordered by
    /// zeta -> e(k/n), k coprime to n increasing.
    pub fn cyclotomic_field(n: u32) -> Arc<NumberField> {
        assert!(n >= 1);
        let poly = cyclotomic(n);
        let degree = qp_deg(&poly).unwrap();
        let ctx = PrecCtx::new(ROOT_BITS);
        let ks: Vec<u32> = (1..=n).filter(|k| gcd(*k, n) == 1).collect();
        assert_eq!(ks.len(), degree);
        let embeddings: Vec<Complex> =
            ks.iter().map(|&k| ctx.e_of(&Rational::from((k, n)))).collect();
        Arc::new(NumberField {
            name: format!("Q(zeta{n})"),
            poly,
            degree,
            embeddings,
            conductor: Some(n),
        })
    }

    pub fn num_embeddings(&self) -> usize {
        self.embeddings.len()
    }

    /// The root for embedding idx, refined to ctx precision by Newton steps.
    pub fn root(&self, idx: usize, ctx: &PrecCtx) -> Complex {
        assert!(idx < self.embeddings.len(), "invalid embedding index");
        if self.degree == 1 {
            // rational field, nothing to refine
            let c = &self.poly[0];
            return ctx.complex_from(&(-c.clone()));
        }
        let work = PrecCtx::new(ctx.bits().max(ROOT_BITS) + 32);
        let mut z = work.complex_from(&self.embeddings[idx]);
        let dp = qp_derivative(&self.poly);
        let tol = Float::with_val(work.bits(), Float::i_exp(1, -(ctx.bits() as i32) - 16));
        for _ in 0..64 {
            let num = qp_eval_complex(&self.poly, &z, &work);
            let den = qp_eval_complex(&dp, &z, &work);
            let step = num / den;
            let done = step.clone().abs().into_real_imag().0 < tol;
            z -= step;
            if done {
                break;
            }
        }
        ctx.complex_from(&z)
    }

    pub fn elem(self: &Arc<Self>, coeffs: Vec<Rational>) -> FieldElement {
        assert_eq!(coeffs.len(), self.degree);
        FieldElement { field: Arc::clone(self), coeffs }
    }

    pub fn elem_ints(self: &Arc<Self>, v: &[i64]) -> FieldElement {
        assert!(v.len() <= self.degree);
        let mut coeffs: Vec<Rational> = v.iter().map(|&c| Rational::from(c)).collect();
        coeffs.resize(self.degree, Rational::new());
        FieldElement { field: Arc::clone(self), coeffs }
    }

    pub fn from_rational(self: &Arc<Self>, r: Rational) -> FieldElement {
        let mut coeffs = vec![Rational::new(); self.degree];
        coeffs[0] = r;
        FieldElement { field: Arc::clone(self), coeffs }
    }

    /// The class of x, i.e. the distinguished generator.
    pub fn gen(self: &Arc<Self>) -> FieldElement {
        let mut coeffs = vec![Rational::new(); self.degree];
        if self.degree == 1 {
            coeffs[0] = -self.poly[0].clone();
        } else {
            coeffs[1] = Rational::from(1);
        }
        FieldElement { field: Arc::clone(self), coeffs }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone)]
pub struct FieldElement {
    pub field: Arc<NumberField>,
    /// Power-basis coordinates over Q, length = degree.
    pub coeffs: Vec<Rational>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl FieldElement {
    fn check_field(&self, rhs: &Self) {
        assert!(*self.field == *rhs.field, "field mismatch");
    }

    fn from_poly(field: &Arc<NumberField>, p: QPoly) -> FieldElement {
        let r = qp_rem(&p, &field.poly);
        let mut coeffs = r;
        coeffs.resize(field.degree, Rational::new());
        FieldElement { field: Arc::clone(field), coeffs }
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.cmp0() == std::cmp::Ordering::Equal)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn pow_u32(&self, e: u32) -> FieldElement {
        let mut acc = FieldElement::one_like(self);
        let mut base = self.clone();
        let mut e = e;
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

    pub fn scale_rat(&self, r: &Rational) -> FieldElement {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| (c * r).complete()).collect(),
        }
    }

    /// Numeric value under embedding idx.
    pub fn embed(&self, idx: usize, ctx: &PrecCtx) -> Complex {
        let root = self.field.root(idx, ctx);
        let mut acc = ctx.complex_zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * &root + ctx.complex_from(c);
        }
        acc
    }

    /// Trace to Q: the trace of the multiplication-by-self matrix.
    pub fn trace(&self) -> Rational {
        let mut acc = Rational::new();
        let mut row = self.clone();
        // diagonal entry i is the x^i coefficient of self * x^i mod f
        acc += &row.coeffs[0];
        for i in 1..self.field.degree {
            row = row.mul_by_gen();
            acc += &row.coeffs[i];
        }
        acc
    }

    /// Norm to Q: determinant of the multiplication matrix.
    pub fn norm(&self) -> Rational {
        let d = self.field.degree;
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(d);
        let mut row = self.clone();
        rows.push(row.coeffs.clone());
        for _ in 1..d {
            row = row.mul_by_gen();
            rows.push(row.coeffs.clone());
        }
        det_rational(rows)
    }

    fn mul_by_gen(&self) -> FieldElement {
        let mut p: QPoly = vec![Rational::new()];
        p.extend(self.coeffs.iter().cloned());
        FieldElement::from_poly(&self.field, p)
    }

    /// Galois action zeta -> zeta^r on a cyclotomic field element.
    pub fn cyclo_galois(&self, r: u32) -> FieldElement {
        let n = self.field.conductor.expect("not a cyclotomic field");
        assert!(gcd(r % n, n) == 1, "galois exponent not coprime to conductor");
        let mut p: QPoly = vec![];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let e = ((j as u64 * r as u64) % n as u64) as usize;
            if p.len() < e + 1 {
                p.resize(e + 1, Rational::new());
            }
            p[e] += c;
        }
        // reduce zeta^e for e >= degree via x^n = 1 then mod Phi_n
        FieldElement::from_poly(&self.field, p)
    }
}

/// Plain Gaussian elimination over Q; pivots are exact so no stability
/// concern, only growth.
fn det_rational(mut m: Vec<Vec<Rational>>) -> Rational {
    let n = m.len();
    let mut det = Rational::from(1);
    for col in 0..n {
        let pivot = (col..n).find(|&r| m[r][col].cmp0() != std::cmp::Ordering::Equal);
        let Some(p) = pivot else {
            return Rational::new();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let inv = Rational::from(m[col][col].recip_ref());
        det *= &m[col][col];
        for r in col + 1..n {
            if m[r][col].cmp0() == std::cmp::Ordering::Equal {
                continue;
            }
            let factor = (&m[r][col] * &inv).complete();
            for c in col..n {
                let t = (&m[col][c] * &factor).complete();
                m[r][c] -= t;
            }
        }
    }
    det
}

impl Coeff for FieldElement {
    fn zero_like(like: &Self) -> Self {
        FieldElement {
            field: Arc::clone(&like.field),
            coeffs: vec![Rational::new(); like.field.degree],
        }
    }
    fn one_like(like: &Self) -> Self {
        like.field.from_rational(Rational::from(1))
    }
    fn add(&self, rhs: &Self) -> Self {
        self.check_field(rhs);
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| (a + b).complete())
                .collect(),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.check_field(rhs);
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| (a - b).complete())
                .collect(),
        }
    }
    fn neg(&self) -> Self {
        FieldElement {
            field: Arc::clone(&self.field),
            coeffs: self.coeffs.iter().map(|c| (-c).complete()).collect(),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.check_field(rhs);
        let p = qp_mul(&self.coeffs, &rhs.coeffs);
        FieldElement::from_poly(&self.field, p)
    }
    fn mul_i64(&self, k: i64) -> Self {
        self.scale_rat(&Rational::from(k))
    }
    fn div_i64(&self, k: i64) -> Self {
        assert!(k != 0);
        self.scale_rat(&Rational::from((1, k)))
    }
    fn inv(&self) -> Option<Self> {
        let mut p = self.coeffs.clone();
        poly::qp_trim(&mut p);
        if p.is_empty() {
            return None;
        }
        let (g, s, _t) = qp_xgcd(&p, &self.field.poly);
        assert_eq!(qp_deg(&g), Some(0), "defining polynomial not coprime to element");
        let inv_g = Rational::from(g[0].recip_ref());
        Some(FieldElement::from_poly(&self.field, qp_scale(&s, &inv_g)))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.cmp0() == std::cmp::Ordering::Equal)
    }
}

/// Field spec as {name, poly, embeddings: [{idx, re, im}]}.
pub fn field_to_json(f: &NumberField) -> Value {
    json!({
        "name": f.name,
        "poly": f.poly.iter().map(|c| Value::String(c.to_string())).collect::<Vec<_>>(),
        "embeddings": f
            .embeddings
            .iter()
            .enumerate()
            .map(|(idx, z)| {
                json!({
                    "idx": idx,
                    "re": z.real().to_string_radix(10, None),
                    "im": z.imag().to_string_radix(10, None),
                })
            })
            .collect::<Vec<_>>(),
    })
}

/// Load a field spec, verifying that each listed embedding is a root.
pub fn field_from_json(v: &Value) -> Option<Arc<NumberField>> {
    let name = v.get("name")?.as_str()?;
    let poly: Option<QPoly> = v
        .get("poly")?
        .as_array()?
        .iter()
        .map(|c| c.as_str().and_then(|s| s.parse::<Rational>().ok()))
        .collect();
    let mut poly = poly?;
    poly::qp_trim(&mut poly);
    let degree = qp_deg(&poly)?;
    let ctx = PrecCtx::new(ROOT_BITS);
    let mut embeddings: Vec<(usize, Complex)> = vec![];
    for e in v.get("embeddings")?.as_array()? {
        let idx = e.get("idx")?.as_u64()? as usize;
        let re = Float::parse(e.get("re")?.as_str()?).ok()?;
        let im = Float::parse(e.get("im")?.as_str()?).ok()?;
        let z = Complex::with_val(ROOT_BITS, (Float::with_val(ROOT_BITS, re), Float::with_val(ROOT_BITS, im)));
        let val = qp_eval_complex(&poly, &z, &ctx).abs().into_real_imag().0;
        if val > ctx.float_from(1e-100) {
            return None;
        }
        embeddings.push((idx, z));
    }
    embeddings.sort_by_key(|(idx, _)| *idx);
    let embeddings: Vec<Complex> = embeddings.into_iter().map(|(_, z)| z).collect();
    if degree > 1 && embeddings.len() != degree {
        return None;
    }
    Some(Arc::new(NumberField { name: name.into(), poly, degree, embeddings, conductor: None }))
}

pub fn elem_to_json(e: &FieldElement) -> Value {
    json!({
        "field": e.field.name,
        "coeffs": e.coeffs.iter().map(|c| Value::String(c.to_string())).collect::<Vec<_>>(),
    })
}

pub fn elem_from_json(v: &Value, field: &Arc<NumberField>) -> Option<FieldElement> {
    if v.get("field")?.as_str()? != field.name {
        return None;
    }
    let coeffs: Option<Vec<Rational>> = v
        .get("coeffs")?
        .as_array()?
        .iter()
        .map(|c| c.as_str().and_then(|s| s.parse::<Rational>().ok()))
        .collect();
    let coeffs = coeffs?;
    if coeffs.len() != field.degree {
        return None;
    }
    Some(field.elem(coeffs))
}
