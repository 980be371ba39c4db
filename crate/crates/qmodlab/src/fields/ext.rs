//! The compositum F(zeta_c) of a number field with a root of unity.
//!
//! Elements live in the power basis 1, zeta, ..., zeta^{d-1} over F, where
//! d is the degree of the minimal polynomial of zeta_c over F. When F and
//! Q(zeta_c) meet only in Q that polynomial is Phi_c itself. The one
//! nontrivial overlap handled here is a quadratic F = Q(sqrt m) sitting
//! inside Q(zeta_c): then Phi_c splits into a conjugate pair A Abar over F,
//! cut out by the Kronecker character of the field discriminant. A is
//! found by multiplying out its known roots e(k/c) at high precision,
//! reconstructing each coefficient as u + v sqrt(m) with rational u, v,
//! and the product A Abar = Phi_c is then verified exactly, so a faulty
//! reconstruction cannot survive construction.

use std::sync::Arc;

use rug::ops::CompleteRound;
use rug::{Complete, Complex, Float, Integer, Rational};

use crate::mpcore::{Coeff, PrecCtx};

use super::poly::{cyclotomic, qp_deg};
use super::{FieldElement, NumberField};

/// Work precision for root products during the split.
const SPLIT_BITS: u32 = 512;

#[derive(Debug)]
pub struct CycloExt {
    pub base: Arc<NumberField>,
    pub conductor: u32,
    /// Minimal polynomial of zeta_c over the base, monic, low to high,
    /// length degree + 1.
    pub min_poly: Vec<FieldElement>,
    pub degree: usize,
    /// Base embedding paired with zeta -> e(1/c) in `embed`.
    pub base_embedding: usize,
}

impl CycloExt {
    /// Adjoin zeta_c to the base field.
    pub fn new(base: &Arc<NumberField>, c: u32) -> Arc<CycloExt> {
        assert!(c >= 1);
        let phi = cyclotomic(c);
        let quad = quadratic_overlap(base, c);
        if let Some(disc) = quad {
            return Self::split_quadratic(base, c, disc);
        }
        if base.name == "Q(eta)" && c % 7 == 0 {
            // Q(eta) lies in Q(zeta_7), so Phi_c is reducible here and the
            // quadratic machinery does not apply.
            unimplemented!("cyclic cubic overlap with the cyclotomic tower");
        }
        let degree = qp_deg(&phi).unwrap();
        let min_poly = phi.iter().map(|r| base.from_rational(r.clone())).collect();
        Arc::new(CycloExt { base: Arc::clone(base), conductor: c, min_poly, degree, base_embedding: 0 })
    }

    /// Split Phi_c over a quadratic field of discriminant disc dividing c.
    fn split_quadratic(base: &Arc<NumberField>, c: u32, disc: i64) -> Arc<CycloExt> {
        let ctx = PrecCtx::new(SPLIT_BITS);
        let d_int = Integer::from(disc);
        let ks: Vec<u32> = (1..c)
            .filter(|&k| gcd_u32(k, c) == 1 && d_int.kronecker(&Integer::from(k)) == 1)
            .collect();
        // zeta itself must be a root of the chosen factor
        assert!(ks.contains(&1));
        // multiply out A(x) = prod (x - e(k/c)) and its conjugate
        let a_num = poly_from_roots(&ks, c, &ctx);
        let b_ks: Vec<u32> = (1..c)
            .filter(|&k| gcd_u32(k, c) == 1 && d_int.kronecker(&Integer::from(k)) == -1)
            .collect();
        let b_num = poly_from_roots(&b_ks, c, &ctx);
        assert_eq!(a_num.len(), b_num.len());

        // generator value under embedding 0 of the base
        let g_num = base.root(0, &ctx);
        let tol = Float::with_val(SPLIT_BITS, Float::i_exp(1, -(SPLIT_BITS as i32) / 2));
        let mut min_poly: Vec<FieldElement> = Vec::with_capacity(a_num.len());
        for (az, bz) in a_num.iter().zip(&b_num) {
            // a = u + v g, b = u - v g with u, v rational
            let u2 = (az + bz).complete((SPLIT_BITS, SPLIT_BITS));
            let v2g = (az - bz).complete((SPLIT_BITS, SPLIT_BITS));
            let vg = v2g / &g_num;
            assert!(u2.imag().clone().abs() < tol, "coefficient sum not rational");
            assert!(vg.imag().clone().abs() < tol, "coefficient skew not rational");
            let u = rat_reconstruct(&(u2.into_real_imag().0 / 2u32), &tol)
                .expect("rational reconstruction failed");
            let v = rat_reconstruct(&(vg.into_real_imag().0 / 2u32), &tol)
                .expect("rational reconstruction failed");
            let mut coeffs = vec![Rational::new(); base.degree];
            coeffs[0] = u;
            coeffs[1] = v;
            min_poly.push(base.elem(coeffs));
        }
        let degree = min_poly.len() - 1;
        assert!(min_poly[degree] == base.from_rational(Rational::from(1)));

        // exact certificate: A times its conjugate is Phi_c on the nose
        let conj: Vec<FieldElement> = min_poly
            .iter()
            .map(|e| {
                let mut coeffs = e.coeffs.clone();
                coeffs[1] = (-&coeffs[1]).complete();
                base.elem(coeffs)
            })
            .collect();
        let prod = cpoly_mul(&min_poly, &conj);
        let phi = cyclotomic(c);
        assert_eq!(prod.len(), phi.len(), "split product has wrong degree");
        for (p, q) in prod.iter().zip(&phi) {
            assert!(
                *p == base.from_rational(q.clone()),
                "split certificate failed for conductor {c}"
            );
        }
        Arc::new(CycloExt { base: Arc::clone(base), conductor: c, min_poly, degree, base_embedding: 0 })
    }

    pub fn zero(self: &Arc<Self>) -> ExtElement {
        let z = FieldElement::zero_like(&self.base.gen());
        ExtElement { ext: Arc::clone(self), coeffs: vec![z; self.degree] }
    }

    pub fn one(self: &Arc<Self>) -> ExtElement {
        self.from_base(&self.base.from_rational(Rational::from(1)))
    }

    pub fn from_base(self: &Arc<Self>, e: &FieldElement) -> ExtElement {
        assert!(*e.field == *self.base);
        let mut out = self.zero();
        out.coeffs[0] = e.clone();
        out
    }

    /// The adjoined root of unity.
    pub fn zeta(self: &Arc<Self>) -> ExtElement {
        if self.degree == 1 {
            // collapsed case: zeta already lies in the base
            let z = self.min_poly[0].neg();
            return self.from_base(&z);
        }
        let mut out = self.zero();
        out.coeffs[1] = FieldElement::one_like(&self.base.gen());
        out
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

/// Quadratic discriminant shared between the base and Q(zeta_c), if any.
/// Only bases of the shape x^2 - m are inspected; cubic fields here are
/// either non-Galois or flagged in `new`.
fn quadratic_overlap(base: &Arc<NumberField>, c: u32) -> Option<i64> {
    if base.degree != 2 {
        return None;
    }
    if base.poly[1].cmp0() != std::cmp::Ordering::Equal {
        return None;
    }
    let m_rat = (-&base.poly[0]).complete();
    let m = m_rat.numer().to_i64()?;
    if !m_rat.is_integer() || m == 0 {
        return None;
    }
    let disc = if m.rem_euclid(4) == 1 { m } else { 4 * m };
    if (c as i64) % disc.abs() == 0 {
        Some(disc)
    } else {
        None
    }
}

/// prod_{k in ks} (x - e(k/c)) as complex coefficients, low to high.
fn poly_from_roots(ks: &[u32], c: u32, ctx: &PrecCtx) -> Vec<Complex> {
    let mut coeffs = vec![ctx.complex_from(1)];
    for &k in ks {
        let root = ctx.e_of(&Rational::from((k, c)));
        let mut next = vec![ctx.complex_zero(); coeffs.len() + 1];
        for (i, co) in coeffs.iter().enumerate() {
            next[i + 1] += co;
            next[i] -= (co * &root).complete((ctx.bits(), ctx.bits()));
        }
        coeffs = next;
    }
    coeffs
}

/// Best rational with small height within tol of x.
fn rat_reconstruct(x: &Float, tol: &Float) -> Option<Rational> {
    let exact = x.to_rational()?;
    let (mut n, mut d) = exact.clone().into_numer_denom();
    let mut h_prev = Integer::from(1);
    let mut h_prev2 = Integer::from(0);
    let mut q_prev = Integer::from(0);
    let mut q_prev2 = Integer::from(1);
    for _ in 0..SPLIT_BITS as usize + 8 {
        if d.cmp0() == std::cmp::Ordering::Equal {
            return Some(exact);
        }
        let (a, r) = n.div_rem_floor(d.clone());
        let h = (&a * &h_prev).complete() + &h_prev2;
        let q = (&a * &q_prev).complete() + &q_prev2;
        if q.cmp0() != std::cmp::Ordering::Equal {
            let cand = Rational::from((h.clone(), q.clone()));
            let err = (Rational::from(&cand) - &exact).abs();
            if Float::with_val(tol.prec(), err) < *tol {
                return Some(cand);
            }
        }
        h_prev2 = std::mem::replace(&mut h_prev, h);
        q_prev2 = std::mem::replace(&mut q_prev, q);
        n = d;
        d = r;
    }
    None
}

#[derive(Debug, Clone)]
pub struct ExtElement {
    pub ext: Arc<CycloExt>,
    /// Coordinates over the base in powers of zeta, length = ext.degree.
    pub coeffs: Vec<FieldElement>,
}

impl PartialEq for ExtElement {
    fn eq(&self, other: &Self) -> bool {
        self.ext.conductor == other.ext.conductor
            && *self.ext.base == *other.ext.base
            && self.coeffs == other.coeffs
    }
}

impl ExtElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.add(b)).collect();
        ExtElement { ext: Arc::clone(&self.ext), coeffs }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a.sub(b)).collect();
        ExtElement { ext: Arc::clone(&self.ext), coeffs }
    }

    pub fn neg(&self) -> Self {
        ExtElement { ext: Arc::clone(&self.ext), coeffs: self.coeffs.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale_base(&self, s: &FieldElement) -> Self {
        ExtElement {
            ext: Arc::clone(&self.ext),
            coeffs: self.coeffs.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let raw = cpoly_mul(&self.coeffs, &rhs.coeffs);
        let red = cpoly_rem_monic(raw, &self.ext.min_poly);
        let zero = FieldElement::zero_like(&self.ext.base.gen());
        let mut coeffs = red;
        coeffs.resize(self.ext.degree, zero);
        ExtElement { ext: Arc::clone(&self.ext), coeffs }
    }

    pub fn pow_u32(&self, e: u32) -> Self {
        let mut acc = self.ext.one();
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Trace to the base field: trace of the multiplication matrix.
    pub fn trace_to_base(&self) -> FieldElement {
        let mut acc = self.coeffs[0].clone();
        let mut row = self.clone();
        for i in 1..self.ext.degree {
            row = row.mul_by_zeta();
            acc = acc.add(&row.coeffs[i]);
        }
        acc
    }

    fn mul_by_zeta(&self) -> Self {
        let mut raw = vec![FieldElement::zero_like(&self.ext.base.gen())];
        raw.extend(self.coeffs.iter().cloned());
        let red = cpoly_rem_monic(raw, &self.ext.min_poly);
        let zero = FieldElement::zero_like(&self.ext.base.gen());
        let mut coeffs = red;
        coeffs.resize(self.ext.degree, zero);
        ExtElement { ext: Arc::clone(&self.ext), coeffs }
    }

    /// Numeric value with the base under its pinned embedding and
    /// zeta -> e(1/c).
    pub fn embed(&self, ctx: &PrecCtx) -> Complex {
        let zeta = ctx.e_of(&Rational::from((1u32, self.ext.conductor)));
        let mut acc = ctx.complex_zero();
        for c in self.coeffs.iter().rev() {
            let cv = c.embed(self.ext.base_embedding, ctx);
            acc = acc * &zeta + cv;
        }
        acc
    }
}

/// Convolution product of coefficient vectors over the base field.
fn cpoly_mul(a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let zero = FieldElement::zero_like(&a[0]);
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Remainder of a modulo the monic polynomial m.
fn cpoly_rem_monic(mut a: Vec<FieldElement>, m: &[FieldElement]) -> Vec<FieldElement> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - dm;
        for (j, mj) in m[..dm].iter().enumerate() {
            a[shift + j] = a[shift + j].sub(&lead.mul(mj));
        }
    }
    a
}
