//! Dense univariate polynomials over Q, just enough for number-field
//! arithmetic: division with remainder, extended gcd, cyclotomic
//! polynomials, and root isolation by Durand-Kerner iteration.

use rug::ops::CompleteRound;
use rug::{Complete, Complex, Rational};

use crate::mpcore::PrecCtx;

/// Coefficients low to high; no trailing zeros except for the zero
/// polynomial, which is the empty vector.
pub type QPoly = Vec<Rational>;

pub fn qp_trim(p: &mut QPoly) {
    while let Some(c) = p.last() {
        if c.cmp0() == std::cmp::Ordering::Equal {
            p.pop();
        } else {
            break;
        }
    }
}

pub fn qp_deg(p: &QPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub fn qp_from_ints(v: &[i64]) -> QPoly {
    let mut p: QPoly = v.iter().map(|&c| Rational::from(c)).collect();
    qp_trim(&mut p);
    p
}

pub fn qp_add(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![Rational::new(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    qp_trim(&mut out);
    out
}

pub fn qp_sub(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![Rational::new(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    qp_trim(&mut out);
    out
}

pub fn qp_mul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.cmp0() == std::cmp::Ordering::Equal {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += (x * y).complete();
        }
    }
    qp_trim(&mut out);
    out
}

pub fn qp_scale(a: &QPoly, c: &Rational) -> QPoly {
    let mut out: QPoly = a.iter().map(|x| (x * c).complete()).collect();
    qp_trim(&mut out);
    out
}

/// Quotient and remainder of a by b, b nonzero.
pub fn qp_divmod(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let db = qp_deg(b).expect("division by zero polynomial");
    let mut rem = a.clone();
    let mut quot: QPoly = vec![];
    let lead = b[db].clone();
    while let Some(dr) = qp_deg(&rem) {
        if dr < db {
            break;
        }
        let k = dr - db;
        let factor = (&rem[dr] / &lead).complete();
        if quot.len() < k + 1 {
            quot.resize(k + 1, Rational::new());
        }
        quot[k] = factor.clone();
        for (j, c) in b.iter().enumerate() {
            let t = (c * &factor).complete();
            rem[k + j] -= t;
        }
        qp_trim(&mut rem);
    }
    qp_trim(&mut quot);
    (quot, rem)
}

/// Reduce a modulo b.
pub fn qp_rem(a: &QPoly, b: &QPoly) -> QPoly {
    qp_divmod(a, b).1
}

/// Monic gcd together with Bezout cofactors: g = s a + t b.
pub fn qp_xgcd(a: &QPoly, b: &QPoly) -> (QPoly, QPoly, QPoly) {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    let mut s0: QPoly = vec![Rational::from(1)];
    let mut s1: QPoly = vec![];
    let mut t0: QPoly = vec![];
    let mut t1: QPoly = vec![Rational::from(1)];
    while !r1.is_empty() {
        let (q, r) = qp_divmod(&r0, &r1);
        let s = qp_sub(&s0, &qp_mul(&q, &s1));
        let t = qp_sub(&t0, &qp_mul(&q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    if let Some(d) = qp_deg(&r0) {
        let inv = Rational::from(r0[d].recip_ref());
        r0 = qp_scale(&r0, &inv);
        s0 = qp_scale(&s0, &inv);
        t0 = qp_scale(&t0, &inv);
    }
    (r0, s0, t0)
}

pub fn qp_eval_complex(p: &QPoly, z: &Complex, ctx: &PrecCtx) -> Complex {
    let mut acc = ctx.complex_zero();
    for c in p.iter().rev() {
        acc = acc * z + ctx.complex_from(c);
    }
    acc
}

pub fn qp_derivative(p: &QPoly) -> QPoly {
    let mut out: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Rational::from(i as u64) * c)
        .collect();
    qp_trim(&mut out);
    out
}

/// The n-th cyclotomic polynomial, exactly, via
/// Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d.
pub fn cyclotomic(n: u32) -> QPoly {
    assert!(n >= 1);
    let mut num = vec![Rational::new(); n as usize + 1];
    num[0] = Rational::from(-1);
    num[n as usize] = Rational::from(1);
    let mut den: QPoly = vec![Rational::from(1)];
    for d in 1..n {
        if n % d == 0 {
            den = qp_mul(&den, &cyclotomic(d));
        }
    }
    let (q, r) = qp_divmod(&num, &den);
    assert!(r.is_empty(), "cyclotomic division not exact");
    q
}

/// All complex roots of a squarefree polynomial by Durand-Kerner
/// iteration at ctx precision, in unspecified order.
pub fn roots(p: &QPoly, ctx: &PrecCtx) -> Vec<Complex> {
    let deg = qp_deg(p).expect("zero polynomial");
    if deg == 0 {
        return vec![];
    }
    let prec = ctx.bits();
    // monic normalization
    let lead = Rational::from(p[deg].recip_ref());
    let monic = qp_scale(p, &lead);
    // starting points on a slightly irrational spiral to break symmetry
    let mut zs: Vec<Complex> = (0..deg)
        .map(|k| {
            let angle = ctx.float_from(2 * k as u32 + 1) * ctx.pi() / ctx.float_from(deg as u32)
                + ctx.float_from(0.3577);
            let (s, c) = angle.sin_cos(ctx.float_zero());
            let r = ctx.float_from(1) + ctx.float_from(k as u32) / ctx.float_from(10 * deg as u32);
            ctx.complex(c * &r, s * r)
        })
        .collect();
    let tol = rug::Float::with_val(prec, rug::Float::i_exp(1, -(prec as i32) + 8));
    for _iter in 0..10_000 {
        let mut max_step = ctx.float_zero();
        for i in 0..deg {
            let num = qp_eval_complex(&monic, &zs[i], ctx);
            let mut den = ctx.complex_from(1);
            for j in 0..deg {
                if j != i {
                    den *= (&zs[i] - &zs[j]).complete((prec, prec));
                }
            }
            let step = num / den;
            let mag = step.clone().abs().into_real_imag().0;
            if mag > max_step {
                max_step = mag;
            }
            zs[i] -= step;
        }
        if max_step < tol {
            return zs;
        }
    }
    panic!("root iteration failed to converge");
}
