//! Recognition of numeric values as exact algebraic quantities.
//!
//! The workhorse is an integer-relation search built on lattice reduction.
//! A value known to P bits is matched against the embeddings of a field
//! basis by reducing the lattice whose rows pair an identity block with the
//! scaled real and imaginary parts of (basis, value). A candidate relation
//! is accepted only when the reconstructed element re-embeds within
//! 2^{-P/2} of the input; anything else is an explicit failure, never a
//! low-confidence guess.
//!
//! This file holds the relation engine and field-membership recognition.
//! The arithmetic normalization of perturbative coefficient families
//! (denominator models, unit prefactors, Galois packing) builds on top and
//! lives here as well once those pipelines exist.

mod reduction;

pub use reduction::{is_size_reduced, lll, lovasz_holds, norm_sq, Lattice, LllError};

use crate::fields::{FieldElement, NumberField};
use crate::mpcore::PrecCtx;
use rug::ops::Pow;
use rug::{Complex, Integer, Rational};
use std::sync::Arc;

/// Bits reserved between the scaling of the relation lattice and the
/// working precision; residuals of genuine relations stay below
/// 2^{GUARD_BITS/2} after scaling while spurious ones do not.
pub const GUARD_BITS: u32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum RecognizeError {
    /// No vector of the reduced lattice had a small enough residual.
    NoRelation,
    /// A relation was found but its coefficients exceed the height cap.
    HeightExceeded { digits: u32, cap: u32 },
    /// The reconstructed element does not re-embed to the input value.
    /// `required_bits` estimates the precision needed to settle the search.
    ResidualTooLarge { required_bits: u32 },
}

impl std::fmt::Display for RecognizeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RecognizeError::NoRelation => write!(f, "no integer relation at this precision"),
            RecognizeError::HeightExceeded { digits, cap } => {
                write!(f, "relation height {digits} digits exceeds cap {cap}")
            }
            RecognizeError::ResidualTooLarge { required_bits } => {
                write!(f, "candidate failed verification; retry with {required_bits} bits")
            }
        }
    }
}

fn scaled_column(x: &rug::Float, scale_bits: u32) -> Integer {
    let shifted = x.clone() << scale_bits;
    shifted.round().to_integer().expect("finite float")
}

/// Integer relation a_0 x_0 + ... + a_{n-1} x_{n-1} ~ 0 among complex
/// values, found by LLL at delta = 99/100. Returns the coefficient vector
/// of the best admissible lattice row, or None.
pub fn integer_relation(xs: &[Complex], ctx: &PrecCtx) -> Option<Vec<Integer>> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    let scale = ctx.bits().saturating_sub(GUARD_BITS);
    let mut rows = Vec::with_capacity(n);
    for (k, x) in xs.iter().enumerate() {
        let mut row = vec![Integer::new(); n + 2];
        row[k] = Integer::from(1);
        row[n] = scaled_column(x.real(), scale);
        row[n + 1] = scaled_column(x.imag(), scale);
        rows.push(row);
    }
    let reduced = lll(&Lattice::new(rows), &Rational::from((99u32, 100u32))).ok()?;

    // Admissible: scaled residual below 2^{GUARD_BITS/2}, identity part
    // nonzero. Among those, keep the shortest.
    let res_bound = Integer::from(1) << (GUARD_BITS / 2);
    let mut best: Option<(Integer, Vec<Integer>)> = None;
    for row in &reduced.basis {
        let coeffs = &row[..n];
        if coeffs.iter().all(|c| c.cmp0() == std::cmp::Ordering::Equal) {
            continue;
        }
        if row[n].clone().abs() > res_bound || row[n + 1].clone().abs() > res_bound {
            continue;
        }
        let nrm = norm_sq(coeffs);
        if best.as_ref().map_or(true, |(b, _)| nrm < *b) {
            best = Some((nrm, coeffs.to_vec()));
        }
    }
    best.map(|(_, v)| v)
}

/// Recognize `value` as an element of `field` through the given embedding.
///
/// The relation searched is a_0 + a_1 g + ... + a_{d-1} g^{d-1} + b z = 0
/// with g the field generator, so the element is -(sum a_k g^k)/b. The
/// height cap bounds the decimal size of all integers in the relation;
/// by default a third of the working digits, beyond which recognition
/// declines rather than guesses.
pub fn recognize_in_field(
    value: &Complex,
    field: &Arc<NumberField>,
    embedding: usize,
    cap_digits: Option<u32>,
    ctx: &PrecCtx,
) -> Result<FieldElement, RecognizeError> {
    let d = field.degree;
    let theta = field.root(embedding, ctx);
    let mut xs = Vec::with_capacity(d + 1);
    let mut p = ctx.complex_from(1);
    for _ in 0..d {
        xs.push(p.clone());
        p *= &theta;
    }
    xs.push(value.clone());

    let rel = integer_relation(&xs, ctx).ok_or(RecognizeError::NoRelation)?;
    let b = &rel[d];
    if b.cmp0() == std::cmp::Ordering::Equal {
        return Err(RecognizeError::NoRelation);
    }

    let cap = cap_digits.unwrap_or_else(|| std::cmp::max(4, ctx.decimal_digits() / 3));
    let height = rel
        .iter()
        .map(|a| a.to_string().trim_start_matches('-').len() as u32)
        .max()
        .unwrap_or(1);
    if height > cap {
        return Err(RecognizeError::HeightExceeded { digits: height, cap });
    }

    let coeffs: Vec<Rational> = rel[..d]
        .iter()
        .map(|a| -Rational::from((a.clone(), b.clone())))
        .collect();
    let elem = field.elem(coeffs);

    let err = elem.embed(embedding, ctx) - value;
    let tol = ctx.float_from(1) >> (ctx.bits() / 2);
    if err.abs().into_real_imag().0 > tol {
        let height_bits = rel
            .iter()
            .map(|a| a.significant_bits())
            .max()
            .unwrap_or(1);
        return Err(RecognizeError::ResidualTooLarge {
            required_bits: 2 * height_bits + 2 * GUARD_BITS,
        });
    }
    Ok(elem)
}

/// Universal denominator of the weight-n perturbative coefficient:
/// 2^{3n + v_2(n!)} times p^{sum_i [n/(p^i(p-2))]} over odd primes.
pub fn den_d(n: u32) -> Integer {
    let mut out = Integer::from(1) << (3 * n + factorial_valuation(n, 2));
    let mut p = 3u32;
    loop {
        let mut e = 0u32;
        let mut q = (p - 2) as u64;
        while q <= n as u64 {
            e += (n as u64 / q) as u32;
            q *= p as u64;
        }
        if e == 0 && p > n + 2 {
            break;
        }
        out *= Integer::from(p).pow(e);
        p = next_prime(p);
    }
    out
}

/// Denominator model for coefficients of the logarithm of the series:
/// product of p^{[n/(p-1)]} over primes, the classical von Staudt bound.
pub fn den_d_conn(n: u32) -> Integer {
    assert!(n >= 1);
    let mut out = Integer::from(1);
    let mut p = 2u32;
    while (p - 1) as u64 <= n as u64 {
        out *= Integer::from(p).pow(n / (p - 1));
        p = next_prime(p);
    }
    out
}

fn factorial_valuation(n: u32, p: u32) -> u32 {
    let mut e = 0;
    let mut q = p as u64;
    while q <= n as u64 {
        e += (n as u64 / q) as u32;
        q *= p as u64;
    }
    e
}

fn next_prime(p: u32) -> u32 {
    let mut q = p + 1;
    loop {
        if Integer::from(q).is_probably_prime(40) != rug::integer::IsPrime::No {
            return q;
        }
        q += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpcore::PrecCtx;
    use rug::ops::CompleteRound;

    fn ctx() -> PrecCtx {
        PrecCtx::new(256)
    }

    #[test]
    fn golden_ratio_minimal_polynomial_relation() {
        // phi^2 = phi + 1, so (1, 1, -1) relates (1, phi, phi^2).
        let g = ctx();
        let five = g.float_from(5).sqrt();
        let phi = g.complex_from((g.float_from(1) + five) / 2u32);
        let xs = vec![
            g.complex_from(1),
            phi.clone(),
            (&phi * &phi).complete((g.bits(), g.bits())),
        ];
        let rel = integer_relation(&xs, &g).unwrap();
        let sign = if rel[0].cmp0() == std::cmp::Ordering::Less {
            -1i32
        } else {
            1
        };
        let rel: Vec<i32> = rel.iter().map(|a| a.to_i32().unwrap() * sign).collect();
        assert_eq!(rel, vec![1, 1, -1]);
    }

    #[test]
    fn table_value_recognized_in_real_quadratic_field() {
        // 46 + 2*sqrt(5) = 50.47213595499957939281834733746...
        let g = ctx();
        let f = NumberField::sqrt5();
        let v = g.complex_from(g.float_str(
            "50.4721359549995793928183473374625524708812367192230514485417944908210418512756",
        ));
        let e = recognize_in_field(&v, &f, 0, None, &g).unwrap();
        assert_eq!(e, f.elem_ints(&[46, 2]));
    }

    #[test]
    fn primitive_sixth_root_recognized() {
        let g = ctx();
        let f = NumberField::sqrt_minus3();
        let zeta6 = g.e_of(&Rational::from((1u32, 6u32)));
        let e = recognize_in_field(&zeta6, &f, 0, None, &g).unwrap();
        // (1 + sqrt(-3))/2
        let half = Rational::from((1u32, 2u32));
        assert_eq!(e, f.elem(vec![half.clone(), half]));
    }

    #[test]
    fn recognition_round_trips_on_cubic_field_elements() {
        let g = ctx();
        let f = NumberField::xi_cubic();
        for coeffs in [[2i64, -7, 3], [0, 1, 0], [5, 0, -2], [-3, 11, 4]] {
            let e = f.elem_ints(&coeffs);
            for emb in 0..3 {
                let v = e.embed(emb, &g);
                let back = recognize_in_field(&v, &f, emb, None, &g).unwrap();
                assert_eq!(back, e, "coeffs {coeffs:?} embedding {emb}");
            }
        }
    }

    #[test]
    fn transcendental_input_is_declined() {
        let g = ctx();
        let f = NumberField::sqrt5();
        let pi = g.complex_from(g.pi());
        assert!(recognize_in_field(&pi, &f, 0, None, &g).is_err());
    }

    #[test]
    fn universal_denominators_match_tables() {
        let d: Vec<u64> = (0..6).map(|n| den_d(n).to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 24, 1152, 414720, 39813120, 6688604160]);
        assert_eq!(den_d(6).to_string(), "4815794995200");

        // n = 50 written out by prime factorization.
        let mut d50 = Integer::from(1) << 197u32;
        for (p, e) in [
            (3u32, 72u32),
            (5, 19),
            (7, 11),
            (11, 5),
            (13, 4),
            (17, 3),
            (19, 2),
            (23, 2),
            (29, 1),
            (31, 1),
            (37, 1),
            (41, 1),
            (43, 1),
            (47, 1),
        ] {
            d50 *= Integer::from(p).pow(e);
        }
        assert_eq!(den_d(50), d50);

        let dc: Vec<u64> = (1..=5).map(|n| den_d_conn(n).to_u64().unwrap()).collect();
        assert_eq!(dc, vec![2, 12, 24, 720, 1440]);
        assert_eq!(den_d_conn(12).to_string(), "2615348736000");
    }

    #[test]
    fn denominator_submultiplicativity() {
        for n1 in 0..10u32 {
            for n2 in 0..10u32 {
                let prod = den_d(n1) * den_d(n2);
                assert!(den_d(n1 + n2).is_divisible(&prod), "{n1} {n2}");
            }
        }
    }

    #[test]
    fn denominator_contains_factorial_scale() {
        // D_n / (24^n n!) is a positive integer.
        for n in 0..20u32 {
            let mut fact = Integer::from(1);
            for k in 2..=n {
                fact *= k;
            }
            let scale = fact * Integer::from(24).pow(n);
            assert!(den_d(n).is_divisible(&scale), "n = {n}");
        }
    }
}
