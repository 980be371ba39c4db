//! Congruence scan for families of cyclotomic values indexed by primes.
//!
//! A family p -> v_p in Z[zeta_p] that comes from a single element of
//! the Habiro ring inherits a strong arithmetic fingerprint: writing v_p
//! in powers of q - 1, the i-th coefficient is congruent mod p to the
//! i-th coefficient of one p-independent integer series, for every prime
//! p > i + 1. The scan recovers those integers from the residues by CRT
//! and accepts them only when they are tiny against the CRT modulus, so
//! agreement by accident is ruled out at desk scale.

use crate::fields::FieldElement;
use rug::integer::IsPrime;
use rug::{Complete, Integer};
use std::collections::BTreeMap;

/// Result of a scan: the lifted coefficients of the difference
/// expansion, whether every lift stayed small, and the first prime whose
/// removal repairs a failed lift, with the depth where it was caught.
#[derive(Clone, Debug, PartialEq)]
pub struct OhtsukiReport {
    pub coeffs: Vec<Integer>,
    pub pass: bool,
    pub violation: Option<(u64, usize)>,
}

fn binom(n: u64, k: usize) -> Integer {
    if k as u64 > n {
        return Integer::new();
    }
    let mut acc = Integer::from(1);
    for j in 0..k as u64 {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

/// i-th coefficient of the value rewritten in powers of q - 1, mod p:
/// sum_j a_j C(j, i). For p > i + 1 the sum is the same for every
/// representative mod q^p - 1, so the power basis coefficients suffice.
fn residue(v: &FieldElement, p: u64, i: usize) -> Integer {
    let pz = Integer::from(p);
    let mut acc = Integer::new();
    for (j, a) in v.coeffs.iter().enumerate() {
        let b = binom(j as u64, i) % &pz;
        if b == 0 {
            continue;
        }
        let num = (a.numer() % &pz).complete();
        let den = (a.denom() % &pz).complete();
        let dinv = den.invert(&pz).expect("denominator invertible mod p");
        acc += (num * dinv) * b;
    }
    let r = acc % &pz;
    if r < 0 {
        r + pz
    } else {
        r
    }
}

/// Symmetric CRT lift of residues at pairwise distinct primes, with the
/// combined modulus.
fn crt_lift(residues: &[(u64, Integer)]) -> (Integer, Integer) {
    let mut m = Integer::from(1);
    for (p, _) in residues {
        m *= *p;
    }
    let mut x = Integer::new();
    for (p, r) in residues {
        let pi = Integer::from(*p);
        let mp = (&m / &pi).complete();
        let inv = mp.clone().invert(&pi).expect("distinct primes");
        x += r * mp * inv;
    }
    x %= &m;
    if x < 0 {
        x += &m;
    }
    if (&x * 2u32).complete() > m {
        x -= &m;
    }
    (x, m)
}

fn small_enough(x: &Integer, m: &Integer) -> bool {
    let bound = m.clone().sqrt() / 2u32;
    x.clone().abs() <= bound
}

/// Scan the family for the congruence pattern above, through the given
/// depth inclusive. Keys must be primes and each value must live in the
/// cyclotomic field of its key. A genuine family yields small lifts at
/// every depth; a single corrupted member is pinned down by leaving one
/// prime out at a time.
pub fn ohtsuki_test(values: &BTreeMap<u64, FieldElement>, depth: usize) -> OhtsukiReport {
    for (p, v) in values {
        let prime = Integer::from(*p).is_probably_prime(30) != IsPrime::No;
        assert!(prime, "family key {p} is not prime");
        assert_eq!(v.field.conductor, Some(*p as u32), "value at {p} not in Q(zeta_{p})");
    }
    let mut coeffs = Vec::with_capacity(depth + 1);
    let mut pass = true;
    let mut violation = None;
    for i in 0..=depth {
        let residues: Vec<(u64, Integer)> = values
            .iter()
            .filter(|(p, _)| **p > i as u64 + 1)
            .map(|(p, v)| (*p, residue(v, *p, i)))
            .collect();
        assert!(residues.len() >= 2, "need two primes above depth {i}");
        let (lift, m) = crt_lift(&residues);
        if pass && !small_enough(&lift, &m) {
            pass = false;
            for skip in 0..residues.len() {
                let rest: Vec<(u64, Integer)> = residues
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, x)| x.clone())
                    .collect();
                let (l2, m2) = crt_lift(&rest);
                if small_enough(&l2, &m2) {
                    violation = Some((residues[skip].0, i));
                    break;
                }
            }
        }
        coeffs.push(lift);
    }
    OhtsukiReport { coeffs, pass, violation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::NumberField;
    use crate::habiro::five_two_row_entry;
    use rug::Rational;

    const PRIMES: [u64; 8] = [3, 5, 7, 11, 13, 17, 19, 23];

    #[test]
    fn five_two_corner_entry_has_integral_difference_expansion() {
        let mut family = BTreeMap::new();
        for p in PRIMES {
            family.insert(p, five_two_row_entry(3, &Rational::from((-1, p as i64))).unwrap());
        }
        let rep = ohtsuki_test(&family, 5);
        assert!(rep.pass, "report: {rep:?}");
        let want: Vec<Integer> = [2i64, -3, 8, -28, 120, -614].map(Integer::from).into();
        assert_eq!(rep.coeffs, want);
        assert_eq!(rep.violation, None);
    }

    fn constant_family(c: i64) -> BTreeMap<u64, FieldElement> {
        PRIMES
            .iter()
            .map(|&p| {
                (p, NumberField::cyclotomic_field(p as u32).from_rational(Rational::from(c)))
            })
            .collect()
    }

    #[test]
    fn constant_family_recovers_the_constant() {
        let rep = ohtsuki_test(&constant_family(7), 3);
        assert!(rep.pass);
        let want: Vec<Integer> = [7i64, 0, 0, 0].map(Integer::from).into();
        assert_eq!(rep.coeffs, want);
    }

    #[test]
    fn shift_by_own_prime_is_invisible() {
        let mut family = constant_family(7);
        let nf = NumberField::cyclotomic_field(11);
        family.insert(11, nf.from_rational(Rational::from(18)));
        let rep = ohtsuki_test(&family, 3);
        assert!(rep.pass);
        assert_eq!(rep.coeffs[0], 7);
    }

    #[test]
    fn single_corrupted_prime_is_identified() {
        let mut family = constant_family(7);
        let nf = NumberField::cyclotomic_field(11);
        family.insert(11, nf.from_rational(Rational::from(8)));
        let rep = ohtsuki_test(&family, 3);
        assert!(!rep.pass);
        assert_eq!(rep.violation, Some((11, 0)));
    }
}
