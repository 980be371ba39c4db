//! Dedekind sums s(a, c) as exact rationals.
//!
//! s(a, c) = sum_{k mod c} ((k/c)) ((ka/c)) with ((x)) the sawtooth
//! x - floor(x) - 1/2 away from integers and 0 on them. The fast path
//! runs the reciprocity law
//!
//!   s(a, c) + s(c, a) = -1/4 + (a/c + c/a + 1/(ac)) / 12
//!
//! down a Euclidean remainder chain, so the cost is O(log c) exact
//! rational operations. The literal sawtooth sum stays as the oracle.

use rug::Rational;

/// Dedekind sum s(a, c) for c >= 1 and gcd(a, c) = 1.
pub fn dedekind_sum(a: i64, c: i64) -> Rational {
    assert!(c >= 1, "modulus must be positive");
    let a = a.rem_euclid(c);
    assert!(gcd(a, c) == 1, "arguments must be coprime");
    sum_rec(a, c)
}

fn sum_rec(a: i64, c: i64) -> Rational {
    // invariant: 0 <= a < c, gcd(a, c) = 1
    if a == 0 {
        // only reachable with c = 1
        return Rational::new();
    }
    let recip = Rational::from((a, c)) + Rational::from((c, a)) + Rational::from((1, a * c));
    let recip = recip / 12 - Rational::from((1, 4));
    recip - sum_rec(c.rem_euclid(a), a)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The defining sum, term by term. Quadratic in c; oracle only.
pub fn dedekind_sum_sawtooth(a: i64, c: i64) -> Rational {
    assert!(c >= 1);
    let mut acc = Rational::new();
    for k in 1..c {
        acc += sawtooth(k, c) * sawtooth((k * a).rem_euclid(c), c);
    }
    acc
}

/// ((k/c)) for the residue k mod c.
fn sawtooth(k: i64, c: i64) -> Rational {
    let k = k.rem_euclid(c);
    if k == 0 {
        Rational::new()
    } else {
        Rational::from((k, c)) - Rational::from((1, 2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        for a in 0..5 {
            assert_eq!(dedekind_sum(a, 1), Rational::new());
        }
        assert_eq!(dedekind_sum(1, 2), Rational::new());
        assert_eq!(dedekind_sum(1, 3), Rational::from((1, 18)));
        assert_eq!(dedekind_sum(2, 3), Rational::from((-1, 18)));
        assert_eq!(dedekind_sum(1, 12), Rational::from((55, 72)));
    }

    #[test]
    fn matches_sawtooth_oracle() {
        for c in 1..=40i64 {
            for a in 0..c {
                if super::gcd(a, c) != 1 {
                    continue;
                }
                assert_eq!(
                    dedekind_sum(a, c),
                    dedekind_sum_sawtooth(a, c),
                    "a = {a}, c = {c}"
                );
            }
        }
    }

    #[test]
    fn negative_and_shifted_arguments() {
        // periodicity in a, and oddness s(-a, c) = -s(a, c)
        assert_eq!(dedekind_sum(5 + 12, 12), dedekind_sum(5, 12));
        assert_eq!(dedekind_sum(-5, 12), -dedekind_sum(5, 12));
    }

    #[test]
    fn reciprocity_exact_up_to_fifty() {
        for c in 1..=50i64 {
            for a in 1..=50i64 {
                if super::gcd(a, c) != 1 {
                    continue;
                }
                let lhs = dedekind_sum(a, c) + dedekind_sum(c, a);
                let rhs = (Rational::from((a, c)) + Rational::from((c, a)) + Rational::from((1, a * c)))
                    / 12
                    - Rational::from((1, 4));
                assert_eq!(lhs, rhs, "a = {a}, c = {c}");
            }
        }
    }
}
