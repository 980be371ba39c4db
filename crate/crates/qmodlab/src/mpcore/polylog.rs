//! Polylogarithms Li_s for s <= 2, the Rogers dilogarithm, and the
//! Bloch-Wigner function.
//!
//! Branch convention: the principal branch everywhere, except that a value
//! landing exactly on a cut returns the average of the limits from the two
//! sides. For the logarithm on the negative reals the average is just the
//! real part; for Li_2 on (1, infinity) it is pi^2/3 - log(x)^2/2 - Li_2(1/x).

use rug::ops::{CompleteRound, Pow};
use rug::{Complex, Float, Integer};

use super::special::bernoulli_number;
use super::PrecCtx;

/// Principal log with the cut-average convention on the negative real axis.
pub fn log_cut_avg(z: &Complex, ctx: &PrecCtx) -> Complex {
    if z.imag().is_zero() && z.real().is_sign_negative() && !z.real().is_zero() {
        let mag = z.real().clone().abs().ln();
        return ctx.complex_from(mag);
    }
    Complex::with_val(ctx.bits(), z.ln_ref())
}

fn guard(ctx: &PrecCtx) -> PrecCtx {
    PrecCtx::new(ctx.bits() + 64)
}

/// Li_2 by Bernoulli series in u = -log(1-z) after reduction to the region
/// |z| <= 1, Re z <= 1/2, where |u| < 2 pi gives geometric convergence.
pub fn li2(z: &Complex, ctx: &PrecCtx) -> Complex {
    let g = guard(ctx);
    let v = li2_inner(&g.complex_from(z), &g);
    ctx.complex_from(&v)
}

fn li2_inner(z: &Complex, ctx: &PrecCtx) -> Complex {
    let prec = ctx.bits();
    let pi = ctx.pi();
    if z.is_zero() {
        return ctx.complex_zero();
    }
    let one = ctx.complex_from(1);
    if *z == one {
        let v = pi.clone().square() / 6u32;
        return ctx.complex_from(v);
    }
    // cut average on the real interval (1, infinity)
    if z.imag().is_zero() && z.real() > &ctx.float_from(1) {
        let x = z.real();
        let inv = ctx.complex_from(x.clone().recip());
        let li_inv = li2_inner(&inv, ctx);
        let v = ctx.float_from(&pi).square() / 3u32 - x.clone().ln().square() / 2u32
            - li_inv.into_real_imag().0;
        return ctx.complex_from(v);
    }
    let abs = z.clone().abs().into_real_imag().0;
    if abs > ctx.float_from(1) {
        // Li_2(z) = -Li_2(1/z) - pi^2/6 - log(-z)^2/2
        let inv = Complex::with_val(prec, z.recip_ref());
        let li_inv = li2_inner(&inv, ctx);
        let log_neg = log_cut_avg(&(-z).complete((prec, prec)), ctx);
        let pi2_6 = ctx.complex_from(pi.clone().square() / 6u32);
        return -li_inv - pi2_6 - log_neg.square() / 2u32;
    }
    if z.real() > &ctx.float_from(0.5) {
        // Li_2(z) = pi^2/6 - log(z) log(1-z) - Li_2(1-z)
        let omz = (&one - z).complete((prec, prec));
        let li_ref = li2_inner(&omz, ctx);
        let pi2_6 = ctx.complex_from(pi.clone().square() / 6u32);
        return pi2_6 - z.clone().ln() * omz.ln() - li_ref;
    }
    // Bernoulli series: Li_2(z) = sum_{n >= 1} B_{n-1} u^n / n!, u = -log(1-z).
    // The terms decay like (|u| / 2 pi)^n since |B_{n-1}|/n! ~ 2 (2 pi)^{-n},
    // so the stopping test must include the Bernoulli factor.
    let u = -(&one - z).complete((prec, prec)).ln();
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    let mut acc = ctx.complex_zero();
    let mut upow = u.clone();
    let mut fact = ctx.float_from(1);
    let mut n = 1u32;
    loop {
        let b = bernoulli_number((n - 1) as usize);
        if b.cmp0() != std::cmp::Ordering::Equal {
            let term = (&upow / &fact).complete((prec, prec)) * ctx.complex_from(&b);
            let term_mag = term.clone().abs().into_real_imag().0;
            acc += term;
            if n > 4 && term_mag < tol {
                break;
            }
        }
        n += 1;
        upow *= &u;
        fact *= ctx.float_from(n);
        assert!(n < 64 * prec, "Li_2 series failed to converge");
    }
    acc
}

/// Li_s for integer s <= 2 at ctx precision. For s <= 0 this is the
/// rational function N_{-s}(z)/(1-z)^{1-s} with integer numerator
/// polynomials given by N_0 = z, N_{r+1} = z((1-z) N_r' + (r+1) N_r).
pub fn polylog(s: i64, z: &Complex, ctx: &PrecCtx) -> Complex {
    assert!(s <= 2, "only s <= 2 is supported");
    let one = ctx.complex_from(1);
    if s >= 1 {
        assert!(*z != one, "Li_s has a singularity at z = 1 for s >= 1");
    }
    match s {
        2 => li2(z, ctx),
        1 => {
            let prec = ctx.bits();
            -log_cut_avg(&(&one - z).complete((prec, prec)), ctx)
        }
        _ => {
            assert!(*z != one, "pole at z = 1");
            let r = (-s) as usize;
            let g = guard(ctx);
            let zz = g.complex_from(z);
            let mut n_poly: Vec<Integer> = vec![Integer::from(0), Integer::from(1)];
            for k in 0..r {
                let mut next = vec![Integer::from(0); n_poly.len() + 2];
                for (i, c) in n_poly.iter().enumerate() {
                    if i >= 1 {
                        next[i] += Integer::from(c * Integer::from(i as u32));
                        next[i + 1] -= Integer::from(c * Integer::from(i as u32));
                    }
                    next[i + 1] += Integer::from(c * Integer::from(k as u32 + 1));
                }
                while next.len() > 1 && next.last().unwrap().cmp0() == std::cmp::Ordering::Equal {
                    next.pop();
                }
                n_poly = next;
            }
            let mut num = g.complex_zero();
            for c in n_poly.iter().rev() {
                num = num * &zz + g.complex_from(c);
            }
            let den = (g.complex_from(1) - &zz).pow((r + 1) as u32);
            ctx.complex_from(&(num / den))
        }
    }
}

/// Rogers form R(x) = Li_2(x) + log(x) log(1-x)/2 - pi^2/6, principal logs.
pub fn rogers(x: &Complex, ctx: &PrecCtx) -> Complex {
    let prec = ctx.bits();
    let one = ctx.complex_from(1);
    let li = li2(x, ctx);
    let lx = log_cut_avg(x, ctx);
    let l1x = log_cut_avg(&(&one - x).complete((prec, prec)), ctx);
    let pi2_6 = ctx.complex_from(ctx.pi().square() / 6u32);
    li + lx * l1x / 2u32 - pi2_6
}

/// Bloch-Wigner D(z) = Im Li_2(z) + arg(1-z) log|z|; vanishes on the reals.
pub fn bloch_wigner(z: &Complex, ctx: &PrecCtx) -> Float {
    if z.imag().is_zero() {
        return ctx.float_zero();
    }
    let li = li2(z, ctx);
    let omz = ctx.complex_from(1) - z;
    let arg = omz.arg().into_real_imag().0;
    let logabs = z.clone().abs().into_real_imag().0.ln();
    li.into_real_imag().1 + arg * logabs
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn ctx() -> PrecCtx {
        PrecCtx::new(256)
    }

    #[test]
    fn li0_is_geometric() {
        let c = ctx();
        for (re, im) in [(0.3, 0.4), (-1.5, 2.0), (0.0, -0.7)] {
            let z = c.complex_from((c.float_from(re), c.float_from(im)));
            let got = polylog(0, &z, &c);
            let expect = z.clone() / (c.complex_from(1) - &z);
            let d = (got - expect).abs().into_real_imag().0;
            assert!(d < c.float_from(1e-70));
        }
    }

    #[test]
    fn li1_at_half_is_log2() {
        let c = ctx();
        let got = polylog(1, &c.complex_from(0.5), &c);
        let expect = c.float_from(2).ln();
        let d = (got - c.complex_from(expect)).abs().into_real_imag().0;
        assert!(d < c.float_from(1e-70));
    }

    #[test]
    fn li2_at_special_points() {
        let c = ctx();
        let pi2 = c.pi().square();
        let tol = c.float_from(1e-70);
        // Li_2(1) = pi^2/6
        let d = (li2(&c.complex_from(1), &c) - c.complex_from(&pi2) / 6u32).abs();
        assert!(d.into_real_imag().0 < tol);
        // Li_2(-1) = -pi^2/12
        let d = (li2(&c.complex_from(-1), &c) + c.complex_from(&pi2) / 12u32).abs();
        assert!(d.into_real_imag().0 < tol);
        // Li_2(1/2) = pi^2/12 - log(2)^2/2
        let expect = c.float_from(&pi2) / 12u32 - c.float_from(2).ln().square() / 2u32;
        let d = (li2(&c.complex_from(0.5), &c) - c.complex_from(expect)).abs();
        assert!(d.into_real_imag().0 < tol);
        // cut average at x = 2: pi^2/4, purely real
        let v = li2(&c.complex_from(2), &c);
        assert!(v.imag().is_zero());
        let d = (v.into_real_imag().0 - c.float_from(&pi2) / 4u32).abs();
        assert!(d < tol);
    }

    #[test]
    fn li2_inversion_identity() {
        let c = ctx();
        let z = c.complex_from((c.float_from(0.3), c.float_from(1.7)));
        let lhs = li2(&z, &c) + li2(&Complex::with_val(256, z.recip_ref()), &c);
        let log_neg = (-z).ln();
        let rhs = -c.complex_from(c.pi().square() / 6u32) - log_neg.square() / 2u32;
        let d = (lhs - rhs).abs().into_real_imag().0;
        assert!(d < c.float_from(1e-70));
    }

    #[test]
    fn li2_derivative_finite_difference() {
        let c = ctx();
        let z = c.complex_from((c.float_from(-0.4), c.float_from(0.9)));
        let h = c.complex_from(Float::with_val(256, Float::i_exp(1, -80)));
        let num = (li2(&(&z + &h).complete((256, 256)), &c) - li2(&(&z - &h).complete((256, 256)), &c))
            / (h.clone() * 2u32);
        let expect = -(c.complex_from(1) - &z).ln() / z.clone();
        let rel = (num - expect.clone()).abs().into_real_imag().0
            / expect.abs().into_real_imag().0;
        // finite differencing costs half the working precision
        assert!(rel < c.float_from(2.0f64).pow(-(128i32)));
    }

    #[test]
    fn rogers_at_half() {
        let c = ctx();
        let r = rogers(&c.complex_from(0.5), &c);
        let expect = -(c.pi().square() / 12u32);
        let d = (r - c.complex_from(expect)).abs().into_real_imag().0;
        assert!(d < c.float_from(1e-70));
    }

    #[test]
    fn bloch_wigner_vanishes_on_reals_and_hits_volume() {
        let c = ctx();
        assert!(bloch_wigner(&c.complex_from(0.7), &c).is_zero());
        // 2 D(e(1/6)) is the figure-eight volume
        let z = c.e_of(&Rational::from((1, 6)));
        let v = bloch_wigner(&z, &c) * 2u32;
        let expect = c.float_str("2.029883212819307250042405108549040571883378615060");
        assert!((v - expect).abs() < c.float_from(1e-35));
    }

    #[test]
    fn negative_index_polylogs_at_sixth_root_match_cot_table() {
        // 2 Im(i^{-r} Li_{-r}(e(1/6))) reproduces the exact cotangent
        // coefficients, tying the numeric and exact paths together
        let c = ctx();
        let z = c.e_of(&Rational::from((1, 6)));
        let cots = super::super::special::cot_coeffs(5);
        for (r, cr) in cots.iter().enumerate() {
            let li = polylog(-(r as i64), &z, &c);
            let i_pow = c.e_of(&Rational::from((-(r as i64), 4)));
            let val = (i_pow * li).mul_i(false);
            let got = -(val.into_real_imag().0 * 2u32);
            let d = (got - cr.to_float(&c)).abs();
            assert!(d < c.float_from(1e-60), "r = {r}");
        }
    }
}
