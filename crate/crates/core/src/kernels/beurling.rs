//! Beurling's entire majorant of sgn(x) and the Selberg interval majorant.

use crate::scalar::Real;
use crate::special::trigamma;

#[inline]
fn sinc_pi<F: Real>(x: F) -> F {
    crate::special::sinc(F::PI() * x)
}

/// Beurling's function
/// B(z) = (sin πz / π)² [ Σ_{n≥0} (z−n)^{-2} − Σ_{n≥1} (z+n)^{-2} + 2/z ].
///
/// The two partial-fraction series are summed in closed form through the
/// trigamma function (its asymptotic tail is the truncation), and the two
/// poles adjacent to z are folded into `sinc²` terms so that values near the
/// integers do not cancel.
pub fn beurling<F: Real>(z: F) -> F {
    if z < F::zero() {
        // B = H + K with H odd and K = sinc²(πz) even.
        let k = sinc_pi(z);
        return F::of(2.0) * k * k - beurling_nonneg(-z);
    }
    beurling_nonneg(z)
}

fn beurling_nonneg<F: Real>(z: F) -> F {
    let fl = z.floor();
    let fr = z - fl;
    let sin_fr = (F::PI() * fr).sin();
    let s2 = sin_fr * sin_fr / (F::PI() * F::PI());

    let near_lo = sinc_pi(fr);
    let near_hi = sinc_pi(F::one() - fr);
    let poles = near_lo * near_lo + near_hi * near_hi;

    let rest = trigamma(F::one() + fr) + trigamma(F::of(2.0) - fr) - F::of(2.0) * trigamma(z + F::one());

    let origin = if z < F::one() {
        // 2 s²/z with s = sin(πz)/π, written as 2 s · sinc(πz)
        F::of(2.0) * (sin_fr / F::PI()) * sinc_pi(z)
    } else {
        F::of(2.0) * s2 / z
    };
    s2 * rest + origin + poles
}

/// Selberg majorant of the indicator of [−T, T] with exponential type 2πδ:
/// ½ [B(δ(x+T)) + B(δ(T−x))].
pub fn selberg_majorant<F: Real>(x: F, half_width: F, delta: F) -> F {
    let a = beurling(delta * (x + half_width));
    let b = beurling(delta * (half_width - x));
    (a + b) / F::of(2.0)
}

/// Fourier transform of the Selberg majorant,
/// (1/δ)[K̂(ξ/δ) cos(ξT) + G(ξ/δ) sin(ξT)], with K̂(ω) = (1 − |ω|/2π)₊ and
/// G(ω) = sgn(ω)[(1−τ) cot(πτ) + 1/π], τ = |ω|/2π < 1, the sine transform of
/// the odd part of B.
pub fn selberg_majorant_transform<F: Real>(xi: F, half_width: F, delta: F) -> F {
    let two_pi = F::two_pi();
    let xi = xi.abs();
    let tau = xi / (delta * two_pi);
    if tau >= F::one() {
        return F::zero();
    }
    if xi == F::zero() {
        return F::one() / delta + F::of(2.0) * half_width;
    }
    let khat = F::one() - tau;
    let pt = F::PI() * tau;
    let s = (xi * half_width).sin();
    let odd = (F::one() - tau) * pt.cos() * s / pt.sin() + s / F::PI();
    (khat * (xi * half_width).cos() + odd) / delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beurling_majorizes_sign() {
        for k in -4000..=4000 {
            let z = k as f64 * 0.01 + 0.003;
            let b = beurling(z);
            let sgn = if z > 0.0 { 1.0 } else { -1.0 };
            assert!(b - sgn >= -1e-12, "z={z}: B={b}");
        }
        assert!((beurling(0.0f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beurling_interpolates_sign_at_integers() {
        for n in 1..30 {
            assert!((beurling(n as f64) - 1.0).abs() < 1e-13);
            assert!((beurling(-(n as f64)) + 1.0).abs() < 1e-13);
        }
        // near-integer arguments stay smooth
        let a = beurling(5.0 - 1e-9f64);
        let b = beurling(5.0 + 1e-9f64);
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn beurling_matches_direct_partial_fractions() {
        // brute-force partial sums with an explicit tail bound
        let direct = |z: f64| {
            let mut s = 2.0 / z;
            for n in 0..2_000_000 {
                let nf = n as f64;
                s += 1.0 / ((z - nf) * (z - nf));
                if n > 0 {
                    s -= 1.0 / ((z + nf) * (z + nf));
                }
            }
            let sp = (std::f64::consts::PI * z).sin() / std::f64::consts::PI;
            sp * sp * s
        };
        for z in [0.37, 1.5, 2.25, 7.8, -0.6, -3.3] {
            assert!((beurling(z) - direct(z)).abs() < 1e-9, "z={z}");
        }
    }

    #[test]
    fn excess_integral_of_beurling_is_one() {
        // ∫ (B − sgn) = 1: integrate on [-R, R] plus the 1/x² tail estimate
        let q = crate::quadrature::Adaptive::<f64>::new(1e-13, 1e-12).with_initial_panels(800);
        let r = 400.0;
        let v = q
            .integrate(|x: f64| beurling(x) - if x > 0.0 { 1.0 } else { -1.0 }, -r, r)
            .unwrap()
            .value;
        // B − sgn ~ sin²(πx)/(π²x²) on each tail, of mean 1/(2π²x²)
        let tail = 1.0 / (std::f64::consts::PI.powi(2) * r);
        assert!((v + tail - 1.0).abs() < 1e-5, "{v}");
    }
}
