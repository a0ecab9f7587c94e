//! Special functions used by the kernels, the measures and the zero locator.

use num_complex::Complex;

use crate::error::Result;
use crate::quadrature::tanh_sinh;
use crate::scalar::Real;

/// Below this |x|, `sin x / x` is evaluated by its Taylor series.
pub const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// sin(x)/x with the removable singularity filled in.
#[inline]
pub fn sinc<F: Real>(x: F) -> F {
    if x.abs() < F::of(SINC_SERIES_CUTOFF) {
        let x2 = x * x;
        F::one() - x2 / F::of(6.0) + x2 * x2 / F::of(120.0)
    } else {
        x.sin() / x
    }
}

/// Even Bernoulli numbers B_2, B_4, ..., B_40.
pub const BERNOULLI_EVEN: [f64; 20] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
    2577687858367.0 / 6.0,
    -26315271553053477373.0 / 1919190.0,
    2929993913841559.0 / 6.0,
    -261082718496449122051.0 / 13530.0,
];

/// Trigamma ψ₁(x) = Σ_{k≥0} (x+k)^{-2} for x > 0, by upward recurrence to
/// x ≥ 12 followed by the Euler–Maclaurin tail.
pub fn trigamma<F: Real>(x: F) -> F {
    debug_assert!(x > F::zero());
    let mut acc = F::zero();
    let mut y = x;
    let twelve = F::of(12.0);
    while y < twelve {
        acc = acc + F::one() / (y * y);
        y = y + F::one();
    }
    let inv = F::one() / y;
    let inv2 = inv * inv;
    // 1/y + 1/(2y²) + Σ B_{2k} / y^{2k+1}
    let mut tail = F::zero();
    let mut p = inv * inv2;
    for b in BERNOULLI_EVEN.iter().take(8) {
        tail = tail + F::of(*b) * p;
        p = p * inv2;
    }
    acc + inv + inv2 / F::of(2.0) + tail
}

/// π/2 − Si(x) for x ≥ 0, computed without cancellation for large x.
pub fn si_complement<F: Real>(x: F) -> F {
    let x = x.abs();
    if x <= F::of(4.0) {
        return F::FRAC_PI_2() - sine_integral_series(x);
    }
    // Continued fraction for E1(ix); Im E1(ix) = Si(x) − π/2.
    let one = Complex::new(F::one(), F::zero());
    let fpmin = F::min_positive_value() / F::epsilon();
    let mut b = Complex::new(F::one(), x);
    let mut c = Complex::new(F::one() / fpmin, F::zero());
    let mut d = one / b;
    let mut h = d;
    for i in 2..200usize {
        let a = -F::of_usize((i - 1) * (i - 1));
        b = b + Complex::new(F::of(2.0), F::zero());
        d = one / (d * a + b);
        c = b + one * a / c;
        let del = c * d;
        h = h * del;
        if (del.re - F::one()).abs() + del.im.abs() < F::epsilon() {
            break;
        }
    }
    let phase = Complex::new(x.cos(), -x.sin());
    let e1 = h * phase;
    -e1.im
}

fn sine_integral_series<F: Real>(x: F) -> F {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for k in 1..60usize {
        let kf = F::of_usize(k);
        term = -term * x2 / ((F::of(2.0) * kf) * (F::of(2.0) * kf + F::one()));
        let add = term / (F::of(2.0) * kf + F::one());
        sum = sum + add;
        if add.abs() < F::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// Sine integral Si(x).
pub fn sine_integral<F: Real>(x: F) -> F {
    let s = if x.abs() <= F::of(4.0) {
        sine_integral_series(x.abs())
    } else {
        F::FRAC_PI_2() - si_complement(x)
    };
    if x < F::zero() {
        -s
    } else {
        s
    }
}

/// ∫_R^∞ cos(ω u) / u² du for R > 0.
pub fn cos_over_square_tail<F: Real>(omega: F, r: F) -> F {
    let w = omega.abs();
    if w == F::zero() {
        return F::one() / r;
    }
    (w * r).cos() / r - w * si_complement(w * r)
}

/// Exponential integral Ei(t) for real t ≠ 0, via
/// Ei(t) = γ + ln|t| + ∫_0^t (e^v − 1)/v dv with tanh-sinh quadrature.
pub fn exp_integral_ei<F: Real>(t: F, tol: F) -> Result<F> {
    let euler = F::of(0.577_215_664_901_532_9);
    let g = |v: F| {
        if v == F::zero() {
            F::one()
        } else {
            v.exp_m1() / v
        }
    };
    let integral = tanh_sinh(g, F::zero(), t, tol)?;
    Ok(euler + t.abs().ln() + integral)
}

/// Logarithmic integral li(e^t) = Ei(t) (principal value at u = 1).
pub fn li_of_exp<F: Real>(t: F) -> Result<F> {
    exp_integral_ei(t, F::of(1e-13))
}

/// Principal-branch log Γ(z) for Re z > 0, by recurrence to Re z ≥ 15 and
/// the Stirling series.
pub fn ln_gamma_complex<F: Real>(z: Complex<F>) -> Complex<F> {
    let mut shift = Complex::new(F::zero(), F::zero());
    let mut w = z;
    let fifteen = F::of(15.0);
    while w.re < fifteen {
        shift = shift + w.ln();
        w = w + F::one();
    }
    let half = F::of(0.5);
    let ln2pi = F::of((2.0 * std::f64::consts::PI).ln());
    let mut s = (w - half) * w.ln() - w + ln2pi * half;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut p = inv;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let n = F::of_usize(2 * k + 2);
        s = s + p * (F::of(*b) / (n * (n - F::one())));
        p = p * inv2;
    }
    s - shift
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_is_continuous_through_series_cutoff() {
        for x in [0.5e-4f64, 0.99e-4, 1.01e-4] {
            assert!((sinc(x) - x.sin() / x).abs() < 1e-15);
        }
        assert_eq!(sinc(0.0f64), 1.0);
    }

    #[test]
    fn trigamma_known_values() {
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((trigamma(1.0f64) - pi2_6).abs() < 1e-14);
        assert!((trigamma(0.5f64) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-13);
        // recurrence ψ₁(x) = ψ₁(x+1) + 1/x²
        let x = 3.7f64;
        assert!((trigamma(x) - trigamma(x + 1.0) - 1.0 / (x * x)).abs() < 1e-15);
    }

    #[test]
    fn sine_integral_values() {
        assert!((sine_integral(1.0f64) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((sine_integral(10.0f64) - 1.658_347_594_218_874).abs() < 1e-13);
        assert!((sine_integral(100.0f64) - 1.562_225_466_889_056).abs() < 1e-13);
        // continuity across the series / continued-fraction switch
        assert!((sine_integral(4.0 - 1e-12f64) - sine_integral(4.0 + 1e-12f64)).abs() < 1e-11);
    }

    #[test]
    fn cosine_tail_matches_quadrature() {
        let q = crate::quadrature::Adaptive::<f64>::new(1e-15, 1e-14).for_frequency(3.0, 2.0, 2000.0);
        let direct = q.integrate(|u| (3.0 * u).cos() / (u * u), 2.0, 2000.0).unwrap().value;
        let tail = cos_over_square_tail(3.0, 2.0) - cos_over_square_tail(3.0, 2000.0);
        assert!((direct - tail).abs() < 1e-13, "{direct} {tail}");
    }

    #[test]
    fn li_values() {
        // li(10) = 6.1655995047872979
        let v = li_of_exp(10f64.ln()).unwrap();
        assert!((v - 6.165_599_504_787_298).abs() < 1e-12);
        // li(2) = 1.0451637801174928
        let w = li_of_exp(2f64.ln()).unwrap();
        assert!((w - 1.045_163_780_117_492_8).abs() < 1e-13);
    }

    #[test]
    fn ln_gamma_matches_real_values() {
        let v = ln_gamma_complex(Complex::new(0.5f64, 0.0));
        assert!((v.re - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        let w = ln_gamma_complex(Complex::new(5.0f64, 0.0));
        assert!((w.re - 24f64.ln()).abs() < 1e-13);
    }
}
