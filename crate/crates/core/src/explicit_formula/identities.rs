//! Numerical checks of the Fejér and cosine-pairing identities, and the
//! norm report of a bundle.

use rayon::prelude::*;
use serde::Serialize;

use super::{composite_nodes, pair_measure, ProbeBundle};
use crate::error::Result;
use crate::kernels::{make_fejer, Kernel};
use crate::measures::AtomicMeasure;
use crate::quadrature::Adaptive;
use crate::scalar::Real;
use crate::special::cos_over_square_tail;
use crate::summation::{pairwise_sum, Neumaier};

/// max over samples of |1 − F̂_Λ(t)cos(γt) − ∫(1 − cos ξt) F_Λ(γ − ξ) dξ|.
///
/// With u = γ − ξ the odd part cancels and the right side is
/// 2∫₀^∞ (1 − cos γt cos ut) F_Λ(u) du. The range [0, R] is integrated
/// numerically; beyond R, F_Λ(u) = (1 − cos Λu)/(πΛu²) and the tail is a
/// combination of ∫_R^∞ cos(ωu)/u² du.
pub fn check_two_way_fejer<F: Real>(lambda: F, samples: &[(F, F)]) -> Result<F> {
    let fejer = make_fejer(lambda)?;
    let r = F::of(32.0) * F::PI() / lambda;
    let half = F::of(0.5);
    let residuals: Vec<Result<F>> = samples
        .par_iter()
        .map(|&(gamma, t)| {
            let c = (gamma * t).cos();
            let lhs = F::one() - fejer.freq_eval(t) * c;
            let q = Adaptive::new(F::of(1e-15), F::of(1e-14)).for_frequency(t.abs() + lambda, F::zero(), r);
            let body = q.integrate(|u| (F::one() - c * (u * t).cos()) * fejer.time_eval(u), F::zero(), r)?;
            let tail = |w: F| cos_over_square_tail(w.abs(), r);
            let tails = F::one() / r - tail(lambda)
                - c * (tail(t) - half * tail(t + lambda) - half * tail(t - lambda));
            let rhs = F::of(2.0) * body.value + F::of(2.0) / (F::PI() * lambda) * tails;
            Ok((lhs - rhs).abs())
        })
        .collect();
    let mut worst = F::zero();
    for r in residuals {
        worst = worst.max(r?);
    }
    Ok(worst)
}

/// |∫(∫h(t)cos(ξt)dt) μ(dξ) − ∫ĥ dμ| for μ = meas (∗ θ when given).
///
/// The left side is taken time-first: smoothing by θ multiplies the inner
/// integrand by θ̂(t), so it is Σᵢ wᵢ · 2∫₀^Λ h(t) θ̂(t) cos(ξᵢt) dt on a
/// shared node set. The right side pairs ĥ with the measure.
pub fn check_cosine_pairing<F: Real>(
    bundle: &ProbeBundle<F>,
    meas: &AtomicMeasure<F>,
    theta: Option<&Kernel<F>>,
) -> Result<F> {
    let lam = bundle.lambda;
    let reach = theta.and_then(|k| k.time_half_support()).unwrap_or(F::zero());
    let top = meas
        .positions()
        .iter()
        .fold(F::zero(), |m, &x| m.max(x.abs()))
        + reach;
    let panels = (top * lam / F::PI()).ceil().to_usize().unwrap_or(1) + 4;
    let nodes: Vec<(F, F)> = composite_nodes(lam, &bundle.kinks, panels)
        .into_par_iter()
        .map(|(t, w)| {
            let smooth = theta.map(|k| k.freq_eval(t)).unwrap_or(F::one());
            (t, F::of(2.0) * w * bundle.h(t) * smooth)
        })
        .collect();
    let terms: Vec<F> = meas
        .positions()
        .par_iter()
        .zip(meas.weights().par_iter())
        .map(|(&xi, &w)| {
            let mut acc = Neumaier::new();
            for &(t, c) in &nodes {
                acc.add(c * (xi * t).cos());
            }
            w * acc.value()
        })
        .collect();
    let lhs = pairwise_sum(&terms);
    let rhs = match theta {
        Some(k) => pair_measure(|x| bundle.hhat(x), meas, k, None)?,
        None => {
            let t: Vec<F> = meas
                .positions()
                .par_iter()
                .zip(meas.weights().par_iter())
                .map(|(&x, &w)| w * bundle.hhat(x))
                .collect();
            pairwise_sum(&t)
        }
    };
    Ok((lhs - rhs).abs())
}

/// Measured norms against the shapes ‖h‖₁ ≍ T and ‖ĥ‖₁ ≪ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub h_l1: f64,
    pub hhat_l1: f64,
    pub h_l1_over_t: f64,
    /// 2π h(0) = ∫ĥ; equals ‖ĥ‖₁ when ĥ ≥ 0.
    pub hhat_integral: f64,
    /// |‖ĥ‖₁ − 2πh(0)| / ‖ĥ‖₁ when ĥ ≥ 0.
    pub inversion_gap: Option<f64>,
}

pub fn norm_report<F: Real>(bundle: &ProbeBundle<F>, t: F) -> NormReport {
    let h_l1 = bundle.h_l1.to_f64_lossy();
    let hhat_l1 = bundle.hhat_l1.to_f64_lossy();
    let integral = (F::two_pi() * bundle.h(F::zero())).to_f64_lossy();
    let gap = (bundle.hhat_nonneg && hhat_l1 > 0.0).then(|| (hhat_l1 - integral).abs() / hhat_l1);
    NormReport {
        h_l1,
        hhat_l1,
        h_l1_over_t: h_l1 / t.to_f64_lossy(),
        hhat_integral: integral,
        inversion_gap: gap,
    }
}
