//! Quadrature oracle for the transform pair of a kernel.

use super::Kernel;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::quadrature::Adaptive;
use crate::scalar::Real;

fn oracle<F: Real>() -> Adaptive<F> {
    Adaptive::new(F::of(1e-14), F::of(1e-13)).with_initial_panels(4)
}

fn breaks<F: Real>(support: F, kinks: &[F]) -> Vec<F> {
    let mut b = vec![F::zero()];
    b.extend(kinks.iter().copied().filter(|&k| k > F::zero() && k < support));
    b.push(support);
    b
}

fn cosine_integral<F: Real>(g: impl Fn(F) -> F, freq: F, support: F, kinks: &[F]) -> Result<F> {
    let b = breaks(support, kinks);
    let mut total = F::zero();
    for w in b.windows(2) {
        let q = oracle().for_frequency(freq, w[0], w[1]);
        total = total + q.integrate(|x| g(x) * (freq * x).cos(), w[0], w[1])?.value;
    }
    Ok(total)
}

/// 2∫₀^R k(t) cos(ξt) dt. For compactly supported kernels pass `None` to
/// integrate over the declared support.
pub fn forward_transform<F: Real>(k: &Kernel<F>, xi: F, radius: Option<F>) -> Result<F> {
    let r = radius
        .or_else(|| k.time_half_support())
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no compact time support", k.family())))?;
    Ok(F::of(2.0) * cosine_integral(|t| k.time_eval(t), xi, r, &k.time_kinks())?)
}

/// π^{−1}∫₀^R k̂(ξ) cos(ξt) dξ, by default over the declared frequency support.
pub fn inverse_transform<F: Real>(k: &Kernel<F>, t: F, radius: Option<F>) -> Result<F> {
    let r = radius
        .or_else(|| k.freq_half_support())
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no compact frequency support", k.family())))?;
    Ok(cosine_integral(|x| k.freq_eval(x), t, r, &[])? / F::PI())
}

/// Maximum transform-pair residual over the sample grid.
///
/// Kernels with compact time support are checked forward (sample points are
/// frequencies), band-limited kernels inversely (sample points are times).
/// The grid must resolve the transform it probes: its spacing may not exceed
/// π/(2s) where s is the compact-side half support.
pub fn numeric_ft_check<F: Real>(k: &Kernel<F>, grid: &GridSpec<F>) -> Result<F> {
    let (support, forward) = match (k.time_half_support(), k.freq_half_support()) {
        (Some(s), _) => (s, true),
        (None, Some(s)) => (s, false),
        (None, None) => {
            return Err(Error::InvalidArgument(format!(
                "{} has neither side compactly supported",
                k.family()
            )))
        }
    };
    let limit = F::PI() / (F::of(2.0) * support);
    if grid.spacing() > limit {
        return Err(Error::GridResolution(format!(
            "sample spacing {:e} exceeds {:e} for a {} kernel of half support {:e}",
            grid.spacing(),
            limit,
            k.family(),
            support
        )));
    }
    let mut worst = F::zero();
    for x in grid.nodes() {
        let r = if forward {
            (forward_transform(k, x, None)? - k.freq_eval(x)).abs()
        } else {
            (inverse_transform(k, x, None)? - k.time_eval(x)).abs()
        };
        if !r.is_finite() {
            return Err(Error::Numerical(format!("non-finite residual at {x:e}")));
        }
        worst = worst.max(r);
    }
    Ok(worst)
}
