//! Prime-power and zero atomic measures, their mollified densities, the
//! main densities m and n and the fluctuations a and b.

mod sieve;

use rayon::prelude::*;
use serde::Serialize;

pub use sieve::{prime_powers_up_to, primes_up_to};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, GriddedDensity};
use crate::kernels::{Kernel, KernelFamily};
use crate::quadrature::{Adaptive, GaussLegendre};
use crate::scalar::Real;
use crate::special::li_of_exp;
use crate::summation::{pairwise_sum, Neumaier};

/// Largest T accepted by [`prime_power_atoms`] (sieve range e^18 ≈ 6.6e7).
pub const DEFAULT_T_CAP: f64 = 18.0;

/// Weighted atoms at strictly ascending positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicMeasure<F> {
    positions: Vec<F>,
    weights: Vec<F>,
    total_mass: F,
}

impl<F: Real> AtomicMeasure<F> {
    pub fn new(positions: Vec<F>, weights: Vec<F>) -> Result<Self> {
        if positions.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} positions but {} weights",
                positions.len(),
                weights.len()
            )));
        }
        for (i, (&x, &w)) in positions.iter().zip(&weights).enumerate() {
            if !x.is_finite() || !(w > F::zero()) || !w.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "atom {i}: position {x} weight {w} (need finite position, positive weight)"
                )));
            }
            if i > 0 && !(x > positions[i - 1]) {
                return Err(Error::InvalidArgument(format!(
                    "atom {i}: position {x} does not exceed {}",
                    positions[i - 1]
                )));
            }
        }
        let total_mass = pairwise_sum(&weights);
        Ok(Self {
            positions,
            weights,
            total_mass,
        })
    }

    pub fn empty() -> Self {
        Self {
            positions: Vec::new(),
            weights: Vec::new(),
            total_mass: F::zero(),
        }
    }

    pub fn positions(&self) -> &[F] {
        &self.positions
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn total_mass(&self) -> F {
        self.total_mass
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Index range of atoms with position in the open interval (lo, hi).
    pub fn window(&self, lo: F, hi: F) -> std::ops::Range<usize> {
        let a = self.positions.partition_point(|&x| x <= lo);
        let b = self.positions.partition_point(|&x| x < hi);
        a..b.max(a)
    }

    /// Total weight of atoms in [lo, hi].
    pub fn mass_in(&self, lo: F, hi: F) -> F {
        let a = self.positions.partition_point(|&x| x < lo);
        let b = self.positions.partition_point(|&x| x <= hi);
        if b <= a {
            return F::zero();
        }
        pairwise_sum(&self.weights[a..b])
    }

    pub fn first(&self) -> Option<F> {
        self.positions.first().copied()
    }

    pub fn last(&self) -> Option<F> {
        self.positions.last().copied()
    }
}

/// Largest integer N with log N <= t.
fn exp_floor(t: f64) -> u64 {
    let mut n = t.exp().floor() as u64;
    while n > 1 && (n as f64).ln() > t {
        n -= 1;
    }
    while ((n + 1) as f64).ln() <= t {
        n += 1;
    }
    n
}

/// Atoms at log p^k with weight 1/k for every prime power p^k <= e^T.
pub fn prime_power_atoms<F: Real>(t: F) -> Result<AtomicMeasure<F>> {
    prime_power_atoms_capped(t, F::of(DEFAULT_T_CAP))
}

pub fn prime_power_atoms_capped<F: Real>(t: F, t_cap: F) -> Result<AtomicMeasure<F>> {
    if !(t > F::zero()) || !t.is_finite() {
        return Err(crate::error::invalid("T", format!("must be positive, got {t}")));
    }
    if t > t_cap {
        return Err(Error::ResourceLimit(format!(
            "T = {t} exceeds the sieve cap {t_cap} (e^T = {:.3e}); raise the cap explicitly",
            t.to_f64_lossy().exp()
        )));
    }
    let limit = exp_floor(t.to_f64_lossy());
    let powers = prime_powers_up_to(limit);
    let positions: Vec<F> = powers.iter().map(|&(q, _)| F::of((q as f64).ln())).collect();
    let weights: Vec<F> = powers.iter().map(|&(_, k)| F::one() / F::of(k as f64)).collect();
    AtomicMeasure::new(positions, weights).map_err(|e| {
        Error::Numerical(format!("prime-power positions not representable at this precision: {e}"))
    })
}

fn mollifier_radius<F: Real>(theta: &Kernel<F>) -> Result<F> {
    if theta.family() != KernelFamily::Mollifier {
        return Err(Error::InvalidArgument(format!("expected a mollifier, got {}", theta.family())));
    }
    Ok(theta.time_half_support().expect("mollifier has compact support"))
}

/// (meas ∗ θ)(t) by direct summation over the atoms within Δ of t, in
/// ascending order.
pub fn smoothed_value<F: Real>(meas: &AtomicMeasure<F>, theta: &Kernel<F>, delta: F, t: F) -> F {
    let r = meas.window(t - delta, t + delta);
    let mut acc = Neumaier::new();
    for i in r {
        acc.add(meas.weights[i] * theta.time_eval(t - meas.positions[i]));
    }
    acc.value()
}

/// Mollified density of `meas` sampled on `grid`.
///
/// Requires spacing <= Δ/8 and a grid reaching Δ beyond the outermost atoms.
/// The trapezoid mass then matches the atomic mass to about θ̂(2π/h); at the
/// default spacing Δ/64 this is below 1e-9 relative.
pub fn smooth_measure<F: Real>(
    meas: &AtomicMeasure<F>,
    theta: &Kernel<F>,
    grid: &GridSpec<F>,
) -> Result<GriddedDensity<F>> {
    let delta = mollifier_radius(theta)?;
    let h = grid.spacing();
    if h > delta / F::of(8.0) * (F::one() + F::of(1e-12)) {
        return Err(Error::GridResolution(format!(
            "grid spacing {h:e} exceeds Δ/8 = {:e}",
            delta / F::of(8.0)
        )));
    }
    if let (Some(a), Some(b)) = (meas.first(), meas.last()) {
        let slack = |x: F| F::of(1e-12) * x.abs().max(F::one());
        if grid.lo > a - delta + slack(a) || grid.hi < b + delta - slack(b) {
            return Err(Error::GridResolution(format!(
                "grid [{}, {}] does not pad the atoms [{a}, {b}] by Δ = {delta}",
                grid.lo, grid.hi
            )));
        }
    }
    let values: Vec<F> = (0..grid.n)
        .into_par_iter()
        .map(|i| smoothed_value(meas, theta, delta, grid.node(i)))
        .collect();
    GriddedDensity::new(*grid, values)
}

/// m(t) = e^t/t.
pub fn main_m<F: Real>(t: F) -> F {
    t.exp() / t
}

/// n(γ) = max(0, (2π)^{−1} log(|γ|/2π)), even in γ.
pub fn main_n<F: Real>(gamma: F) -> F {
    let v = (gamma.abs() / F::two_pi()).ln() / F::two_pi();
    v.max(F::zero())
}

/// The main densities at scale (T, Ω) with their exact integrals.
#[derive(Debug, Clone, Copy)]
pub struct MainDensities<F> {
    pub t: F,
    pub omega: F,
}

pub fn main_densities<F: Real>(t: F, omega: F) -> MainDensities<F> {
    MainDensities { t, omega }
}

impl<F: Real> MainDensities<F> {
    pub fn m(&self, t: F) -> F {
        main_m(t)
    }

    pub fn n(&self, gamma: F) -> F {
        main_n(gamma)
    }

    /// ∫_{log 2}^{T} m = li(e^T) − li(2).
    pub fn m_integral(&self) -> Result<F> {
        Ok(li_of_exp(self.t)? - li_of_exp(F::LN_2())?)
    }

    /// ∫_{2π≤|γ|≤Ω} n = π^{−1}(Ω log(Ω/2π) − Ω + 2π), zero for Ω <= 2π.
    pub fn n_integral(&self) -> F {
        let tp = F::two_pi();
        if self.omega <= tp {
            return F::zero();
        }
        (self.omega * (self.omega / tp).ln() - self.omega + tp) / F::PI()
    }
}

/// Pointwise `density − main` on their common grid.
pub fn fluctuations<F: Real>(density: &GriddedDensity<F>, main: &GriddedDensity<F>) -> Result<GriddedDensity<F>> {
    if !density.same_grid(main) {
        return Err(Error::InvalidArgument(format!(
            "grid mismatch: {:?} vs {:?}",
            density.grid, main.grid
        )));
    }
    let values = density.values.iter().zip(&main.values).map(|(&d, &m)| d - m).collect();
    GriddedDensity::new(density.grid, values)
}

/// [`fluctuations`] against a main density given as a function.
pub fn fluctuations_from<F: Real>(density: &GriddedDensity<F>, main: impl Fn(F) -> F) -> Result<GriddedDensity<F>> {
    fluctuations(density, &GriddedDensity::sample(density.grid, main))
}

/// L¹ sizes of the fluctuations and their ratios to the bound shapes
/// T^α e^T e^{−√T}/T and T^α log T (unit constants).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationReport {
    pub a_l1: f64,
    pub b_l1: f64,
    pub lemma1_ratio_a: f64,
    pub lemma1_ratio_b: f64,
    /// ‖a‖₁ over the whole padded grid, spill beyond [log 2, T] included.
    pub a_l1_full: f64,
}

pub fn fluctuation_report<F: Real>(
    a: &GriddedDensity<F>,
    b: &GriddedDensity<F>,
    t: F,
    omega: F,
    alpha: F,
) -> FluctuationReport {
    let a_l1 = a.l1_norm_on(F::LN_2(), t).to_f64_lossy();
    let b_l1 = b.l1_norm_on(-omega, omega).to_f64_lossy();
    let (tf, af) = (t.to_f64_lossy(), alpha.to_f64_lossy());
    let shape_a = tf.powf(af) * (tf - tf.sqrt()).exp() / tf;
    let shape_b = tf.powf(af) * tf.ln();
    let ratio = |v: f64, s: f64| if s > 0.0 { v / s } else { f64::INFINITY };
    FluctuationReport {
        a_l1,
        b_l1,
        lemma1_ratio_a: ratio(a_l1, shape_a),
        lemma1_ratio_b: ratio(b_l1, shape_b),
        a_l1_full: a.l1_norm().to_f64_lossy(),
    }
}

/// Comparison of the fluctuation a computed two ways on [log 2, T].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoRouteReport {
    /// ‖route₁ − route₂‖₁ / ‖route₁‖₁.
    pub relative_l1: f64,
    /// ‖route₁‖₁.
    pub l1: f64,
    /// ‖(ν − m) − (G∗θ)'‖₁ = ‖m − m∗θ‖₁: the smoothing defect of the main term.
    pub literal_discrepancy_l1: f64,
}

/// Checks (G∗θ_Δ)' against ν − m∗θ_Δ, where G(t) = J(e^t) − li(e^t).
///
/// Route 1 sums the mollified atoms and subtracts m∗θ. Route 2 integrates the
/// step function J(e^s) against θ'(t−s) piece by piece between atoms and
/// subtracts ∫ li(e^{t−u}) θ'(u) du. Both are evaluated on the nodes of
/// `grid` lying in [log 2, T].
pub fn a_two_routes<F: Real>(
    atoms: &AtomicMeasure<F>,
    theta: &Kernel<F>,
    grid: &GridSpec<F>,
    t_max: F,
) -> Result<TwoRouteReport> {
    let delta = mollifier_radius(theta)?;
    let lo = F::LN_2();
    if lo - delta <= F::zero() {
        return Err(Error::InvalidArgument("Δ must be below log 2 so that li(e^s) stays regular".into()));
    }
    let nodes: Vec<F> = grid.nodes().filter(|&x| x >= lo && x <= t_max).collect();
    if nodes.len() < 2 {
        return Err(Error::InvalidArgument("grid has fewer than two nodes in [log 2, T]".into()));
    }
    let rule = GaussLegendre::<F>::new(32);
    let panels = 8;
    let piece = Adaptive::new(F::of(1e-15), F::of(1e-12));
    let dtheta = |u: F| theta.mollifier_derivative(u).unwrap_or_else(F::zero);

    let rows: Vec<Result<(F, F, F)>> = nodes
        .par_iter()
        .map(|&t| {
            let nu = smoothed_value(atoms, theta, delta, t);
            let m_conv = rule.composite(|u| main_m(t - u) * theta.time_eval(u), -delta, delta, panels);
            let route1 = nu - m_conv;

            // ∫ J(e^s) θ'(t−s) ds over the window, J measured from its value at t−Δ
            let win = atoms.window(t - delta, t + delta);
            let mut breaks = vec![t - delta];
            breaks.extend_from_slice(&atoms.positions[win.clone()]);
            breaks.push(t + delta);
            let mut acc = Neumaier::new();
            let mut level = F::zero();
            for (j, w) in breaks.windows(2).enumerate() {
                if j > 0 {
                    level = level + atoms.weights[win.start + j - 1];
                }
                if level == F::zero() || w[1] <= w[0] {
                    continue;
                }
                let v = piece.integrate(|s| dtheta(t - s), w[0], w[1])?.value;
                acc.add(level * v);
            }
            let li_part = rule.composite(
                |u| li_of_exp(t - u).unwrap_or_else(|_| F::nan()) * dtheta(u),
                -delta,
                delta,
                panels,
            );
            let route2 = acc.value() - li_part;
            if !route2.is_finite() {
                return Err(Error::Numerical(format!("route 2 not finite at t = {t}")));
            }
            Ok((route1, route2, nu - main_m(t)))
        })
        .collect();
    let rows: Vec<(F, F, F)> = rows.into_iter().collect::<Result<_>>()?;

    let h = grid.spacing();
    let trap = |g: &dyn Fn(&(F, F, F)) -> F| {
        let n = rows.len();
        let terms: Vec<F> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| if i == 0 || i + 1 == n { g(r) / F::of(2.0) } else { g(r) })
            .collect();
        (h * pairwise_sum(&terms)).to_f64_lossy()
    };
    let l1 = trap(&|r| r.0.abs());
    let diff = trap(&|r| (r.0 - r.1).abs());
    let literal = trap(&|r| (r.2 - r.1).abs());
    Ok(TwoRouteReport {
        relative_l1: if l1 > 0.0 { diff / l1 } else { diff },
        l1,
        literal_discrepancy_l1: literal,
    })
}

#[cfg(test)]
mod tests;
