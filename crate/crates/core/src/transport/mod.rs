//! The cost c°(γ,t) = η(t)(1 − cos γt), dual potentials, the R1 bound and
//! an entropic unbalanced transport oracle.

mod sinkhorn;

pub use sinkhorn::{discretize, sinkhorn_matrix, sinkhorn_unbalanced, TransportResult};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::explicit_formula::{pair_with_rule, MollifierRule, ProbeBundle};
use crate::grid::GridSpec;
use crate::kernels::Kernel;
use crate::measures::AtomicMeasure;
use crate::scalar::Real;

/// Default cap on |γ-grid| × |t-grid| per c-transform scan.
pub const DEFAULT_GRID_CAP: usize = 1_000_000_000;
/// Slack below which a margin still counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CostSpec<F> {
    pub eta: Kernel<F>,
}

impl<F: Real> CostSpec<F> {
    pub fn new(eta: Kernel<F>) -> Self {
        Self { eta }
    }

    /// η(t)(1 − cos γt), written as 2η(t)sin²(γt/2) to keep precision near
    /// γt = 0.
    #[inline]
    pub fn eval(&self, gamma: F, t: F) -> F {
        self.eval_with_eta(self.eta.time_eval(t), gamma * t)
    }

    #[inline]
    fn eval_with_eta(&self, eta_t: F, x: F) -> F {
        let s = (x / F::of(2.0)).sin();
        F::of(2.0) * eta_t * s * s
    }
}

/// Potentials φ on a γ-grid and ψ on a t-grid, both ≤ 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialPair<F> {
    pub gamma_grid: GridSpec<F>,
    pub t_grid: GridSpec<F>,
    pub phi: Vec<F>,
    pub psi: Vec<F>,
}

impl<F: Real> PotentialPair<F> {
    pub fn new(gamma_grid: GridSpec<F>, t_grid: GridSpec<F>, phi: Vec<F>, psi: Vec<F>) -> Result<Self> {
        if phi.len() != gamma_grid.n || psi.len() != t_grid.n {
            return Err(Error::InvalidArgument("potential lengths do not match their grids".into()));
        }
        if let Some(v) = phi.iter().chain(&psi).find(|v| !v.is_finite() || **v > F::zero()) {
            return Err(Error::InvalidArgument(format!("potentials must be finite and <= 0 (found {v})")));
        }
        Ok(Self { gamma_grid, t_grid, phi, psi })
    }

    pub fn zero(gamma_grid: GridSpec<F>, t_grid: GridSpec<F>) -> Self {
        Self { phi: vec![F::zero(); gamma_grid.n], psi: vec![F::zero(); t_grid.n], gamma_grid, t_grid }
    }

    pub fn scaled(&self, factor: F) -> Result<Self> {
        Self::new(
            self.gamma_grid,
            self.t_grid,
            self.phi.iter().map(|&v| v * factor).collect(),
            self.psi.iter().map(|&v| v * factor).collect(),
        )
    }

    fn phi_even(&self) -> bool {
        let n = self.gamma_grid.n;
        is_symmetric(&self.gamma_grid) && (0..n / 2).all(|i| self.phi[i] == self.phi[n - 1 - i])
    }
}

fn is_symmetric<F: Real>(g: &GridSpec<F>) -> bool {
    g.lo == -g.hi
}

/// Grids for the potentials: t over [log 2 − Δ, T + Δ] with step
/// ≤ min(Δ/8, π/(8Ω)), γ over [−Ω − Δ, Ω + Δ] with step ≤ 1/(8T) and an odd
/// node count so that γ = 0 is a node. Explicit steps override the defaults.
pub fn potential_grids<F: Real>(
    t: F,
    omega: F,
    delta: F,
    dt: Option<F>,
    dgamma: Option<F>,
) -> Result<(GridSpec<F>, GridSpec<F>)> {
    let dt = dt.unwrap_or_else(|| (delta / F::of(8.0)).min(F::PI() / (F::of(8.0) * omega)));
    let dg = dgamma.unwrap_or_else(|| F::one() / (F::of(8.0) * t));
    let tg = GridSpec::with_max_step(F::LN_2() - delta, t + delta, dt)?;
    let reach = omega + delta;
    let half = (reach / dg).ceil().to_usize().unwrap_or(1).max(1);
    let gg = GridSpec::new(-reach, reach, 2 * half + 1)?;
    Ok((gg, tg))
}

/// min over the grid product of c(γ,t) − φ(γ) − ψ(t).
pub fn feasibility_margin<F: Real>(pair: &PotentialPair<F>, cost: &CostSpec<F>) -> F {
    let eta_t: Vec<F> = pair.t_grid.nodes().map(|t| cost.eta.time_eval(t)).collect();
    let tn: Vec<F> = pair.t_grid.nodes().collect();
    let n = pair.gamma_grid.n;
    let rows = if pair.phi_even() { n / 2 + 1 } else { n };
    (0..rows)
        .into_par_iter()
        .map(|i| {
            let g = pair.gamma_grid.node(i);
            let mut best = F::infinity();
            for j in 0..tn.len() {
                let v = cost.eval_with_eta(eta_t[j], g * tn[j]) - pair.phi[i] - pair.psi[j];
                best = best.min(v);
            }
            best
        })
        .reduce(|| F::infinity(), F::min)
}

fn check_coverage<F: Real>(grid: &GridSpec<F>, meas: &AtomicMeasure<F>, delta: F, side: &str) -> Result<()> {
    if let (Some(a), Some(b)) = (meas.first(), meas.last()) {
        if a - delta < grid.lo || b + delta > grid.hi {
            return Err(Error::Coverage(format!(
                "{side} atoms span [{a}, {b}] ± {delta}, grid covers [{}, {}]",
                grid.lo, grid.hi
            )));
        }
    }
    Ok(())
}

/// −∫φ d(μ∗θ) − ∫ψ d(ν∗θ) with φ, ψ linearly interpolated.
pub fn dual_value<F: Real>(
    pair: &PotentialPair<F>,
    mu: &AtomicMeasure<F>,
    nu: &AtomicMeasure<F>,
    theta: &Kernel<F>,
) -> Result<F> {
    let rule = MollifierRule::new(theta)?;
    check_coverage(&pair.gamma_grid, mu, rule.delta(), "zero")?;
    check_coverage(&pair.t_grid, nu, rule.delta(), "prime")?;
    let phi = |x: F| pair.gamma_grid.interpolate(&pair.phi, x).unwrap_or(F::zero());
    let psi = |x: F| pair.t_grid.interpolate(&pair.psi, x).unwrap_or(F::zero());
    let a = pair_with_rule(&phi, mu, &rule, None)?;
    let b = pair_with_rule(&psi, nu, &rule, None)?;
    Ok(-a - b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct R1Bound {
    pub value: f64,
    pub pair_freq: f64,
    pub pair_time: f64,
    /// S·∫η dν.
    pub eta_mass: f64,
    /// True when ĥ ≥ 0, so the inequality is guaranteed.
    pub guaranteed: bool,
}

/// ∫ĥ dμ − ∫h dν + S∫η dν, all against the mollified measures.
pub fn r1_upper_bound<F: Real>(
    bundle: &ProbeBundle<F>,
    mu: &AtomicMeasure<F>,
    nu: &AtomicMeasure<F>,
    theta: &Kernel<F>,
) -> Result<R1Bound> {
    let rule = MollifierRule::new(theta)?;
    let pf = pair_with_rule(&|x| bundle.hhat(x), mu, &rule, None)?;
    let pt = pair_with_rule(&|x| bundle.h(x), nu, &rule, Some(bundle.lambda))?;
    let pe = pair_with_rule(&|x| bundle.eta.time_eval(x), nu, &rule, bundle.eta.time_half_support())?;
    let em = bundle.s * pe;
    Ok(R1Bound {
        value: (pf - pt + em).to_f64_lossy(),
        pair_freq: pf.to_f64_lossy(),
        pair_time: pt.to_f64_lossy(),
        eta_mass: em.to_f64_lossy(),
        guaranteed: bundle.hhat_nonneg,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AscentResult<F> {
    pub pair: PotentialPair<F>,
    /// Dual value at the start and after each sweep.
    pub history: Vec<F>,
    /// The last sweep left both potentials unchanged.
    pub stable: bool,
}

/// Alternating truncated c-transforms from φ = ψ = 0:
/// φ(γ) ← min(0, min_t [c(γ,t) − ψ(t)]), ψ(t) ← min(0, min_γ [c(γ,t) − φ(γ)]).
/// Every iterate is feasible on the grid. With a symmetric γ-grid only γ ≥ 0
/// is scanned, since the cost is even in γ.
#[allow(clippy::too_many_arguments)]
pub fn c_transform_ascent<F: Real>(
    cost: &CostSpec<F>,
    gamma_grid: GridSpec<F>,
    t_grid: GridSpec<F>,
    mu: &AtomicMeasure<F>,
    nu: &AtomicMeasure<F>,
    theta: &Kernel<F>,
    iters: usize,
    grid_cap: usize,
) -> Result<AscentResult<F>> {
    if iters == 0 {
        return Err(Error::InvalidParameter { name: "iters", reason: "must be >= 1".into() });
    }
    let symmetric = is_symmetric(&gamma_grid);
    let ng = gamma_grid.n;
    let rows = if symmetric { ng / 2 + 1 } else { ng };
    let product = rows.saturating_mul(t_grid.n);
    if product > grid_cap {
        return Err(Error::ResourceLimit(format!(
            "c-transform scan of {rows} × {} = {product} cost evaluations exceeds the cap {grid_cap}",
            t_grid.n
        )));
    }
    let gn: Vec<F> = (0..rows).map(|i| gamma_grid.node(i)).collect();
    let tn: Vec<F> = t_grid.nodes().collect();
    let eta_t: Vec<F> = tn.iter().map(|&t| cost.eta.time_eval(t)).collect();

    let mut pair = PotentialPair::zero(gamma_grid, t_grid);
    let mut history = vec![dual_value(&pair, mu, nu, theta)?];
    let mut stable = false;
    for _ in 0..iters {
        let psi = &pair.psi;
        let half: Vec<F> = gn
            .par_iter()
            .map(|&g| {
                let mut best = F::zero();
                for j in 0..tn.len() {
                    best = best.min(cost.eval_with_eta(eta_t[j], g * tn[j]) - psi[j]);
                }
                best
            })
            .collect();
        let phi: Vec<F> = (0..ng).map(|i| if i < rows { half[i] } else { half[ng - 1 - i] }).collect();
        let psi_new: Vec<F> = (0..tn.len())
            .into_par_iter()
            .map(|j| {
                let mut best = F::zero();
                for i in 0..rows {
                    best = best.min(cost.eval_with_eta(eta_t[j], gn[i] * tn[j]) - half[i]);
                }
                best
            })
            .collect();
        stable = phi == pair.phi && psi_new == pair.psi;
        pair.phi = phi;
        pair.psi = psi_new;
        history.push(dual_value(&pair, mu, nu, theta)?);
        if stable {
            break;
        }
    }
    Ok(AscentResult { pair, history, stable })
}

#[cfg(test)]
mod tests;
