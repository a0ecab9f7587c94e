//! Entropic unbalanced transport by log-domain scaling iterations.
//!
//! Primal: min over π ≥ 0 of ⟨C,π⟩ + ε·KL(π | a⊗b) + ρ·KL(π𝟙 | a) + ρ·KL(πᵀ𝟙 | b)
//! with KL(p | q) = Σ p log(p/q) − p + q.

use rayon::prelude::*;
use serde::Serialize;

use super::CostSpec;
use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::scalar::Real;
use crate::summation::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportResult {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub marginal_kl_mu: f64,
    pub marginal_kl_nu: f64,
    pub iterations: usize,
    pub converged: bool,
    pub plan_mass: f64,
    /// Largest increase of the primal between consecutive iterations.
    pub max_primal_increase: f64,
}

/// Bins atoms of `meas` into `bins` equal cells of [lo, hi] (atoms outside
/// go to the end cells); returns cell centres and masses.
pub fn discretize<F: Real>(meas: &AtomicMeasure<F>, lo: F, hi: F, bins: usize) -> Result<(Vec<F>, Vec<F>)> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidArgument("discretization needs bins >= 1 and lo < hi".into()));
    }
    let w = (hi - lo) / F::of_usize(bins);
    let mut mass = vec![F::zero(); bins];
    for (&x, &m) in meas.positions().iter().zip(meas.weights()) {
        let k = ((x - lo) / w).floor().max(F::zero()).to_usize().unwrap_or(0).min(bins - 1);
        mass[k] = mass[k] + m;
    }
    let centres = (0..bins).map(|k| lo + w * (F::of_usize(k) + F::of(0.5))).collect();
    Ok((centres, mass))
}

fn lse<F: Real>(xs: impl Iterator<Item = F> + Clone) -> F {
    let m = xs.clone().fold(F::neg_infinity(), F::max);
    if m == F::neg_infinity() {
        return m;
    }
    let s = pairwise_sum(&xs.map(|x| (x - m).exp()).collect::<Vec<_>>());
    m + s.ln()
}

fn kl<F: Real>(p: &[F], q: &[F]) -> F {
    let terms: Vec<F> = p
        .iter()
        .zip(q)
        .map(|(&p, &q)| if p > F::zero() { p * (p / q).ln() - p + q } else { q })
        .collect();
    pairwise_sum(&terms)
}

/// Solves the problem for μ = Σ aᵢδ_{γᵢ}, ν = Σ bⱼδ_{tⱼ} and cost c(γᵢ, tⱼ).
#[allow(clippy::too_many_arguments)]
pub fn sinkhorn_unbalanced<F: Real>(
    cost: &CostSpec<F>,
    mu: (&[F], &[F]),
    nu: (&[F], &[F]),
    eps: F,
    rho: F,
    max_iters: usize,
    tol: F,
) -> Result<TransportResult> {
    let c: Vec<Vec<F>> = mu.0.iter().map(|&g| nu.0.iter().map(|&t| cost.eval(g, t)).collect()).collect();
    sinkhorn_matrix(&c, mu.1, nu.1, eps, rho, max_iters, tol)
}

/// As [`sinkhorn_unbalanced`] with an explicit cost matrix `c[i][j]`.
pub fn sinkhorn_matrix<F: Real>(
    c: &[Vec<F>],
    a: &[F],
    b: &[F],
    eps: F,
    rho: F,
    max_iters: usize,
    tol: F,
) -> Result<TransportResult> {
    if !(eps > F::zero()) || !(rho > F::zero()) {
        return Err(Error::InvalidArgument("epsilon and rho must be positive".into()));
    }
    if c.len() != a.len() || c.iter().any(|r| r.len() != b.len()) {
        return Err(Error::InvalidArgument("cost matrix shape does not match the marginals".into()));
    }
    if a.iter().chain(b).any(|&m| m < F::zero() || !m.is_finite()) {
        return Err(Error::InvalidArgument("masses must be finite and nonnegative".into()));
    }
    // Zero-mass nodes carry no plan and are dropped.
    let rows: Vec<usize> = (0..a.len()).filter(|&i| a[i] > F::zero()).collect();
    let cols: Vec<usize> = (0..b.len()).filter(|&j| b[j] > F::zero()).collect();
    let a: Vec<F> = rows.iter().map(|&i| a[i]).collect();
    let b: Vec<F> = cols.iter().map(|&j| b[j]).collect();
    let (ma, mb) = (pairwise_sum(&a), pairwise_sum(&b));
    if a.is_empty() || b.is_empty() {
        let v = (rho * (ma + mb)).to_f64_lossy();
        return Ok(TransportResult {
            primal: v,
            dual: v,
            gap: 0.0,
            marginal_kl_mu: ma.to_f64_lossy(),
            marginal_kl_nu: mb.to_f64_lossy(),
            iterations: 0,
            converged: true,
            plan_mass: 0.0,
            max_primal_increase: 0.0,
        });
    }
    let cm: Vec<Vec<F>> = rows.iter().map(|&i| cols.iter().map(|&j| c[i][j]).collect()).collect();
    let la: Vec<F> = a.iter().map(|x| x.ln()).collect();
    let lb: Vec<F> = b.iter().map(|x| x.ln()).collect();
    let (n, m) = (a.len(), b.len());
    let k = rho / (rho + eps);
    let mut f = vec![F::zero(); n];
    let mut g = vec![F::zero(); m];

    let evaluate = |f: &[F], g: &[F]| -> (F, F, F, F, F) {
        let row_terms: Vec<(F, F)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut mass = Vec::with_capacity(m);
                let mut lin = Vec::with_capacity(m);
                for j in 0..m {
                    let z = (f[i] + g[j] - cm[i][j]) / eps;
                    let p = (la[i] + lb[j] + z).exp();
                    mass.push(p);
                    lin.push(p * (cm[i][j] + eps * z));
                }
                (pairwise_sum(&mass), pairwise_sum(&lin))
            })
            .collect();
        let rm: Vec<F> = row_terms.iter().map(|r| r.0).collect();
        let cmass: Vec<F> = (0..m)
            .into_par_iter()
            .map(|j| {
                let col: Vec<F> = (0..n)
                    .map(|i| (la[i] + lb[j] + (f[i] + g[j] - cm[i][j]) / eps).exp())
                    .collect();
                pairwise_sum(&col)
            })
            .collect();
        let total = pairwise_sum(&rm);
        let lin = pairwise_sum(&row_terms.iter().map(|r| r.1).collect::<Vec<_>>());
        // ⟨C,π⟩ + ε KL(π|a⊗b) = Σ π(C + ε z) − ε Σπ + ε ΣaΣb
        let kl_mu = kl(&rm, &a);
        let kl_nu = kl(&cmass, &b);
        let primal = lin - eps * total + eps * ma * mb + rho * (kl_mu + kl_nu);
        let da: Vec<F> = f.iter().zip(&a).map(|(&fi, &ai)| ai * (F::one() - (-fi / rho).exp())).collect();
        let db: Vec<F> = g.iter().zip(&b).map(|(&gj, &bj)| bj * (F::one() - (-gj / rho).exp())).collect();
        let dual = rho * (pairwise_sum(&da) + pairwise_sum(&db)) - eps * (total - ma * mb);
        (primal, dual, kl_mu, kl_nu, total)
    };

    let mut last_primal = F::infinity();
    let mut max_increase = F::zero();
    let mut converged = false;
    let mut iterations = 0;
    for it in 1..=max_iters {
        iterations = it;
        let f_new: Vec<F> = (0..n)
            .into_par_iter()
            .map(|i| -k * eps * lse((0..m).map(|j| lb[j] + (g[j] - cm[i][j]) / eps)))
            .collect();
        let g_new: Vec<F> = (0..m)
            .into_par_iter()
            .map(|j| -k * eps * lse((0..n).map(|i| la[i] + (f_new[i] - cm[i][j]) / eps)))
            .collect();
        let change = f_new
            .iter()
            .zip(&f)
            .chain(g_new.iter().zip(&g))
            .fold(F::zero(), |acc, (x, y)| acc.max((*x - *y).abs()))
            / eps;
        f = f_new;
        g = g_new;
        let (p, ..) = evaluate(&f, &g);
        if last_primal.is_finite() {
            max_increase = max_increase.max(p - last_primal);
        }
        last_primal = p;
        if !change.is_finite() {
            return Err(Error::Numerical("non-finite Sinkhorn scaling".into()));
        }
        if change < tol {
            converged = true;
            break;
        }
    }
    let (primal, dual, kl_mu, kl_nu, total) = evaluate(&f, &g);
    Ok(TransportResult {
        primal: primal.to_f64_lossy(),
        dual: dual.to_f64_lossy(),
        gap: (primal - dual).to_f64_lossy(),
        marginal_kl_mu: kl_mu.to_f64_lossy(),
        marginal_kl_nu: kl_nu.to_f64_lossy(),
        iterations,
        converged,
        plan_mass: total.to_f64_lossy(),
        max_primal_increase: max_increase.to_f64_lossy(),
    })
}
