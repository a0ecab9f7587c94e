//! The per-T chain (measures, kernels, calibration, bundle, explicit
//! formula, R1 bound, dual witness, transport oracle), sweeps over T and the
//! growth fit against T·log²T.

mod config;
mod output;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{OutputFormat, RunConfig, ZeroSpec};
pub use output::{to_csv, to_json, write_report, CSV_COLUMNS};

use crate::calibration::{calibrate, l_of_c, CalibrationResult, FHAT_SAMPLES, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::explicit_formula::{
    build_bundle, check_cosine_pairing, check_two_way_fejer, ef_difference, norm_report, EfDensities,
};
use crate::kernels::{make_bump, make_eta, make_mollifier, make_probe, Kernel, Probe};
use crate::quadrature::Adaptive;
use crate::measures::{fluctuation_report, fluctuations_from, main_m, main_n, prime_power_atoms_capped};
use crate::transport::{
    c_transform_ascent, discretize, potential_grids, r1_upper_bound, sinkhorn_unbalanced, CostSpec,
};
use crate::zerodata::{builtin_table, locate_zeros, parse_zero_table, verify_table, zero_atoms, ZeroTable};

/// Tolerance of the identity residual fields.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Direct and subtractive E must agree this well for T up to [`E_ROUTE_T_MAX`].
pub const E_ROUTE_TOL: f64 = 1e-4;
pub const E_ROUTE_T_MAX: f64 = 12.0;

/// One row of the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Delta")]
    pub delta: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    #[serde(rename = "S_final")]
    pub s_final: f64,
    pub c_star: f64,
    pub h_l1: f64,
    pub hhat_l1: f64,
    pub pair_freq: f64,
    pub pair_time: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_ratio")]
    pub e_ratio: f64,
    pub r1_bound: f64,
    pub dual_witness: f64,
    pub sinkhorn_primal: f64,
    pub sinkhorn_gap: f64,
    pub a_l1: f64,
    pub b_l1: f64,
    pub lemma2_residual: f64,
    pub lemma3_residual: f64,
    pub runtime_ms: u64,
    #[serde(rename = "E_direct")]
    pub e_direct: f64,
    #[serde(rename = "E_route_gap")]
    pub e_route_gap: f64,
    pub calibrated: bool,
    pub calibration_residual: f64,
    pub fhat_min: f64,
    pub lemma1_ratio_a: f64,
    pub lemma1_ratio_b: f64,
    pub hhat_path_residual: f64,
    pub h_l1_over_t: f64,
    pub mu_spill: f64,
    pub nu_spill: f64,
    pub ascent_monotone: bool,
    pub sinkhorn_converged: bool,
    pub sinkhorn_iterations: usize,
}

/// Outcome of one T: the row, plus hard-invariant violations and advisories.
#[derive(Debug, Clone, Serialize)]
pub struct RowOutcome {
    pub row: BoundRow,
    pub violations: Vec<String>,
    pub advisories: Vec<String>,
}

/// Least-squares C in value ≈ C·T log²T through the origin, and the band of
/// pointwise ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub c: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub band: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fit {
    pub r1_bound: GrowthFit,
    pub sinkhorn_primal: GrowthFit,
    pub lemma1_band_a: f64,
    pub lemma1_band_b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub config: RunConfig,
    pub rows: Vec<BoundRow>,
    pub fit: Option<Fit>,
    pub violations: Vec<String>,
    pub advisories: Vec<String>,
    /// Rows that failed, with their T and error.
    pub errors: Vec<(f64, String)>,
}

impl SweepReport {
    /// 1 on any error or hard-invariant violation, else 2 if an advisory
    /// fired, else 0.
    pub fn exit_code(&self) -> i32 {
        if !self.errors.is_empty() || !self.violations.is_empty() {
            1
        } else if !self.advisories.is_empty() {
            2
        } else {
            0
        }
    }
}

/// Loads the configured zero table, complete and verified up to `omega`.
pub fn load_zeros(spec: &ZeroSpec, omega: f64) -> Result<ZeroTable> {
    match spec {
        ZeroSpec::Builtin => Ok(builtin_table()),
        ZeroSpec::Locate => locate_zeros(omega + 1.0),
        ZeroSpec::File(path) => {
            let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let table = parse_zero_table(std::io::BufReader::new(f))?;
            verify_table(table, omega + 1.0)
        }
    }
}

fn growth_fit(points: &[(f64, f64)]) -> GrowthFit {
    let xs: Vec<(f64, f64)> = points.iter().map(|&(t, v)| (t * t.ln().powi(2), v)).collect();
    let num: f64 = xs.iter().map(|(x, v)| x * v).sum();
    let den: f64 = xs.iter().map(|(x, _)| x * x).sum();
    let ratios: Vec<f64> = xs.iter().map(|(x, v)| v / x).collect();
    let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    GrowthFit { c: num / den, ratio_min, ratio_max, band: ratio_max / ratio_min }
}

fn band(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// The fit over `rows`; needs at least three.
pub fn fit_rows(rows: &[BoundRow]) -> Option<Fit> {
    if rows.len() < 3 {
        return None;
    }
    Some(Fit {
        r1_bound: growth_fit(&rows.iter().map(|r| (r.t, r.r1_bound)).collect::<Vec<_>>()),
        sinkhorn_primal: growth_fit(&rows.iter().map(|r| (r.t, r.sinkhorn_primal)).collect::<Vec<_>>()),
        lemma1_band_a: band(rows.iter().map(|r| r.lemma1_ratio_a)),
        lemma1_band_b: band(rows.iter().map(|r| r.lemma1_ratio_b)),
    })
}

fn finite_or(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Numerical(format!("row field {name} is not finite ({v})")))
    }
}

/// Runs the chain at one T.
pub fn run_pipeline(cfg: &RunConfig, table: &ZeroTable, t: f64) -> Result<RowOutcome> {
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut advisories = Vec::new();
    let delta = t.powf(-cfg.alpha);
    let lambda = t.powf(cfg.alpha);
    let omega = cfg.kappa * t;

    let nu = prime_power_atoms_capped(t, cfg.t_cap)?;
    let mu = zero_atoms(table, omega)?;
    let theta = make_mollifier(delta)?;
    let eta = make_eta(cfg.eta_family, t, cfg.eta_param())?;
    let base = Probe::from(make_probe(t, cfg.beta_scale)?);

    // Calibration; when every rung is inadmissible the uncalibrated probe
    // (already at S = 1/T) is used and the row is flagged.
    let ladder: Vec<f64> = cfg.xi0_ladder.iter().map(|k| k / t).collect();
    let m = |x: f64| main_m(x);
    let (probe, c_star, calibrated, cal_residual, fhat_min) =
        match calibrate(&base, &eta, lambda, &m, t, &ladder) {
            Ok(CalibrationResult { probe, c_star, residual, fhat_min, .. }) => {
                if residual > RESIDUAL_TOL {
                    violations.push(format!("T={t}: calibration residual {residual:e} > {RESIDUAL_TOL:e}"));
                }
                (probe, c_star, true, residual, fhat_min)
            }
            Err(Error::CalibrationFailure { attempts }) => {
                let roots: Vec<String> = attempts
                    .iter()
                    .map(|a| format!("ξ₀={:.4}: {}", a.xi0, a.outcome))
                    .collect();
                advisories.push(format!(
                    "T={t}: calibration has no admissible root ({}); using the uncalibrated probe",
                    roots.join("; ")
                ));
                let l0 = l_of_c(0.0, &base, &make_bump(ladder[0])?, &eta, lambda, &m, t)?;
                let scale = base.freq_l1()? * eta_m_integral(&eta, &m, t)?;
                (base.clone(), 0.0, false, (l0 / scale).abs(), base.freq_min(FHAT_SAMPLES))
            }
            Err(e) => return Err(e),
        };

    let bundle = build_bundle(probe, &eta, lambda)?;
    let dens = EfDensities::build(&nu, &mu, &theta, t, omega, cfg.density_divisor)?;
    let ef = ef_difference(&bundle, &nu, &mu, &theta, t, omega, &dens)?;
    if ef.e != ef.d - ef.m {
        violations.push(format!("T={t}: E ≠ D − M"));
    }
    if t <= E_ROUTE_T_MAX && ef.e_route_gap > E_ROUTE_TOL {
        violations.push(format!("T={t}: E routes differ by {:e} (relative)", ef.e_route_gap));
    }

    let a = fluctuations_from(&dens.nu, |x| if x >= std::f64::consts::LN_2 { main_m(x) } else { 0.0 })?;
    let b = fluctuations_from(&dens.mu, |g| main_n(g))?;
    let fr = fluctuation_report(&a, &b, t, omega, cfg.alpha);

    let r1 = r1_upper_bound(&bundle, &mu, &nu, &theta)?;
    let cost = CostSpec::new(eta.clone());
    let (gg, tg) = potential_grids(t, omega, delta, cfg.grid_dt, cfg.grid_dgamma)?;
    let ascent = c_transform_ascent(&cost, gg, tg, &mu, &nu, &theta, cfg.ascent_iters, cfg.grid_cap)?;
    let monotone = ascent.history.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    if !monotone {
        violations.push(format!("T={t}: dual ascent history not monotone"));
    }
    // + 0.0 folds a negative zero so that output does not print "-0"
    let witness = *ascent.history.last().expect("history has the start value") + 0.0;
    let slack = 1e-6 * r1.value.abs().max(1.0);
    if witness > r1.value + slack {
        let msg = format!("T={t}: dual witness {witness:e} exceeds the R1 bound {:e}", r1.value);
        if r1.guaranteed {
            violations.push(msg);
        } else {
            advisories.push(msg);
        }
    }
    if !r1.guaranteed {
        advisories.push(format!(
            "T={t}: η family {} has a sign-changing transform; the R1 inequality is not guaranteed",
            cfg.eta_family
        ));
    }

    let (mg, mm) = discretize(&mu, -omega, omega, cfg.sinkhorn_bins)?;
    let (ng, nm) = discretize(&nu, std::f64::consts::LN_2, t, cfg.sinkhorn_bins)?;
    let ot = sinkhorn_unbalanced(&cost, (&mg, &mm), (&ng, &nm), cfg.epsilon, cfg.rho, cfg.sinkhorn_iters, cfg.sinkhorn_tol)?;
    if ot.gap < -1e-8 * (1.0 + ot.primal.abs()) {
        violations.push(format!("T={t}: Sinkhorn weak-duality gap {:e}", ot.gap));
    }
    if !ot.converged {
        advisories.push(format!("T={t}: Sinkhorn did not converge in {} iterations", ot.iterations));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ t.to_bits());
    let samples: Vec<(f64, f64)> = (0..cfg.lemma2_samples)
        .map(|_| (rng.gen_range(-50.0..50.0), rng.gen_range(-lambda..lambda)))
        .collect();
    let lemma2 = check_two_way_fejer(lambda, &samples)?;
    let lemma3 = check_cosine_pairing(&bundle, &mu, Some(&theta))?;
    for (name, v) in [("lemma2", lemma2), ("lemma3", lemma3)] {
        if v > IDENTITY_TOL {
            violations.push(format!("T={t}: {name} residual {v:e} > {IDENTITY_TOL:e}"));
        }
    }

    let norms = norm_report(&bundle, t);
    if !(0.1..=10.0).contains(&norms.h_l1_over_t) {
        advisories.push(format!(
            "T={t}: ‖h‖₁/T = {:.3e}, not of order 1 as the norm claim ‖h‖₁ ≍ T suggests",
            norms.h_l1_over_t
        ));
    }

    let runtime_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    let row = BoundRow {
        t,
        delta,
        omega,
        s_final: finite_or("S_final", bundle.s)?,
        c_star: finite_or("c_star", c_star)?,
        h_l1: finite_or("h_l1", ef.h_l1)?,
        hhat_l1: finite_or("hhat_l1", ef.hhat_l1)?,
        pair_freq: finite_or("pair_freq", ef.pair_freq)?,
        pair_time: finite_or("pair_time", ef.pair_time)?,
        d: finite_or("D", ef.d)?,
        m: finite_or("M", ef.m)?,
        e: finite_or("E", ef.e)?,
        e_ratio: finite_or("E_ratio", ef.e_ratio)?,
        r1_bound: finite_or("r1_bound", r1.value)?,
        dual_witness: finite_or("dual_witness", witness)?,
        sinkhorn_primal: finite_or("sinkhorn_primal", ot.primal)?,
        sinkhorn_gap: finite_or("sinkhorn_gap", ot.gap)?,
        a_l1: finite_or("a_l1", fr.a_l1)?,
        b_l1: finite_or("b_l1", fr.b_l1)?,
        lemma2_residual: finite_or("lemma2_residual", lemma2)?,
        lemma3_residual: finite_or("lemma3_residual", lemma3)?,
        runtime_ms,
        e_direct: finite_or("E_direct", ef.e_direct)?,
        e_route_gap: finite_or("E_route_gap", ef.e_route_gap)?,
        calibrated,
        calibration_residual: finite_or("calibration_residual", cal_residual)?,
        fhat_min: finite_or("fhat_min", fhat_min)?,
        lemma1_ratio_a: finite_or("lemma1_ratio_a", fr.lemma1_ratio_a)?,
        lemma1_ratio_b: finite_or("lemma1_ratio_b", fr.lemma1_ratio_b)?,
        hhat_path_residual: finite_or("hhat_path_residual", bundle.hhat_path_residual)?,
        h_l1_over_t: finite_or("h_l1_over_t", norms.h_l1_over_t)?,
        mu_spill: finite_or("mu_spill", ef.mu_spill)?,
        nu_spill: finite_or("nu_spill", ef.nu_spill)?,
        ascent_monotone: monotone,
        sinkhorn_converged: ot.converged,
        sinkhorn_iterations: ot.iterations,
    };
    Ok(RowOutcome { row, violations, advisories })
}

fn eta_m_integral(eta: &Kernel<f64>, m: &(dyn Fn(f64) -> f64 + Sync), t: f64) -> Result<f64> {
    let mut br = vec![std::f64::consts::LN_2];
    let mut k = eta.time_kinks();
    k.extend(eta.time_half_support());
    k.retain(|&x| x > br[0] && x < t);
    br.extend(k);
    br.push(t);
    Adaptive::new(0.0, 1e-14)
        .with_initial_panels(4)
        .integrate_pieces(|x| eta.time_eval(x) * m(x), &br)
}

/// Runs every T of the configuration (in parallel) and fits the growth.
pub fn run_sweep(cfg: &RunConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let t_min = cfg.t_list[0];
    let table = load_zeros(&cfg.zeros, cfg.max_omega() + t_min.powf(-cfg.alpha))?;
    let outcomes: Vec<(f64, Result<RowOutcome>)> =
        cfg.t_list.par_iter().map(|&t| (t, run_pipeline(cfg, &table, t))).collect();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut advisories = Vec::new();
    let mut errors = Vec::new();
    for (t, o) in outcomes {
        match o {
            Ok(o) => {
                rows.push(o.row);
                violations.extend(o.violations);
                advisories.extend(o.advisories);
            }
            Err(e) => errors.push((t, e.to_string())),
        }
    }
    let fit = fit_rows(&rows);
    if let Some(f) = &fit {
        for (name, g) in [("r1_bound", f.r1_bound), ("sinkhorn_primal", f.sinkhorn_primal)] {
            if !(g.c.is_finite() && g.band.is_finite()) {
                violations.push(format!("growth fit of {name} is not finite"));
            }
        }
    }
    Ok(SweepReport { config: cfg.clone(), rows, fit, violations, advisories, errors })
}

#[cfg(test)]
mod tests;
