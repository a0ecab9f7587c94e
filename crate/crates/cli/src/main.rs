//! Sweep driver: builds a run configuration from flags and an optional
//! `key = value` file, runs the sweep and writes CSV or JSON.
//!
//! Exit codes: 0 when every hard invariant held, 2 when only advisories
//! fired, 1 on errors or invariant failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use primezero::pipeline::{run_sweep, to_csv, to_json, write_report, OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "primezero", version, about = "Prime–zero transport bound sweeps")]
struct Cli {
    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated ascending T values.
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// triangle, tukey or selberg.
    #[arg(long)]
    eta_family: Option<String>,
    #[arg(long)]
    eta_param: Option<f64>,
    #[arg(long)]
    beta_scale: Option<f64>,
    /// Bump half-widths as multiples of 1/T.
    #[arg(long, value_delimiter = ',')]
    xi0_ladder: Option<Vec<f64>>,
    /// builtin, locate or file:PATH.
    #[arg(long)]
    zeros: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    sinkhorn_iters: Option<usize>,
    #[arg(long)]
    grid_dt: Option<f64>,
    #[arg(long)]
    grid_dgamma: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Record wall-clock runtime per row (output is then not reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, short)]
    verbose: bool,
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn build_config(cli: &Cli) -> primezero::Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = &cli.config {
        let text = std::fs::read_to_string(p).map_err(|e| primezero::Error::Io(format!("{}: {e}", p.display())))?;
        cfg.apply_file_str(&text)?;
    }
    let mut set = |k: &str, v: Option<String>| -> primezero::Result<()> {
        match v {
            Some(v) => cfg.set(k, &v),
            None => Ok(()),
        }
    };
    set("t_list", cli.t_list.as_deref().map(list))?;
    set("alpha", cli.alpha.map(|v| v.to_string()))?;
    set("kappa", cli.kappa.map(|v| v.to_string()))?;
    set("eta_family", cli.eta_family.clone())?;
    set("eta_param", cli.eta_param.map(|v| v.to_string()))?;
    set("beta_scale", cli.beta_scale.map(|v| v.to_string()))?;
    set("xi0_ladder", cli.xi0_ladder.as_deref().map(list))?;
    set("zeros", cli.zeros.clone())?;
    set("epsilon", cli.epsilon.map(|v| v.to_string()))?;
    set("rho", cli.rho.map(|v| v.to_string()))?;
    set("sinkhorn_iters", cli.sinkhorn_iters.map(|v| v.to_string()))?;
    set("grid_dt", cli.grid_dt.map(|v| v.to_string()))?;
    set("grid_dgamma", cli.grid_dgamma.map(|v| v.to_string()))?;
    set("format", cli.format.clone())?;
    set("threads", cli.threads.map(|v| v.to_string()))?;
    set("seed", cli.seed.map(|v| v.to_string()))?;
    if let Some(p) = &cli.out {
        cfg.out = Some(p.clone());
    }
    if cli.timing {
        cfg.timing = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> primezero::Result<i32> {
    let cfg = build_config(cli)?;
    if let Some(n) = cfg.threads {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if cli.verbose {
        eprintln!("running T = {:?} with {} η, α = {}, κ = {}", cfg.t_list, cfg.eta_family, cfg.alpha, cfg.kappa);
    }
    let report = run_sweep(&cfg)?;
    match &cfg.out {
        Some(p) => write_report(&report, p, cfg.format)?,
        None => {
            let text = match cfg.format {
                OutputFormat::Csv => to_csv(&report.rows)?,
                OutputFormat::Json => to_json(&report)?,
            };
            print!("{text}");
        }
    }
    for (t, e) in &report.errors {
        eprintln!("error: T={t}: {e}");
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    if cli.verbose {
        for a in &report.advisories {
            eprintln!("advisory: {a}");
        }
        if let Some(f) = &report.fit {
            eprintln!(
                "fit: r1_bound ≈ {:.4e}·T log²T (band {:.3}), sinkhorn_primal ≈ {:.4e}·T log²T (band {:.3})",
                f.r1_bound.c, f.r1_bound.band, f.sinkhorn_primal.c, f.sinkhorn_primal.band
            );
        }
    } else if !report.advisories.is_empty() {
        eprintln!("{} advisory message(s); rerun with --verbose to list them", report.advisories.len());
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
