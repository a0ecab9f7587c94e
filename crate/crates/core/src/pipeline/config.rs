//! Run configuration: defaults, `key = value` files and validation.

use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::EtaFamily;
use crate::measures::DEFAULT_T_CAP;
use crate::transport::DEFAULT_GRID_CAP;
use crate::zerodata::{BUILTIN_COVERAGE, LOCATOR_LIMIT};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSpec {
    Builtin,
    Locate,
    File(PathBuf),
}

impl FromStr for ZeroSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "builtin" => Ok(Self::Builtin),
            "locate" => Ok(Self::Locate),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Self::File(PathBuf::from(p))),
                _ => Err(config_err("zeros", format!("expected builtin, locate or file:PATH, got `{s}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(config_err("format", format!("expected csv or json, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub t_list: Vec<f64>,
    pub alpha: f64,
    pub kappa: f64,
    #[serde(serialize_with = "family_name")]
    pub eta_family: EtaFamily,
    /// Family parameter (C, W or δ); the family default when unset.
    pub eta_param: Option<f64>,
    pub beta_scale: f64,
    /// Bump half-widths as multiples of 1/T.
    pub xi0_ladder: Vec<f64>,
    pub epsilon: f64,
    pub rho: f64,
    pub sinkhorn_iters: usize,
    pub sinkhorn_tol: f64,
    pub sinkhorn_bins: usize,
    pub zeros: ZeroSpec,
    /// Potential-grid steps; derived from T, Ω and Δ when unset.
    pub grid_dt: Option<f64>,
    pub grid_dgamma: Option<f64>,
    /// Density grid spacing is Δ/density_divisor.
    pub density_divisor: usize,
    pub ascent_iters: usize,
    pub lemma2_samples: usize,
    pub grid_cap: usize,
    pub t_cap: f64,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub seed: u64,
    pub timing: bool,
}

fn family_name<S: serde::Serializer>(f: &EtaFamily, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(f.name())
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            t_list: vec![8.0, 10.0, 12.0, 14.0, 16.0],
            alpha: 0.5,
            kappa: 10.0,
            eta_family: EtaFamily::TrianglePd,
            eta_param: None,
            beta_scale: 1.0,
            xi0_ladder: vec![0.5, 1.0, 2.0, 4.0],
            epsilon: 0.05,
            rho: 1.0,
            sinkhorn_iters: 10_000,
            sinkhorn_tol: 1e-9,
            sinkhorn_bins: 128,
            zeros: ZeroSpec::Builtin,
            grid_dt: None,
            grid_dgamma: None,
            density_divisor: 64,
            ascent_iters: 4,
            lemma2_samples: 200,
            grid_cap: DEFAULT_GRID_CAP,
            t_cap: DEFAULT_T_CAP,
            out: None,
            format: OutputFormat::Csv,
            threads: None,
            seed: 0,
            timing: false,
        }
    }
}

pub(crate) fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), reason: reason.into() }
}

fn parse_num<T: FromStr>(field: &str, v: &str) -> Result<T> {
    v.trim().parse().map_err(|_| config_err(field, format!("cannot parse `{}`", v.trim())))
}

fn parse_list(field: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_num(field, s)).collect()
}

impl RunConfig {
    /// Sets one field from its textual form. Keys use `_` or `-`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().replace('-', "_");
        let v = value.trim();
        match k.as_str() {
            "t_list" => self.t_list = parse_list("t_list", v)?,
            "alpha" => self.alpha = parse_num("alpha", v)?,
            "kappa" => self.kappa = parse_num("kappa", v)?,
            "eta_family" => {
                self.eta_family = v.parse().map_err(|_| config_err("eta_family", format!("unknown family `{v}`")))?
            }
            "eta_param" => self.eta_param = Some(parse_num("eta_param", v)?),
            "beta_scale" => self.beta_scale = parse_num("beta_scale", v)?,
            "xi0_ladder" => self.xi0_ladder = parse_list("xi0_ladder", v)?,
            "epsilon" => self.epsilon = parse_num("epsilon", v)?,
            "rho" => self.rho = parse_num("rho", v)?,
            "sinkhorn_iters" => self.sinkhorn_iters = parse_num("sinkhorn_iters", v)?,
            "sinkhorn_tol" => self.sinkhorn_tol = parse_num("sinkhorn_tol", v)?,
            "sinkhorn_bins" => self.sinkhorn_bins = parse_num("sinkhorn_bins", v)?,
            "zeros" => self.zeros = v.parse()?,
            "grid_dt" => self.grid_dt = Some(parse_num("grid_dt", v)?),
            "grid_dgamma" => self.grid_dgamma = Some(parse_num("grid_dgamma", v)?),
            "density_divisor" => self.density_divisor = parse_num("density_divisor", v)?,
            "ascent_iters" => self.ascent_iters = parse_num("ascent_iters", v)?,
            "lemma2_samples" => self.lemma2_samples = parse_num("lemma2_samples", v)?,
            "grid_cap" => self.grid_cap = parse_num::<f64>("grid_cap", v)? as usize,
            "t_cap" => self.t_cap = parse_num("t_cap", v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "format" => self.format = v.parse()?,
            "threads" => self.threads = Some(parse_num("threads", v)?),
            "seed" => self.seed = parse_num("seed", v)?,
            "timing" => self.timing = parse_num("timing", v)?,
            _ => return Err(config_err(&k, "unknown key")),
        }
        Ok(())
    }

    /// Applies a `key = value` file over the current values. `#` starts a
    /// comment; blank lines are ignored.
    pub fn apply_file_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: i + 1, reason: format!("expected key = value, got `{line}`") })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut c = Self::default();
        c.apply_file_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn eta_param(&self) -> f64 {
        self.eta_param.unwrap_or_else(|| self.eta_family.default_param())
    }

    pub fn max_omega(&self) -> f64 {
        self.kappa * self.t_list.last().copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |field: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config_err(field, format!("must be positive and finite, got {v}")))
            }
        };
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(config_err("alpha", format!("must lie in (0, 1), got {}", self.alpha)));
        }
        if self.t_list.is_empty() {
            return Err(config_err("t_list", "needs at least one T"));
        }
        for w in self.t_list.windows(2) {
            if !(w[1] > w[0]) {
                return Err(config_err("t_list", "must be strictly ascending"));
            }
        }
        for &t in &self.t_list {
            if !(t > 1.0) || !t.is_finite() {
                return Err(config_err("t_list", format!("every T must exceed 1, got {t}")));
            }
            if t > self.t_cap {
                return Err(config_err("t_list", format!("T = {t} exceeds t_cap = {}", self.t_cap)));
            }
        }
        let t_min = self.t_list[0];
        if t_min.powf(-self.alpha) >= std::f64::consts::LN_2 {
            return Err(config_err(
                "alpha",
                format!("Δ = T^(−α) = {:.4} must stay below log 2 at T = {t_min}", t_min.powf(-self.alpha)),
            ));
        }
        pos("kappa", self.kappa)?;
        pos("eta_param", self.eta_param())?;
        pos("beta_scale", self.beta_scale)?;
        if self.xi0_ladder.is_empty() {
            return Err(config_err("xi0_ladder", "needs at least one entry"));
        }
        for &x in &self.xi0_ladder {
            pos("xi0_ladder", x)?;
        }
        pos("epsilon", self.epsilon)?;
        pos("rho", self.rho)?;
        pos("sinkhorn_tol", self.sinkhorn_tol)?;
        if let Some(v) = self.grid_dt {
            pos("grid_dt", v)?;
        }
        if let Some(v) = self.grid_dgamma {
            pos("grid_dgamma", v)?;
        }
        for (field, v) in [
            ("sinkhorn_iters", self.sinkhorn_iters),
            ("sinkhorn_bins", self.sinkhorn_bins),
            ("ascent_iters", self.ascent_iters),
            ("grid_cap", self.grid_cap),
        ] {
            if v == 0 {
                return Err(config_err(field, "must be >= 1"));
            }
        }
        if self.density_divisor < 8 {
            return Err(config_err("density_divisor", "must be >= 8 (spacing Δ/8 or finer)"));
        }
        if self.threads == Some(0) {
            return Err(config_err("threads", "must be >= 1"));
        }
        let need = self.max_omega() + t_min.powf(-self.alpha);
        let limit = match self.zeros {
            ZeroSpec::Builtin => Some(BUILTIN_COVERAGE),
            ZeroSpec::Locate => Some(LOCATOR_LIMIT),
            ZeroSpec::File(_) => None,
        };
        if let Some(l) = limit {
            if self.max_omega() > l {
                return Err(config_err(
                    "kappa",
                    format!("Ω = κ·max T = {} exceeds the zero coverage {l} (need {need:.3})", self.max_omega()),
                ));
            }
        }
        Ok(())
    }
}
