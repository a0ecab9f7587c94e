//! Zeta zero ordinates: table ingestion, a Riemann–Siegel locator used to
//! verify tables, the Riemann–von Mangoldt count and the zero-side atoms.

mod rs_coeffs;
mod zeta;

use std::io::BufRead;

use rayon::prelude::*;
use serde::Serialize;

pub use zeta::{riemann_siegel_theta, riemann_siegel_z, z_euler_maclaurin};

use crate::error::{Error, Result};
use crate::measures::AtomicMeasure;
use crate::scalar::Real;

/// Upper limit of heights handled by the internal locator.
pub const LOCATOR_LIMIT: f64 = 1.0e4;
/// Scan step of the sign-change locator.
pub const SCAN_STEP: f64 = 0.05;
/// Bisection tolerance on located ordinates.
pub const BISECT_TOL: f64 = 1.0e-9;
/// Ordinates closer than this are duplicates.
pub const DUPLICATE_TOL: f64 = 1.0e-9;

const BUILTIN: &str = include_str!("../../data/zeros_1000.txt");
/// Height below which the built-in table is complete.
pub const BUILTIN_COVERAGE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroSource {
    File,
    Builtin,
    Located,
}

/// Ascending positive zero ordinates. `verified_up_to` is the height below
/// which the table is known to be complete and to agree with the locator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroTable {
    ordinates: Vec<f64>,
    pub source: ZeroSource,
    pub verified_up_to: f64,
}

impl ZeroTable {
    pub fn ordinates(&self) -> &[f64] {
        &self.ordinates
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// Number of ordinates γ <= `gamma`.
    pub fn count_below(&self, gamma: f64) -> usize {
        self.ordinates.partition_point(|&g| g <= gamma)
    }

    /// Largest ordinate in the table.
    pub fn max_ordinate(&self) -> Option<f64> {
        self.ordinates.last().copied()
    }
}

/// Parses one ordinate per line; `#` starts a comment, blank lines are skipped.
pub fn parse_zero_table<R: BufRead>(reader: R) -> Result<ZeroTable> {
    let mut ordinates: Vec<f64> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body.parse().map_err(|_| Error::Parse {
            line: lineno,
            reason: format!("not a decimal number: `{body}`"),
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Parse {
                line: lineno,
                reason: format!("ordinate must be positive and finite, got {v}"),
            });
        }
        if let Some(&prev) = ordinates.last() {
            if (v - prev).abs() <= DUPLICATE_TOL {
                return Err(Error::Duplicate { line: lineno, value: v });
            }
            if v < prev {
                return Err(Error::NonAscending { line: lineno, value: v });
            }
        }
        ordinates.push(v);
    }
    if ordinates.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(ZeroTable {
        ordinates,
        source: ZeroSource::File,
        verified_up_to: 0.0,
    })
}

pub fn parse_zero_str(text: &str) -> Result<ZeroTable> {
    parse_zero_table(text.as_bytes())
}

/// The bundled table of all ordinates below 1000.
pub fn builtin_table() -> ZeroTable {
    let mut t = parse_zero_str(BUILTIN).expect("bundled zero table parses");
    t.source = ZeroSource::Builtin;
    t.verified_up_to = BUILTIN_COVERAGE;
    t
}

/// Smooth Riemann–von Mangoldt count (Γ/2π) log(Γ/2π) − Γ/2π + 7/8.
pub fn zero_count_n(gamma: f64) -> Result<f64> {
    let tp = 2.0 * std::f64::consts::PI;
    if !(gamma > tp) {
        return Err(Error::Domain(format!("N(Γ) needs Γ > 2π, got {gamma}")));
    }
    let x = gamma / tp;
    Ok(x * x.ln() - x + 0.875)
}

/// Diagnostics of one locator run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocatorReport {
    pub found: usize,
    /// round(N(Γ)), or 0 below 2π.
    pub expected: i64,
    /// Step of the scan that produced the result.
    pub final_step: f64,
    /// Located ordinates whose count differs from round(N) at the next
    /// ordinate by one or more; candidates for Gram-law failures.
    pub anomalies: Vec<f64>,
}

fn scan(lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((hi - lo) / step).ceil() as usize;
    let pts: Vec<f64> = (0..=n).map(|i| (lo + step * i as f64).min(hi)).collect();
    let vals: Vec<f64> = pts.par_iter().map(|&t| z_for_scan(t)).collect();
    let mut brackets = Vec::new();
    for i in 0..n {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == 0.0 {
            brackets.push((pts[i], pts[i]));
        } else if a * b < 0.0 {
            brackets.push((pts[i], pts[i + 1]));
        }
    }
    brackets
}

/// Riemann–Siegel above t = 30, where its corrections are far below the
/// smallest sign-relevant values; Euler–Maclaurin below.
fn z_for_scan(t: f64) -> f64 {
    if t >= 30.0 {
        riemann_siegel_z(t).expect("t >= 2")
    } else {
        z_euler_maclaurin(t)
    }
}

fn bisect(a: f64, b: f64) -> f64 {
    if a == b {
        return a;
    }
    let (mut lo, mut hi) = (a, b);
    let mut flo = z_euler_maclaurin(lo);
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = z_euler_maclaurin(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Zeros 0 < γ <= Γ from sign changes of Z, with the full diagnostics.
pub fn locate_zeros_report(gamma: f64) -> Result<(ZeroTable, LocatorReport)> {
    if !(gamma > 2.0) || gamma > LOCATOR_LIMIT {
        return Err(Error::Domain(format!(
            "locator handles 2 < Γ <= {LOCATOR_LIMIT}, got {gamma}"
        )));
    }
    let expected = zero_count_n(gamma).map(|n| n.round() as i64).unwrap_or(0);
    let mut step = SCAN_STEP;
    let mut ordinates = Vec::new();
    for _ in 0..3 {
        let brackets = scan(2.0, gamma, step);
        ordinates = brackets.par_iter().map(|&(a, b)| bisect(a, b)).collect();
        ordinates.retain(|&g| g <= gamma);
        ordinates.dedup_by(|a, b| (*a - *b).abs() <= DUPLICATE_TOL);
        if (ordinates.len() as i64 - expected).abs() <= 1 {
            break;
        }
        step /= 8.0;
    }
    let found = ordinates.len();
    if (found as i64 - expected).abs() > 1 {
        return Err(Error::Verification(format!(
            "found {found} sign changes below {gamma}, N(Γ) suggests {expected}; zeros may be missed"
        )));
    }
    let anomalies = ordinates
        .iter()
        .enumerate()
        .filter(|(i, &g)| match zero_count_n(g) {
            Ok(n) => (n.round() as i64 - (*i as i64 + 1)).abs() >= 2,
            Err(_) => false,
        })
        .map(|(_, &g)| g)
        .collect();
    let table = ZeroTable {
        ordinates,
        source: ZeroSource::Located,
        verified_up_to: gamma,
    };
    let report = LocatorReport {
        found,
        expected,
        final_step: step,
        anomalies,
    };
    Ok((table, report))
}

pub fn locate_zeros(gamma: f64) -> Result<ZeroTable> {
    locate_zeros_report(gamma).map(|r| r.0)
}

/// Checks `table` against the locator below `up_to` (clamped to the table's
/// largest ordinate and to 10³) and records the verified height.
pub fn verify_table(mut table: ZeroTable, up_to: f64) -> Result<ZeroTable> {
    let limit = up_to.min(1.0e3).min(table.max_ordinate().unwrap_or(0.0));
    if limit <= 14.0 {
        // nothing to compare below the first zero
        table.verified_up_to = table.verified_up_to.max(limit.max(0.0));
        return Ok(table);
    }
    let located = locate_zeros(limit)?;
    let ours: Vec<f64> = table.ordinates.iter().copied().filter(|&g| g <= limit).collect();
    let theirs = located.ordinates();
    // an ordinate within tolerance of the cut can fall on either side
    let trim = |v: &[f64]| -> Vec<f64> { v.iter().copied().filter(|&g| g <= limit - 1e-6).collect() };
    let (a, b) = (trim(&ours), trim(theirs));
    if a.len() != b.len() {
        return Err(Error::Verification(format!(
            "table has {} ordinates below {limit}, locator finds {}",
            a.len(),
            b.len()
        )));
    }
    for (i, (x, y)) in a.iter().zip(&b).enumerate() {
        if (x - y).abs() > 1e-6 {
            return Err(Error::Verification(format!(
                "ordinate {} differs: table {x}, locator {y}",
                i + 1
            )));
        }
    }
    table.verified_up_to = table.verified_up_to.max(limit);
    Ok(table)
}

/// Atoms at ±γ (weight 1) for every ordinate γ <= Ω.
pub fn zero_atoms<F: Real>(table: &ZeroTable, omega: F) -> Result<AtomicMeasure<F>> {
    let om = omega.to_f64_lossy();
    if om > table.verified_up_to {
        return Err(Error::Coverage(format!(
            "Ω = {om} exceeds the verified coverage {} of the {:?} table",
            table.verified_up_to, table.source
        )));
    }
    let k = table.count_below(om);
    let pos: Vec<F> = table.ordinates[..k]
        .iter()
        .rev()
        .map(|&g| -F::of(g))
        .chain(table.ordinates[..k].iter().map(|&g| F::of(g)))
        .collect();
    let w = vec![F::one(); pos.len()];
    AtomicMeasure::new(pos, w)
}

/// Worst deviations of the zero count from the smooth count on [lo, hi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountDeviation {
    /// max |count(Γ) − N(Γ)|.
    pub max_abs: f64,
    /// max |count(Γ) − N(Γ)| / log Γ.
    pub max_over_log: f64,
    /// max |count(Γ) − N(Γ)| − (3 + log Γ); nonpositive when the bound holds.
    pub max_excess: f64,
}

/// Evaluates count − N at both sides of every jump in [lo, hi] and at the
/// endpoints; between jumps N is monotone so these are the extremes.
pub fn count_deviation(table: &ZeroTable, lo: f64, hi: f64) -> Result<CountDeviation> {
    let lo = lo.max(2.0 * std::f64::consts::PI + 1e-9);
    let mut probes = vec![(lo, table.count_below(lo)), (hi, table.count_below(hi))];
    for (i, &g) in table.ordinates.iter().enumerate() {
        if g >= lo && g <= hi {
            probes.push((g, i + 1));
            probes.push((g, i));
        }
    }
    let mut out = CountDeviation {
        max_abs: 0.0,
        max_over_log: 0.0,
        max_excess: f64::NEG_INFINITY,
    };
    for (g, c) in probes {
        let d = (c as f64 - zero_count_n(g)?).abs();
        out.max_abs = out.max_abs.max(d);
        out.max_over_log = out.max_over_log.max(d / g.ln());
        out.max_excess = out.max_excess.max(d - (3.0 + g.ln()));
    }
    Ok(out)
}
