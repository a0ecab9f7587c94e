//! Zero-frequency calibration: add c·h₀ to the probe so that
//! S∫ηm = ∫hm, keep f̂ ≥ 0, then rescale to S = 1/T.

use serde::Serialize;

use crate::error::{CalibrationAttempt, Error, Result};
use crate::kernels::{make_bump, make_fejer, Kernel, Probe};
use crate::quadrature::{abs_integral, Adaptive};
use crate::scalar::Real;

/// Samples used for the nonnegativity check of f̂ + cĥ₀.
pub const FHAT_SAMPLES: usize = 10_000;
pub const FHAT_TOL: f64 = 1e-12;
pub const RESIDUAL_TOL: f64 = 1e-9;

/// The default ladder {½, 1, 2, 4}/T.
pub fn default_ladder<F: Real>(t: F) -> Vec<F> {
    [0.5, 1.0, 2.0, 4.0].iter().map(|&k| F::of(k) / t).collect()
}

/// Integrals over [log 2, T] against the main density m.
struct Moments<'a, F> {
    eta: &'a Kernel<F>,
    fejer: Kernel<F>,
    lambda: F,
    t: F,
    m: &'a (dyn Fn(F) -> F + Sync),
    eta_m: F,
}

impl<'a, F: Real> Moments<'a, F> {
    fn new(eta: &'a Kernel<F>, lambda: F, m: &'a (dyn Fn(F) -> F + Sync), t: F) -> Result<Self> {
        if t <= F::LN_2() {
            return Err(Error::InvalidParameter { name: "T", reason: "must exceed log 2".into() });
        }
        let mut me = Self { eta, fejer: make_fejer(lambda)?, lambda, t, m, eta_m: F::zero() };
        me.eta_m = me.integrate(|x| eta.time_eval(x) * m(x))?;
        Ok(me)
    }

    fn breaks(&self) -> Vec<F> {
        let lo = F::LN_2();
        let mut br = vec![lo];
        let mut kinks = self.eta.time_kinks();
        kinks.extend(self.eta.time_half_support());
        kinks.push(self.lambda);
        kinks.retain(|&k| k > lo && k < self.t);
        kinks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        br.extend(kinks);
        br.push(self.t);
        br
    }

    fn integrate(&self, g: impl Fn(F) -> F) -> Result<F> {
        Adaptive::new(F::zero(), F::of(1e-14))
            .with_initial_panels(4)
            .integrate_pieces(g, &self.breaks())
    }

    /// ∫ η·k·F̂_Λ·m for a time-side function k.
    fn h_m(&self, k: impl Fn(F) -> F) -> Result<F> {
        self.integrate(|x| self.eta.time_eval(x) * k(x) * self.fejer.freq_eval(x) * (self.m)(x))
    }
}

/// ‖f̂ + cĥ₀‖₁: S + c when both are nonnegative and c ≥ 0, quadrature
/// otherwise.
fn s_of_c<F: Real>(f: &Probe<F>, h0: &Kernel<F>, c: F) -> Result<F> {
    if c >= F::zero() && f.freq_nonneg() && h0.freq_nonneg() {
        return Ok(f.freq_l1()? + c * h0.freq_integral());
    }
    let mut br = f.freq_breaks();
    br.extend(h0.freq_half_support());
    br.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    br.dedup();
    let q = Adaptive::new(F::zero(), F::of(1e-14));
    let mut total = F::zero();
    for w in br.windows(2) {
        let step = (w[1] - w[0]) / F::of(64.0);
        total = total + abs_integral(|x| f.freq_eval(x) + c * h0.freq_eval(x), w[0], w[1], step, &q)?;
    }
    Ok(F::of(2.0) * total)
}

/// 𝓛(c) = S_c∫ηm − ∫h_c m with f_c = f + c·h₀ and h_c = η f_c F̂_Λ.
pub fn l_of_c<F: Real>(
    c: F,
    f: &Probe<F>,
    h0: &Kernel<F>,
    eta: &Kernel<F>,
    lambda: F,
    m: &(dyn Fn(F) -> F + Sync),
    t: F,
) -> Result<F> {
    let mo = Moments::new(eta, lambda, m, t)?;
    let hm = mo.h_m(|x| f.time_eval(x) + c * h0.time_eval(x))?;
    Ok(s_of_c(f, h0, c)? * mo.eta_m - hm)
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationResult<F> {
    pub c_star: F,
    pub rescale: F,
    pub s_final: F,
    /// |𝓛| of the final probe relative to |S∫ηm|.
    pub residual: F,
    pub fhat_min: F,
    /// ξ₀ of the accepted bump.
    pub xi0: F,
    /// |c*|·‖ĥ₀‖_∞ / S.
    pub smallness: F,
    pub attempts: Vec<F>,
    /// The calibrated and rescaled probe.
    #[serde(skip)]
    pub probe: Probe<F>,
}

/// Calibrates with bumps of half-width ξ₀ taken from `ladder` in order.
pub fn calibrate<F: Real>(
    f: &Probe<F>,
    eta: &Kernel<F>,
    lambda: F,
    m: &(dyn Fn(F) -> F + Sync),
    t: F,
    ladder: &[F],
) -> Result<CalibrationResult<F>> {
    if ladder.is_empty() {
        return Err(Error::InvalidParameter { name: "xi0_ladder", reason: "empty".into() });
    }
    let bumps = ladder.iter().map(|&x| make_bump(x)).collect::<Result<Vec<_>>>()?;
    calibrate_with_bumps(f, eta, lambda, m, t, &bumps)
}

/// As [`calibrate`], with arbitrary band-limited bumps of unit integral.
pub fn calibrate_with_bumps<F: Real>(
    f: &Probe<F>,
    eta: &Kernel<F>,
    lambda: F,
    m: &(dyn Fn(F) -> F + Sync),
    t: F,
    bumps: &[Kernel<F>],
) -> Result<CalibrationResult<F>> {
    let mo = Moments::new(eta, lambda, m, t)?;
    let s0 = f.freq_l1()?;
    let fm = mo.h_m(|x| f.time_eval(x))?;
    let l0 = s0 * mo.eta_m - fm;
    let mut attempts = Vec::new();
    let mut tried = Vec::new();
    for h0 in bumps {
        let xi0 = h0.freq_half_support().unwrap_or(F::zero());
        tried.push(xi0);
        let h0m = mo.h_m(|x| h0.time_eval(x))?;
        // slope of the affine branch c ≥ 0
        let slope = h0.freq_integral() * mo.eta_m - h0m;
        let scale = (h0.freq_integral() * mo.eta_m).abs() + h0m.abs();
        let mut attempt = CalibrationAttempt {
            xi0: xi0.to_f64_lossy(),
            slope: slope.to_f64_lossy(),
            root: None,
            fhat_min: None,
            outcome: String::new(),
        };
        if slope.abs() <= F::of(1e-12) * scale {
            attempt.outcome = "degenerate slope".into();
            attempts.push(attempt);
            continue;
        }
        let c = -l0 / slope;
        attempt.root = Some(c.to_f64_lossy());
        let cal = if c == F::zero() { f.clone() } else { f.plus(h0, c)? };
        let fmin = cal.freq_min(FHAT_SAMPLES);
        attempt.fhat_min = Some(fmin.to_f64_lossy());
        let peak = f.freq_eval(F::zero()).abs().max(F::min_positive_value());
        if fmin < -F::of(FHAT_TOL) * peak {
            attempt.outcome = format!("f̂ + c·ĥ₀ negative (min {:e})", fmin.to_f64_lossy());
            attempts.push(attempt);
            continue;
        }
        let s_c = s_of_c(f, h0, c)?;
        let rescale = F::one() / (t * s_c);
        let probe = cal.scaled(rescale);
        let s_final = probe.freq_l1()?;
        let target = s_final * mo.eta_m;
        let l_final = target - mo.h_m(|x| probe.time_eval(x))?;
        let residual = if target != F::zero() { (l_final / target).abs() } else { l_final.abs() };
        let h0_peak = h0.freq_eval(F::zero()).abs();
        return Ok(CalibrationResult {
            c_star: c,
            rescale,
            s_final,
            residual,
            fhat_min: fmin * rescale,
            xi0,
            smallness: c.abs() * h0_peak / s0,
            attempts: tried,
            probe,
        });
    }
    Err(Error::CalibrationFailure { attempts })
}
