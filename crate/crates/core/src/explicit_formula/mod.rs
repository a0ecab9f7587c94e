//! The probe bundle (S, g, β₀, h, ĥ), pairings of h and ĥ with the smoothed
//! prime and zero measures, the D = M + E decomposition and the two
//! Fourier identities used by the bound.

mod identities;
mod pairing;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

pub use identities::{check_cosine_pairing, check_two_way_fejer, norm_report, NormReport};
pub use pairing::{pair_measure, pair_with_rule, MollifierRule, MOLLIFIER_NODES, MOLLIFIER_PANELS};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, GriddedDensity};
use crate::kernels::{make_fejer, Kernel, KernelFamily, Probe};
use crate::measures::{main_m, main_n, smooth_measure, AtomicMeasure};
use crate::quadrature::{abs_integral, Adaptive, GaussLegendre};
use crate::scalar::Real;
use crate::summation::{pairwise_sum, Neumaier};

/// Relative tolerance for the agreement of the two ĥ paths.
pub const HHAT_PATH_TOL: f64 = 1e-7;
/// Cached node tiers of the direct transform: 2^0 .. 2^15 panels.
const TIERS: usize = 16;
const DIRECT_NODES: usize = 32;

/// How P = η̂ ∗ F_Λ = FT(η·F̂_Λ) is evaluated for the convolution path.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Convolver<F> {
    /// η = 1 − |t|/w on [0, Λ]: closed form through cosine moments.
    Triangle { width: F },
    /// η ≡ 1 on [0, Λ]: P = 2πF_Λ.
    Flat,
    /// Band-limited η: frequency-side convolution over supp η̂.
    Spectral,
    /// Anything else: time-side quadrature of η F̂_Λ.
    TimeDomain,
}

/// Derived objects of one probe: S = ‖f̂‖₁, g = f F̂_Λ, h = η g, and ĥ.
#[derive(Debug, Clone)]
pub struct ProbeBundle<F> {
    pub probe: Probe<F>,
    pub eta: Kernel<F>,
    pub fejer: Kernel<F>,
    pub lambda: F,
    /// ‖f̂‖₁.
    pub s: F,
    pub h_l1: F,
    pub hhat_l1: F,
    /// Radius beyond which ‖ĥ‖₁ uses the asymptotic tail.
    pub hhat_l1_radius: F,
    /// True when η̂ ≥ 0 and f̂ ≥ 0, so ĥ ≥ 0.
    pub hhat_nonneg: bool,
    /// max |ĥ_direct − ĥ_conv| / max |ĥ| over the check samples.
    pub hhat_path_residual: F,
    convolver: Convolver<F>,
    /// Interior breakpoints of h on (0, Λ).
    kinks: Vec<F>,
    tiers: Vec<OnceLock<Vec<(F, F)>>>,
}

/// ∫₀¹ s^k cos(xs) ds for k = 0, 1, 2.
fn cos_moments<F: Real>(x: F) -> [F; 3] {
    if x.abs() < F::of(2.0) {
        let x2 = x * x;
        let mut out = [F::zero(); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = F::one();
            let mut acc = F::zero();
            let mut n = 0usize;
            loop {
                let d = F::of_usize(2 * n + k + 1);
                acc = acc + term / d;
                n += 1;
                term = -term * x2 / F::of_usize((2 * n - 1) * (2 * n));
                if term.abs() < F::epsilon() * F::of(1e-3) {
                    break;
                }
            }
            *slot = acc;
        }
        return out;
    }
    let (s, c) = x.sin_cos();
    let x2 = x * x;
    [
        s / x,
        (x * s + c - F::one()) / x2,
        ((x2 - F::of(2.0)) * s + F::of(2.0) * x * c) / (x2 * x),
    ]
}

fn gl<F: Real>(n: usize) -> GaussLegendre<F> {
    GaussLegendre::new(n)
}

/// Composite rule on `[0, b]` split at `kinks`, with roughly `panels`
/// panels in total; returns (node, weight).
fn composite_nodes<F: Real>(b: F, kinks: &[F], panels: usize) -> Vec<(F, F)> {
    let rule = gl::<F>(DIRECT_NODES);
    let mut breaks = vec![F::zero()];
    breaks.extend_from_slice(kinks);
    breaks.push(b);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        let p = ((F::of_usize(panels) * len / b).ceil().to_usize().unwrap_or(1)).max(1);
        let width = len / F::of_usize(p);
        for j in 0..p {
            let a = w[0] + width * F::of_usize(j);
            out.extend(rule.mapped(a, a + width));
        }
    }
    out
}

/// Builds the bundle for probe f, majorant η and Fejér bandwidth Λ.
pub fn build_bundle<F: Real>(probe: impl Into<Probe<F>>, eta: &Kernel<F>, lambda: F) -> Result<ProbeBundle<F>> {
    let probe = probe.into();
    let fejer = make_fejer(lambda)?;
    for k in probe.parts() {
        if k.freq_half_support().is_none() {
            return Err(Error::InvalidArgument(format!("probe part {} is not band-limited", k.family())));
        }
    }
    let convolver = match eta.family() {
        KernelFamily::TrianglePd => {
            let w = eta.time_half_support().expect("triangle support");
            if w >= lambda {
                Convolver::Triangle { width: w }
            } else {
                Convolver::TimeDomain
            }
        }
        KernelFamily::Tukey => {
            let plateau = eta.param("T").expect("tukey plateau");
            if plateau >= lambda {
                Convolver::Flat
            } else {
                Convolver::TimeDomain
            }
        }
        KernelFamily::Selberg => Convolver::Spectral,
        _ => Convolver::TimeDomain,
    };
    let mut kinks: Vec<F> = eta.time_kinks();
    if let Some(w) = eta.time_half_support() {
        kinks.push(w);
    }
    kinks.retain(|&k| k > F::zero() && k < lambda);
    kinks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));

    let s = probe.freq_l1()?;
    let hhat_nonneg = eta.freq_nonneg() && probe.freq_nonneg();
    let mut b = ProbeBundle {
        probe,
        eta: eta.clone(),
        fejer,
        lambda,
        s,
        h_l1: F::zero(),
        hhat_l1: F::zero(),
        hhat_l1_radius: F::zero(),
        hhat_nonneg,
        hhat_path_residual: F::zero(),
        convolver,
        kinks,
        tiers: (0..TIERS).map(|_| OnceLock::new()).collect(),
    };
    b.hhat_path_residual = b.cross_check_paths()?;
    if b.hhat_path_residual > F::of(HHAT_PATH_TOL) {
        return Err(Error::NumericalConsistency(format!(
            "ĥ paths disagree by {:e} (relative), above {HHAT_PATH_TOL:e}",
            b.hhat_path_residual
        )));
    }
    b.h_l1 = b.compute_h_l1()?;
    let (l1, radius) = b.compute_hhat_l1()?;
    b.hhat_l1 = l1;
    b.hhat_l1_radius = radius;
    Ok(b)
}

impl<F: Real> ProbeBundle<F> {
    /// g(t) = f(t) F̂_Λ(t).
    pub fn g(&self, t: F) -> F {
        self.probe.time_eval(t) * self.fejer.freq_eval(t)
    }

    /// h(t) = η(t) g(t); zero for |t| >= Λ.
    pub fn h(&self, t: F) -> F {
        if t.abs() >= self.lambda {
            return F::zero();
        }
        self.eta.time_eval(t) * self.g(t)
    }

    /// β₀ = F_Λ ∗ f̂, by quadrature over supp f̂.
    pub fn beta0(&self, xi: F) -> Result<F> {
        let q = Adaptive::new(F::of(1e-16), F::of(1e-13));
        let br = self.probe.freq_breaks();
        let v = q.integrate_pieces(
            |tau| (self.fejer.time_eval(xi - tau) + self.fejer.time_eval(xi + tau)) * self.probe.freq_eval(tau),
            &br,
        )?;
        Ok(v)
    }

    /// Half-width of supp h.
    pub fn h_support(&self) -> F {
        self.lambda
    }

    pub fn has_closed_form_convolution(&self) -> bool {
        matches!(self.convolver, Convolver::Triangle { .. } | Convolver::Flat)
    }

    /// ĥ by the cheaper of the two paths.
    pub fn hhat(&self, xi: F) -> F {
        if self.has_closed_form_convolution() {
            self.hhat_convolution(xi)
        } else {
            self.hhat_direct(xi)
        }
    }

    fn tier_nodes(&self, tier: usize) -> &[(F, F)] {
        self.tiers[tier].get_or_init(|| {
            composite_nodes(self.lambda, &self.kinks, 1 << tier)
                .into_iter()
                .map(|(t, w)| (t, F::of(2.0) * w * self.h(t)))
                .collect()
        })
    }

    /// ĥ(ξ) = 2∫₀^Λ h(t) cos(ξt) dt by composite Gauss–Legendre with at
    /// least one panel per half period.
    pub fn hhat_direct(&self, xi: F) -> F {
        let need = (xi.abs() * self.lambda / F::PI()).ceil().to_usize().unwrap_or(usize::MAX).saturating_add(2);
        let tier = need.next_power_of_two().trailing_zeros() as usize;
        let mut acc = Neumaier::new();
        if tier < TIERS {
            for &(t, c) in self.tier_nodes(tier) {
                acc.add(c * (xi * t).cos());
            }
        } else {
            for (t, w) in composite_nodes(self.lambda, &self.kinks, need) {
                acc.add(F::of(2.0) * w * self.h(t) * (xi * t).cos());
            }
        }
        acc.value()
    }

    /// P(ω) = (η̂ ∗ F_Λ)(ω) = 2∫₀^Λ η(t)(1 − t/Λ) cos(ωt) dt.
    pub fn eta_fejer_conv(&self, omega: F) -> F {
        let lam = self.lambda;
        match self.convolver {
            Convolver::Triangle { width } => {
                let [i0, i1, i2] = cos_moments(omega * lam);
                let r = lam / width;
                F::of(2.0) * lam * (i0 - (F::one() + r) * i1 + r * i2)
            }
            Convolver::Flat => F::two_pi() * self.fejer.time_eval(omega),
            Convolver::Spectral => {
                let band = self.eta.freq_half_support().expect("band-limited eta");
                let freq = self.eta.param("T").unwrap_or(F::one()).max(lam);
                let q = Adaptive::new(F::of(1e-15), F::of(1e-13));
                let mut total = F::zero();
                for (a, b) in [(-band, F::zero()), (F::zero(), band)] {
                    let v = q
                        .clone()
                        .for_frequency(freq, a, b)
                        .integrate(|tau| self.eta.freq_eval(tau) * self.fejer.time_eval(omega - tau), a, b)
                        .map(|r| r.value)
                        .unwrap_or_else(|_| F::nan());
                    total = total + v;
                }
                total
            }
            Convolver::TimeDomain => {
                let panels = (omega.abs() * lam / F::PI()).ceil().to_usize().unwrap_or(1) + 2;
                let mut acc = Neumaier::new();
                for (t, w) in composite_nodes(lam, &self.kinks, panels) {
                    acc.add(F::of(2.0) * w * self.eta.time_eval(t) * (F::one() - t / lam) * (omega * t).cos());
                }
                acc.value()
            }
        }
    }

    /// ĥ(ξ) = (2π)^{−1} (P ∗ f̂)(ξ), integrating over supp f̂.
    pub fn hhat_convolution(&self, xi: F) -> F {
        let rule = gl::<F>(16);
        let br = self.probe.freq_breaks();
        let mut acc = Neumaier::new();
        for w in br.windows(2) {
            let width = w[1] - w[0];
            let panels = (F::of(2.0) * width * self.lambda / F::PI()).ceil().to_usize().unwrap_or(1).max(1);
            let pw = width / F::of_usize(panels);
            for j in 0..panels {
                let a = w[0] + pw * F::of_usize(j);
                for (tau, wt) in rule.mapped(a, a + pw) {
                    let p = self.eta_fejer_conv(xi - tau) + self.eta_fejer_conv(xi + tau);
                    acc.add(wt * p * self.probe.freq_eval(tau));
                }
            }
        }
        acc.value() / F::two_pi()
    }

    fn cross_check_paths(&self) -> Result<F> {
        let top = F::of(64.0) * F::PI() / self.lambda;
        let n = 97;
        let rows: Vec<(F, F)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let xi = top * F::of_usize(i) / F::of_usize(n - 1);
                (self.hhat_direct(xi), self.hhat_convolution(xi))
            })
            .collect();
        let mut scale = F::zero();
        let mut worst = F::zero();
        for &(a, b) in &rows {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Numerical("non-finite ĥ sample".into()));
            }
            scale = scale.max(a.abs()).max(b.abs());
            worst = worst.max((a - b).abs());
        }
        Ok(if scale > F::zero() { worst / scale } else { worst })
    }

    fn compute_h_l1(&self) -> Result<F> {
        let mut br = vec![F::zero()];
        br.extend_from_slice(&self.kinks);
        br.push(self.lambda);
        let q = Adaptive::new(F::of(1e-16), F::of(1e-13)).with_initial_panels(8);
        Ok(F::of(2.0) * q.integrate_pieces(|t| self.h(t).abs(), &br)?)
    }

    /// One-sided derivative of h at `x` looking in direction `dir` (±1).
    fn h_slope(&self, x: F, dir: F) -> F {
        let step = self.lambda * F::of(1e-3) * dir;
        let f = |k: f64| self.h(x + step * F::of(k));
        (F::of(-25.0) * f(0.0) + F::of(48.0) * f(1.0) - F::of(36.0) * f(2.0) + F::of(16.0) * f(3.0)
            - F::of(3.0) * f(4.0))
            / (F::of(12.0) * step)
    }

    /// ‖ĥ‖₁ = 2∫₀^R |ĥ| + tail. Beyond R, ĥ(ξ) ≈ (2/ξ²)(a + b cos Λξ) with
    /// a = −h'(0+), b = h'(Λ−), so the two tails add 4·mean|a + b cos θ|/R.
    fn compute_hhat_l1(&self) -> Result<(F, F)> {
        let periods = if self.has_closed_form_convolution() { 2000.0 } else { 200.0 };
        let r = F::of(2.0 * periods) * F::PI() / self.lambda;
        let chunks = 64usize;
        let cw = r / F::of_usize(chunks);
        let step = F::PI() / (F::of(4.0) * self.lambda);
        let parts: Vec<Result<F>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let a = cw * F::of_usize(c);
                let q = Adaptive::new(F::of(1e-17), F::of(1e-12));
                abs_integral(|x| self.hhat(x), a, a + cw, step, &q)
            })
            .collect();
        let parts: Vec<F> = parts.into_iter().collect::<Result<_>>()?;
        let body = F::of(2.0) * pairwise_sum(&parts);

        let a = -self.h_slope(F::zero(), F::one());
        let b = self.h_slope(self.lambda, -F::one());
        let mean = mean_abs_affine_cos(a, b)?;
        Ok((body + F::of(4.0) * mean / r, r))
    }
}

/// (1/π)∫₀^π |a + b cos θ| dθ.
fn mean_abs_affine_cos<F: Real>(a: F, b: F) -> Result<F> {
    let q = Adaptive::new(F::of(1e-16), F::of(1e-13));
    let mut br = vec![F::zero()];
    if b != F::zero() && (a / b).abs() < F::one() {
        br.push((-a / b).acos());
    }
    br.push(F::PI());
    Ok(q.integrate_pieces(|th| (a + b * th.cos()).abs(), &br)? / F::PI())
}

/// Smoothed prime and zero densities on grids aligned with the integration
/// limits [log 2, T] and [−Ω, Ω].
#[derive(Debug, Clone)]
pub struct EfDensities<F> {
    pub nu: GriddedDensity<F>,
    pub mu: GriddedDensity<F>,
    pub t: F,
    pub omega: F,
}

impl<F: Real> EfDensities<F> {
    /// Densities with spacing Δ/`divisor` (64 meets the 1e-9 mass target).
    pub fn build(
        nu_atoms: &AtomicMeasure<F>,
        mu_atoms: &AtomicMeasure<F>,
        theta: &Kernel<F>,
        t: F,
        omega: F,
        divisor: usize,
    ) -> Result<Self> {
        let delta = theta
            .time_half_support()
            .filter(|_| theta.family() == KernelFamily::Mollifier)
            .ok_or_else(|| Error::InvalidArgument("expected a mollifier".into()))?;
        let step = delta / F::of_usize(divisor.max(8));
        let ng = GridSpec::aligned(F::LN_2(), t.max(F::LN_2() + step), delta, step)?;
        let mg = GridSpec::aligned(-omega, omega, delta, step)?;
        Ok(Self {
            nu: smooth_measure(nu_atoms, theta, &ng)?,
            mu: smooth_measure(mu_atoms, theta, &mg)?,
            t,
            omega,
        })
    }
}

/// Weight of a node for an integral restricted to [a, b]: 1 inside, ½ at a
/// node coinciding with an end, 0 outside.
fn indicator<F: Real>(x: F, a: F, b: F, h: F) -> F {
    let eps = h * F::of(1e-6);
    if (x - a).abs() <= eps || (x - b).abs() <= eps {
        F::of(0.5)
    } else if x > a && x < b {
        F::one()
    } else {
        F::zero()
    }
}

/// D = ∫ĥ dμ_Ω − ∫h dν_T, M = ∫ĥ n − ∫h m, E = D − M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EFReport {
    pub pair_freq: f64,
    pub pair_time: f64,
    pub d: f64,
    pub m: f64,
    pub e: f64,
    /// ∫ĥ b − ∫h a on the density grids.
    pub e_direct: f64,
    /// |e − e_direct| / max(|e|, |e_direct|).
    pub e_route_gap: f64,
    pub e_ratio: f64,
    pub h_l1: f64,
    pub hhat_l1: f64,
    /// Mass of the smoothed zero measure outside [−Ω, Ω].
    pub mu_spill: f64,
    /// Mass of the smoothed prime measure outside [log 2, T].
    pub nu_spill: f64,
}

/// The explicit-formula difference and its decomposition.
#[allow(clippy::too_many_arguments)]
pub fn ef_difference<F: Real>(
    bundle: &ProbeBundle<F>,
    nu_atoms: &AtomicMeasure<F>,
    mu_atoms: &AtomicMeasure<F>,
    theta: &Kernel<F>,
    t: F,
    omega: F,
    dens: &EfDensities<F>,
) -> Result<EFReport> {
    let rule = MollifierRule::new(theta)?;
    let pair_freq = pair_with_rule(&|x| bundle.hhat(x), mu_atoms, &rule, None)?;
    let pair_time = pair_with_rule(&|x| bundle.h(x), nu_atoms, &rule, Some(bundle.lambda))?;
    let d = pair_freq - pair_time;

    let tp = F::two_pi();
    let m_freq = if omega > tp {
        let q = Adaptive::new(F::of(1e-15), F::of(1e-12)).for_frequency(bundle.lambda, tp, omega);
        F::of(2.0) * q.integrate(|g| bundle.hhat(g) * main_n(g), tp, omega)?.value
    } else {
        F::zero()
    };
    let upper = t.min(bundle.lambda);
    let m_time = if upper > F::LN_2() {
        Adaptive::new(F::of(1e-15), F::of(1e-12))
            .with_initial_panels(8)
            .integrate(|x| bundle.h(x) * main_m(x), F::LN_2(), upper)?
            .value
    } else {
        F::zero()
    };
    let m = m_freq - m_time;
    let e = d - m;

    let hn = dens.nu.spacing();
    let time_part = dens.nu.trapezoid_map(|v, x| {
        let hv = bundle.h(x);
        if hv == F::zero() {
            F::zero()
        } else {
            hv * (v - main_m(x) * indicator(x, F::LN_2(), t, hn))
        }
    });
    let hm = dens.mu.spacing();
    let freq_vals: Vec<F> = dens.mu.grid.nodes().collect::<Vec<_>>().par_iter().map(|&g| bundle.hhat(g)).collect();
    let freq_part = {
        let n = dens.mu.grid.n;
        let terms: Vec<F> = (0..n)
            .map(|i| {
                let g = dens.mu.grid.node(i);
                let w = if i == 0 || i + 1 == n { F::of(0.5) } else { F::one() };
                w * freq_vals[i] * (dens.mu.values[i] - main_n(g) * indicator(g, -omega, omega, hm))
            })
            .collect();
        hm * pairwise_sum(&terms)
    };
    let e_direct = freq_part - time_part;

    let spill = |dd: &GriddedDensity<F>, a: F, b: F| -> f64 {
        let h = dd.spacing();
        dd.trapezoid_map(|v, x| v * (F::one() - indicator(x, a, b, h))).to_f64_lossy()
    };
    let lt = t.ln();
    let (h_l1, hhat_l1) = (bundle.h_l1.to_f64_lossy(), bundle.hhat_l1.to_f64_lossy());
    let e64 = e.to_f64_lossy();
    let ed = e_direct.to_f64_lossy();
    let denom = e64.abs().max(ed.abs());
    Ok(EFReport {
        pair_freq: pair_freq.to_f64_lossy(),
        pair_time: pair_time.to_f64_lossy(),
        d: d.to_f64_lossy(),
        m: m.to_f64_lossy(),
        e: e64,
        e_direct: ed,
        e_route_gap: if denom > 0.0 { (e64 - ed).abs() / denom } else { 0.0 },
        e_ratio: e64.abs() / ((h_l1 + hhat_l1) * (lt * lt).to_f64_lossy()),
        h_l1,
        hhat_l1,
        mu_spill: spill(&dens.mu, -omega, omega),
        nu_spill: spill(&dens.nu, F::LN_2(), t),
    })
}
