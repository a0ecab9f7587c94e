//! Even kernels with paired time- and frequency-side evaluators.
//!
//! Transforms use k̂(ξ) = ∫ k(t) e^{−iξt} dt, so for even k the pair is
//! k̂(ξ) = 2∫₀^∞ k(t) cos(ξt) dt and k(t) = π^{−1}∫₀^∞ k̂(ξ) cos(ξt) dξ.

mod beurling;
mod ft_check;
mod probe;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use beurling::{beurling, selberg_majorant, selberg_majorant_transform};
pub use ft_check::{forward_transform, inverse_transform, numeric_ft_check};
pub use probe::Probe;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{tanh_sinh, Adaptive};
use crate::scalar::Real;
use crate::special::sinc;

/// ∫_{−1}^{1} exp(−1/(1−u²)) du.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Mollifier,
    Fejer,
    TrianglePd,
    Selberg,
    Tukey,
    FejerProbe,
    TriangleBump,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            Self::Mollifier => "mollifier",
            Self::Fejer => "fejer",
            Self::TrianglePd => "triangle_pd",
            Self::Selberg => "selberg",
            Self::Tukey => "tukey",
            Self::FejerProbe => "fejer_probe",
            Self::TriangleBump => "triangle_bump",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three η constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaFamily {
    /// (1 − |t|/(C·T))₊, nonnegative transform.
    TrianglePd,
    /// Exact plateau on [−T, T] with a raised-cosine taper of width W.
    Tukey,
    /// Selberg majorant of the indicator of [−T, T], exponential type 2πδ.
    Selberg,
}

impl EtaFamily {
    pub fn default_param(self) -> f64 {
        match self {
            Self::TrianglePd => 10.0,
            Self::Tukey => 2.0,
            Self::Selberg => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::TrianglePd => "triangle_pd",
            Self::Tukey => "tukey",
            Self::Selberg => "selberg",
        }
    }
}

impl FromStr for EtaFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "triangle" | "triangle_pd" => Ok(Self::TrianglePd),
            "tukey" => Ok(Self::Tukey),
            "selberg" => Ok(Self::Selberg),
            other => Err(invalid("family", format!("unknown eta family `{other}`"))),
        }
    }
}

impl fmt::Display for EtaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape<F> {
    Mollifier { delta: F },
    /// Frequency side `(1 − |ξ|/band)₊`, time side `(band/2π) sinc²(band·t/2)`.
    Fejer { band: F },
    Triangle { width: F },
    Tukey { plateau: F, taper: F },
    Selberg { half_width: F, delta: F },
}

/// An even real kernel. Immutable; evaluators are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<F> {
    family: KernelFamily,
    shape: Shape<F>,
    amplitude: F,
    params: Vec<(&'static str, F)>,
}

fn positive<F: Real>(name: &'static str, v: F) -> Result<()> {
    if v.is_finite() && v > F::zero() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// θ_Δ: smooth compactly supported bump of unit mass on [−Δ, Δ].
pub fn make_mollifier<F: Real>(delta: F) -> Result<Kernel<F>> {
    positive("delta", delta)?;
    Ok(Kernel {
        family: KernelFamily::Mollifier,
        shape: Shape::Mollifier { delta },
        amplitude: F::one(),
        params: vec![("delta", delta)],
    })
}

/// Fejér kernel F_Λ with F̂_Λ(τ) = (1 − |τ|/Λ)₊.
pub fn make_fejer<F: Real>(lambda: F) -> Result<Kernel<F>> {
    positive("lambda", lambda)?;
    Ok(Kernel {
        family: KernelFamily::Fejer,
        shape: Shape::Fejer { band: lambda },
        amplitude: F::one(),
        params: vec![("lambda", lambda)],
    })
}

/// η of the given family at scale `t` with the family's parameter
/// (C for triangle_pd, W for tukey, δ for selberg).
pub fn make_eta<F: Real>(family: EtaFamily, t: F, param: F) -> Result<Kernel<F>> {
    positive("T", t)?;
    match family {
        EtaFamily::TrianglePd => {
            positive("C", param)?;
            Ok(Kernel {
                family: KernelFamily::TrianglePd,
                shape: Shape::Triangle { width: param * t },
                amplitude: F::one(),
                params: vec![("T", t), ("C", param)],
            })
        }
        EtaFamily::Tukey => {
            positive("W", param)?;
            Ok(Kernel {
                family: KernelFamily::Tukey,
                shape: Shape::Tukey { plateau: t, taper: param },
                amplitude: F::one(),
                params: vec![("T", t), ("W", param)],
            })
        }
        EtaFamily::Selberg => {
            positive("delta", param)?;
            Ok(Kernel {
                family: KernelFamily::Selberg,
                shape: Shape::Selberg { half_width: t, delta: param },
                amplitude: F::one(),
                params: vec![("T", t), ("delta", param)],
            })
        }
    }
}

/// Probe f = A·F_β with β = beta_scale/T² and A = T/beta_scale, so that
/// ‖f̂‖₁ = A·β = 1/T.
pub fn make_probe<F: Real>(t: F, beta_scale: F) -> Result<Kernel<F>> {
    positive("T", t)?;
    positive("beta_scale", beta_scale)?;
    let beta = beta_scale / (t * t);
    let amplitude = t / beta_scale;
    Ok(Kernel {
        family: KernelFamily::FejerProbe,
        shape: Shape::Fejer { band: beta },
        amplitude,
        params: vec![("T", t), ("beta", beta), ("amplitude", amplitude)],
    })
}

/// Calibration bump with ĥ₀(ξ) = ξ₀^{−1}(1 − |ξ|/ξ₀)₊ and ∫ĥ₀ = 1.
pub fn make_bump<F: Real>(xi0: F) -> Result<Kernel<F>> {
    positive("xi0", xi0)?;
    let amplitude = F::one() / xi0;
    Ok(Kernel {
        family: KernelFamily::TriangleBump,
        shape: Shape::Fejer { band: xi0 },
        amplitude,
        params: vec![("xi0", xi0), ("amplitude", amplitude)],
    })
}

impl<F: Real> Kernel<F> {
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn params(&self) -> &[(&'static str, F)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<F> {
        self.params.iter().find(|(k, _)| *k == name).map(|p| p.1)
    }

    pub fn amplitude(&self) -> F {
        self.amplitude
    }

    /// The same kernel multiplied by `factor`.
    pub fn scaled(&self, factor: F) -> Self {
        let mut k = self.clone();
        k.amplitude = k.amplitude * factor;
        if let Some(p) = k.params.iter_mut().find(|(n, _)| *n == "amplitude") {
            p.1 = k.amplitude;
        } else if factor != F::one() {
            k.params.push(("amplitude", k.amplitude));
        }
        k
    }

    pub fn time_eval(&self, t: F) -> F {
        let x = t.abs();
        let v = match self.shape {
            Shape::Mollifier { delta } => {
                let u = x / delta;
                if u >= F::one() {
                    F::zero()
                } else {
                    let e = (-F::one() / (F::one() - u * u)).exp();
                    e / (F::of(BUMP_MASS) * delta)
                }
            }
            Shape::Fejer { band } => {
                let s = sinc(band * x / F::of(2.0));
                band / F::two_pi() * s * s
            }
            Shape::Triangle { width } => (F::one() - x / width).max(F::zero()),
            Shape::Tukey { plateau, taper } => {
                if x <= plateau {
                    F::one()
                } else if x >= plateau + taper {
                    F::zero()
                } else {
                    let phase = F::PI() * (x - plateau) / taper;
                    (F::one() + phase.cos()) / F::of(2.0)
                }
            }
            Shape::Selberg { half_width, delta } => selberg_majorant(x, half_width, delta),
        };
        self.amplitude * v
    }

    pub fn freq_eval(&self, xi: F) -> F {
        let x = xi.abs();
        let v = match self.shape {
            Shape::Mollifier { delta } => mollifier_transform(delta * x),
            Shape::Fejer { band } => (F::one() - x / band).max(F::zero()),
            Shape::Triangle { width } => {
                let s = sinc(width * x / F::of(2.0));
                width * s * s
            }
            Shape::Tukey { plateau, taper } => {
                let l = plateau + taper / F::of(2.0);
                let p = F::PI();
                let y = x * taper;
                // π² cos(y/2)/(π² − y²), written without the removable poles at y = ±π
                let window = p * p * sinc((p - y) / F::of(2.0)) / (F::of(2.0) * (p + y));
                F::of(2.0) * l * sinc(l * x) * window
            }
            Shape::Selberg { half_width, delta } => selberg_majorant_transform(x, half_width, delta),
        };
        self.amplitude * v
    }

    /// Symmetric interval outside of which `time_eval` vanishes.
    pub fn time_support(&self) -> Option<(F, F)> {
        self.time_half_support().map(|s| (-s, s))
    }

    /// Symmetric interval outside of which `freq_eval` vanishes.
    pub fn freq_support(&self) -> Option<(F, F)> {
        self.freq_half_support().map(|s| (-s, s))
    }

    pub fn time_half_support(&self) -> Option<F> {
        match self.shape {
            Shape::Mollifier { delta } => Some(delta),
            Shape::Triangle { width } => Some(width),
            Shape::Tukey { plateau, taper } => Some(plateau + taper),
            Shape::Fejer { .. } | Shape::Selberg { .. } => None,
        }
    }

    pub fn freq_half_support(&self) -> Option<F> {
        match self.shape {
            Shape::Fejer { band } => Some(band),
            Shape::Selberg { delta, .. } => Some(F::two_pi() * delta),
            _ => None,
        }
    }

    /// Whether the frequency side is nonnegative by construction (and the
    /// amplitude is nonnegative).
    pub fn freq_nonneg(&self) -> bool {
        let shape_ok = matches!(self.shape, Shape::Fejer { .. } | Shape::Triangle { .. });
        shape_ok && self.amplitude >= F::zero()
    }

    /// Points in (0, support) where the time side is not smooth.
    pub fn time_kinks(&self) -> Vec<F> {
        match self.shape {
            Shape::Tukey { plateau, .. } => vec![plateau],
            _ => Vec::new(),
        }
    }

    /// ∫ k̂ = 2π k(0).
    pub fn freq_integral(&self) -> F {
        F::two_pi() * self.time_eval(F::zero())
    }

    /// Derivative of the mollifier profile; `None` for other families.
    pub fn mollifier_derivative(&self, t: F) -> Option<F> {
        let Shape::Mollifier { delta } = self.shape else {
            return None;
        };
        let u = t / delta;
        if u.abs() >= F::one() {
            return Some(F::zero());
        }
        let d = F::one() - u * u;
        let theta = (-F::one() / d).exp() / F::of(BUMP_MASS);
        Some(self.amplitude * theta * (-F::of(2.0) * u / (d * d)) / (delta * delta))
    }
}

/// θ̂(ω) = 2∫₀¹ θ(u) cos(ωu) du for the unit-scale bump.
fn mollifier_transform<F: Real>(omega: F) -> F {
    let profile = |u: F| {
        let d = F::one() - u * u;
        if d <= F::zero() {
            F::zero()
        } else {
            (-F::one() / d).exp() * (omega * u).cos()
        }
    };
    let raw = if omega <= F::of(24.0) {
        tanh_sinh(profile, F::zero(), F::one(), F::of(1e-15))
    } else {
        Adaptive::new(F::of(1e-15), F::of(1e-13))
            .for_frequency(omega, F::zero(), F::one())
            .integrate(profile, F::zero(), F::one())
            .map(|q| q.value)
    };
    // both integrators converge on this smooth, flat-ended integrand
    F::of(2.0) * raw.unwrap_or_else(|_| F::nan()) / F::of(BUMP_MASS)
}

/// ‖θ'_Δ‖₁ by adaptive quadrature of |θ'_Δ|.
pub fn mollifier_derivative_l1<F: Real>(theta: &Kernel<F>) -> Result<F> {
    let delta = theta
        .param("delta")
        .filter(|_| theta.family == KernelFamily::Mollifier)
        .ok_or_else(|| Error::InvalidArgument("not a mollifier".into()))?;
    let q = Adaptive::new(F::of(1e-14), F::of(1e-13)).with_initial_panels(16);
    let half = q.integrate(
        |t| theta.mollifier_derivative(t).unwrap_or_else(F::zero).abs(),
        F::zero(),
        delta,
    )?;
    Ok(F::of(2.0) * half.value)
}

#[cfg(test)]
mod tests;
