//! Probes: finite sums of band-limited kernels, f = Σ parts.

use super::Kernel;
use crate::error::{Error, Result};
use crate::quadrature::Adaptive;
use crate::scalar::Real;
use crate::summation::neumaier_sum;

/// An even probe given as a sum of kernels with compact frequency support.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe<F> {
    parts: Vec<Kernel<F>>,
}

impl<F: Real> From<Kernel<F>> for Probe<F> {
    fn from(k: Kernel<F>) -> Self {
        Self { parts: vec![k] }
    }
}

impl<F: Real> Probe<F> {
    pub fn new(k: Kernel<F>) -> Result<Self> {
        if k.freq_half_support().is_none() {
            return Err(Error::InvalidArgument(format!(
                "probe parts must be band-limited, {} is not",
                k.family()
            )));
        }
        Ok(Self { parts: vec![k] })
    }

    /// `self + c·k`.
    pub fn plus(&self, k: &Kernel<F>, c: F) -> Result<Self> {
        if k.freq_half_support().is_none() {
            return Err(Error::InvalidArgument(format!("{} is not band-limited", k.family())));
        }
        let mut out = self.clone();
        if c != F::zero() {
            out.parts.push(k.scaled(c));
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: F) -> Self {
        Self {
            parts: self.parts.iter().map(|k| k.scaled(factor)).collect(),
        }
    }

    pub fn parts(&self) -> &[Kernel<F>] {
        &self.parts
    }

    pub fn time_eval(&self, t: F) -> F {
        neumaier_sum(self.parts.iter().map(|k| k.time_eval(t)))
    }

    pub fn freq_eval(&self, xi: F) -> F {
        neumaier_sum(self.parts.iter().map(|k| k.freq_eval(xi)))
    }

    pub fn freq_half_support(&self) -> F {
        self.parts
            .iter()
            .filter_map(|k| k.freq_half_support())
            .fold(F::zero(), F::max)
    }

    /// 0 and every part's band edge, ascending: f̂ is smooth between them.
    pub fn freq_breaks(&self) -> Vec<F> {
        let mut b: Vec<F> = std::iter::once(F::zero())
            .chain(self.parts.iter().filter_map(|k| k.freq_half_support()))
            .collect();
        b.sort_by(|x, y| x.partial_cmp(y).expect("finite supports"));
        b.dedup();
        b
    }

    /// True when every part has a nonnegative spectrum.
    pub fn freq_nonneg(&self) -> bool {
        self.parts.iter().all(|k| k.freq_nonneg())
    }

    /// S = ‖f̂‖₁: exact (Σ 2π·part(0)) when every part is nonnegative,
    /// adaptive quadrature of |f̂| otherwise.
    pub fn freq_l1(&self) -> Result<F> {
        if self.freq_nonneg() {
            return Ok(neumaier_sum(self.parts.iter().map(|k| k.freq_integral())));
        }
        let q = Adaptive::new(F::of(1e-15), F::of(1e-13)).with_initial_panels(8);
        let half = q.integrate_pieces(|x| self.freq_eval(x).abs(), &self.freq_breaks())?;
        Ok(F::of(2.0) * half)
    }

    /// Minimum of f̂ over `n` uniform samples of [−B, B], B the band.
    pub fn freq_min(&self, n: usize) -> F {
        let b = self.freq_half_support();
        let n = n.max(2);
        (0..n)
            .map(|i| -b + F::of(2.0) * b * F::of_usize(i) / F::of_usize(n - 1))
            .map(|x| self.freq_eval(x))
            .fold(F::infinity(), F::min)
    }
}
