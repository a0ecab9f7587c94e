//! Uniform grids and densities sampled on them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::summation::pairwise_sum;

/// `n` uniformly spaced nodes from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec<F> {
    pub lo: F,
    pub hi: F,
    pub n: usize,
}

impl<F: Real> GridSpec<F> {
    pub fn new(lo: F, hi: F, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs n >= 2 and lo < hi (got n={n}, lo={lo}, hi={hi})"
            )));
        }
        Ok(Self { lo, hi, n })
    }

    /// Smallest grid on `[lo, hi]` whose spacing does not exceed `max_step`.
    pub fn with_max_step(lo: F, hi: F, max_step: F) -> Result<Self> {
        let n = ((hi - lo) / max_step).ceil().to_usize().unwrap_or(0) + 1;
        Self::new(lo, hi, n.max(2))
    }

    /// Grid through both `a` and `b` (up to rounding) with spacing at most
    /// `max_step`, extended by at least `pad` on each side.
    pub fn aligned(a: F, b: F, pad: F, max_step: F) -> Result<Self> {
        if !(b > a) || !(max_step > F::zero()) || pad < F::zero() {
            return Err(Error::InvalidArgument(format!(
                "aligned grid needs a < b, positive step and pad >= 0 (a={a}, b={b}, step={max_step}, pad={pad})"
            )));
        }
        let k = ((b - a) / max_step).ceil().to_usize().unwrap_or(1).max(1);
        let h = (b - a) / F::of_usize(k);
        let p = (pad / h * (F::one() - F::of(1e-12))).ceil().to_usize().unwrap_or(0);
        let lo = a - h * F::of_usize(p);
        let hi = b + h * F::of_usize(p);
        Self::new(lo, hi, k + 2 * p + 1)
    }

    /// Index of the node nearest to `x`.
    pub fn nearest(&self, x: F) -> usize {
        let u = ((x - self.lo) / self.spacing()).round();
        u.max(F::zero()).to_usize().unwrap_or(0).min(self.n - 1)
    }

    #[inline]
    pub fn spacing(&self) -> F {
        (self.hi - self.lo) / F::of_usize(self.n - 1)
    }

    #[inline]
    pub fn node(&self, i: usize) -> F {
        if i + 1 == self.n {
            self.hi
        } else {
            self.lo + self.spacing() * F::of_usize(i)
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = F> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    pub fn contains(&self, x: F) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Linear interpolation of `values` (one per node) at `x`; `None` outside.
    pub fn interpolate(&self, values: &[F], x: F) -> Option<F> {
        if !self.contains(x) {
            return None;
        }
        let h = self.spacing();
        let u = (x - self.lo) / h;
        let i = u.floor().to_usize().unwrap_or(0).min(self.n - 2);
        let frac = u - F::of_usize(i);
        Some(values[i] + (values[i + 1] - values[i]) * frac)
    }
}

/// Density values on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedDensity<F> {
    pub grid: GridSpec<F>,
    pub values: Vec<F>,
}

impl<F: Real> GriddedDensity<F> {
    pub fn new(grid: GridSpec<F>, values: Vec<F>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidArgument(format!(
                "{} values for a {}-node grid",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn sample(grid: GridSpec<F>, f: impl Fn(F) -> F) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    pub fn spacing(&self) -> F {
        self.grid.spacing()
    }

    /// Trapezoid integral of `g(values[i], x_i)` over the whole grid.
    pub fn trapezoid_map(&self, g: impl Fn(F, F) -> F) -> F {
        let h = self.spacing();
        let n = self.grid.n;
        let terms: Vec<F> = (0..n)
            .map(|i| {
                let w = if i == 0 || i + 1 == n { F::of(0.5) } else { F::one() };
                w * g(self.values[i], self.grid.node(i))
            })
            .collect();
        h * pairwise_sum(&terms)
    }

    pub fn integral(&self) -> F {
        self.trapezoid_map(|v, _| v)
    }

    pub fn l1_norm(&self) -> F {
        self.trapezoid_map(|v, _| v.abs())
    }

    /// Trapezoid L¹ norm restricted to nodes inside `[a, b]`.
    pub fn l1_norm_on(&self, a: F, b: F) -> F {
        let h = self.spacing();
        let idx: Vec<usize> = (0..self.grid.n)
            .filter(|&i| {
                let x = self.grid.node(i);
                x >= a && x <= b
            })
            .collect();
        if idx.len() < 2 {
            return F::zero();
        }
        let terms: Vec<F> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| {
                let w = if k == 0 || k + 1 == idx.len() { F::of(0.5) } else { F::one() };
                w * self.values[i].abs()
            })
            .collect();
        h * pairwise_sum(&terms)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid
    }

    pub fn max_abs(&self) -> F {
        self.values.iter().fold(F::zero(), |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_grid_hits_both_ends() {
        let g = GridSpec::aligned(2f64.ln(), 10.0, 0.3, 0.004).unwrap();
        assert!(g.spacing() <= 0.004);
        assert!(g.lo <= 2f64.ln() - 0.3 && g.hi >= 10.0 + 0.3 - 1e-12);
        let i = g.nearest(2f64.ln());
        let j = g.nearest(10.0);
        assert!((g.node(i) - 2f64.ln()).abs() < 1e-12);
        assert!((g.node(j) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(GridSpec::new(0.0f64, 1.0, 1).is_err());
        assert!(GridSpec::new(1.0f64, 1.0, 5).is_err());
    }

    #[test]
    fn max_step_is_respected() {
        let g = GridSpec::with_max_step(0.0f64, 1.0, 0.3).unwrap();
        assert!(g.spacing() <= 0.3);
        assert_eq!(g.n, 5);
        assert_eq!(g.node(g.n - 1), 1.0);
    }

    #[test]
    fn trapezoid_of_linear_function_is_exact() {
        let g = GridSpec::new(0.0f64, 2.0, 11).unwrap();
        let d = GriddedDensity::sample(g, |x| 3.0 * x + 1.0);
        assert!((d.integral() - 8.0).abs() < 1e-14);
        assert_eq!(g.interpolate(&d.values, 1.05).map(|v| (v - 4.15).abs() < 1e-14), Some(true));
        assert_eq!(g.interpolate(&d.values, 2.5), None);
    }
}
