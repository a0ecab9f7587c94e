//! Deterministic compensated reductions.
//!
//! Every reduction in the crate goes through this module so that results are
//! independent of thread count: inputs are cut into fixed-size blocks, each
//! block is reduced with Neumaier compensation, and block partials are combined
//! pairwise in index order.

use rayon::prelude::*;

use crate::scalar::Real;

const BLOCK: usize = 256;

/// Running Neumaier (improved Kahan) accumulator.
#[derive(Debug, Clone, Copy)]
pub struct Neumaier<F> {
    sum: F,
    comp: F,
}

impl<F: Real> Default for Neumaier<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Real> Neumaier<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            comp: F::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> F {
        self.sum + self.comp
    }
}

/// Neumaier sum of an iterator, in iteration order.
pub fn neumaier_sum<F: Real, I: IntoIterator<Item = F>>(it: I) -> F {
    let mut acc = Neumaier::new();
    for x in it {
        acc.add(x);
    }
    acc.value()
}

/// Pairwise sum with compensated leaves.
pub fn pairwise_sum<F: Real>(xs: &[F]) -> F {
    if xs.len() <= BLOCK {
        return neumaier_sum(xs.iter().copied());
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Maps `f` over `items` in parallel and sums the results with a reduction
/// tree that depends only on `items.len()`.
pub fn par_map_sum<T, F, G>(items: &[T], f: G) -> F
where
    T: Sync,
    F: Real,
    G: Fn(&T) -> F + Sync,
{
    let partials: Vec<F> = items
        .par_chunks(BLOCK)
        .map(|chunk| neumaier_sum(chunk.iter().map(&f)))
        .collect();
    pairwise_sum(&partials)
}

/// Same as [`par_map_sum`] over the index range `0..n`.
pub fn par_index_sum<F, G>(n: usize, f: G) -> F
where
    F: Real,
    G: Fn(usize) -> F + Sync,
{
    let blocks = n.div_ceil(BLOCK);
    let partials: Vec<F> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            neumaier_sum((lo..hi).map(&f))
        })
        .collect();
    pairwise_sum(&partials)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_small_terms() {
        let xs = [1.0f64, 1e100, 1.0, -1e100];
        assert_eq!(neumaier_sum(xs.iter().copied()), 2.0);
    }

    #[test]
    fn pairwise_matches_exact_integer_sum() {
        let xs: Vec<f64> = (1..=10_000).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&xs), 50_005_000.0);
    }

    #[test]
    fn parallel_sum_is_thread_count_independent() {
        let xs: Vec<f64> = (0..100_000).map(|k| ((k as f64) * 0.37).sin() / (1.0 + k as f64)).collect();
        let a = par_map_sum(&xs, |x| *x);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| par_map_sum(&xs, |x| *x));
        assert_eq!(a.to_bits(), b.to_bits());
        let c = par_index_sum(xs.len(), |i| xs[i]);
        assert_eq!(a.to_bits(), c.to_bits());
    }

    #[test]
    fn works_in_single_precision() {
        let xs: Vec<f32> = vec![0.1; 1000];
        assert!((pairwise_sum(&xs) - 100.0).abs() < 1e-4);
    }
}
