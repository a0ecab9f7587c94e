//! Segmented sieve of Eratosthenes and prime-power enumeration.

use rayon::prelude::*;

const SEGMENT: u64 = 1 << 18;

/// Primes up to `limit` by a plain sieve.
fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// All primes `p <= limit`, ascending. Segments hold odd numbers only, are
/// sieved in parallel and concatenated in order.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let root = isqrt(limit);
    let base = small_primes(root);
    let segments = (limit - 1).div_ceil(SEGMENT);
    let parts: Vec<Vec<u64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 2 + s * SEGMENT;
            let hi = (lo + SEGMENT - 1).min(limit);
            let mut out = Vec::new();
            if lo == 2 {
                out.push(2);
            }
            // slot i holds first + 2i
            let first = lo | 1;
            if first > hi {
                return out;
            }
            let mut composite = vec![false; ((hi - first) / 2 + 1) as usize];
            for &p in base.iter().skip(1) {
                if p * p > hi {
                    break;
                }
                let mut start = (first.div_ceil(p) * p).max(p * p);
                if start % 2 == 0 {
                    start += p;
                }
                let mut i = ((start - first) / 2) as usize;
                let step = p as usize;
                while i < composite.len() {
                    composite[i] = true;
                    i += step;
                }
            }
            out.extend(
                composite
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| !c)
                    .map(|(i, _)| first + 2 * i as u64),
            );
            out
        })
        .collect();
    parts.concat()
}

/// Every prime power `p^k <= limit` as `(p^k, k)`, ascending in `p^k`.
pub fn prime_powers_up_to(limit: u64) -> Vec<(u64, u32)> {
    let primes = primes_up_to(limit);
    let mut higher = Vec::new();
    for &p in &primes {
        let Some(mut q) = p.checked_mul(p) else { break };
        if q > limit {
            break;
        }
        let mut k = 2;
        while q <= limit {
            higher.push((q, k));
            k += 1;
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
        }
    }
    higher.sort_unstable_by_key(|e| e.0);
    let mut out = Vec::with_capacity(primes.len() + higher.len());
    let mut rest = higher.into_iter().peekable();
    for p in primes {
        while let Some(&e) = rest.peek().filter(|e| e.0 < p) {
            out.push(e);
            rest.next();
        }
        out.push((p, 1));
    }
    out.extend(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!(primes_up_to(1).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(
            prime_powers_up_to(10),
            vec![(2, 1), (3, 1), (4, 2), (5, 1), (7, 1), (8, 3), (9, 2)]
        );
    }

    #[test]
    fn prime_count_across_segment_boundaries() {
        // π(10^6) = 78498, π(2^20) = 82025
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
        assert_eq!(primes_up_to(1 << 20).len(), 82_025);
        for n in [SEGMENT, SEGMENT + 1, 3 * SEGMENT + 7] {
            assert_eq!(primes_up_to(n), small_primes(n));
        }
    }

    #[test]
    fn isqrt_is_exact() {
        for n in [0u64, 1, 3, 4, 15, 16, 17, 1 << 40, (1 << 40) - 1] {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }
}
