//! Uniform deviation of empirical pattern frequencies.
//!
//! For a finite index set `S` with `k = max S − min S`, the frequency of a
//! pattern `σ` is `r̂(σ) = N_S(σ) / (n − k + 2)`, where `N_S(σ)` counts the
//! shifts of `S` inside `[1, n]` that read `σ`. Under a memory-decay constant
//! `Γ > 0`,
//!
//! `P( sup_σ |r̂(σ) − P(X_S = σ)| > u + √((2|S|(1−Γ) + Γ) / (Γ(n−k+2))) )
//!   ≤ exp(−2(n−k+2) Γ² u² / |S|²)`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ExactLaw;
use crate::series::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DkwBound {
    pub threshold: f64,
    pub tail: f64,
}

/// Threshold and tail probability of the deviation inequality for `u ≥ 0`.
pub fn dkw_bound(u: f64, n: usize, k: usize, s_size: usize, gamma: f64) -> Result<DkwBound> {
    if u.is_nan() || u < 0.0 {
        return Err(Error::InvalidArgument(format!("u must be non-negative, got {u}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("Γ must lie in (0, 1], got {gamma}")));
    }
    if s_size == 0 || k > n {
        return Err(Error::InvalidArgument("need |S| ≥ 1 and k ≤ n".into()));
    }
    let m = (n - k + 2) as f64;
    let s = s_size as f64;
    let threshold = u + ((2.0 * s * (1.0 - gamma) + gamma) / (gamma * m)).sqrt();
    let tail = (-2.0 * m * gamma * gamma * u * u / (s * s)).exp();
    Ok(DkwBound { threshold, tail })
}

/// The `u` that sets the tail to `ε / (2β)`:
/// `u = (K/Γ) √(log(2β/ε) / (2(n − L + 2)))`, or 0 when `2β ≤ ε`.
pub fn dkw_u(epsilon: f64, beta: f64, gamma: f64, k: usize, n: usize, l: usize) -> f64 {
    let log = (2.0 * beta / epsilon).ln();
    if log.is_nan() || log <= 0.0 || n + 2 <= l {
        return 0.0;
    }
    k as f64 / gamma * (log / (2.0 * (n + 2 - l) as f64)).sqrt()
}

/// `sup_σ |r̂(σ) − P(X_S = σ)|` over patterns observed in `sample` or charged
/// by `law`. `law` must be over `S` itself, or over a superset of `S`.
pub fn empirical_sup_deviation(sample: &Sample, s: &[i64], law: &ExactLaw) -> Result<f64> {
    let mut set = s.to_vec();
    set.sort_unstable();
    set.dedup();
    let (Some(&lo), Some(&hi)) = (set.first(), set.last()) else {
        return Err(Error::InvalidArgument("S must be non-empty".into()));
    };
    let law = if law.positions() == set.as_slice() { law.clone() } else { law.marginal(&set)? };
    let k = (hi - lo) as usize;
    let n = sample.len();
    if n < k + 1 {
        return Err(Error::InvalidArgument(format!("sample of length {n} is shorter than diam(S) + 1 = {}", k + 1)));
    }
    let offsets: Vec<usize> = set.iter().map(|x| (x - lo) as usize).collect();
    let a = law.alphabet();
    let xs = sample.symbols();
    let mut dense = vec![0u64; law.probs().len()];
    let mut outside: HashMap<Vec<u32>, u64> = HashMap::new();
    for i in 0..=(n - k - 1) {
        if offsets.iter().all(|&o| xs[i + o].id() < a) {
            let idx = offsets.iter().fold(0usize, |acc, &o| acc * a + xs[i + o].id());
            dense[idx] += 1;
        } else {
            *outside.entry(offsets.iter().map(|&o| xs[i + o].0).collect()).or_default() += 1;
        }
    }
    let norm = (n - k + 2) as f64;
    let inside = dense.iter().zip(law.probs()).map(|(&c, &p)| (c as f64 / norm - p).abs());
    let beyond = outside.values().map(|&c| c as f64 / norm);
    Ok(inside.chain(beyond).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{exact_finite_law, Iid, ProcessModel};

    #[test]
    fn bound_examples() {
        let b = dkw_bound(0.1, 1002, 2, 2, 0.5).unwrap();
        let m: f64 = 1002.0 - 2.0 + 2.0;
        let oracle_threshold = 0.1 + ((2.0 * 2.0 * 0.5 + 0.5) / (0.5 * m)).sqrt();
        let oracle_tail = (-2.0 * m * 0.25 * 0.01 / 4.0).exp();
        assert!((b.threshold - oracle_threshold).abs() < 1e-15);
        assert!((b.tail - oracle_tail).abs() < 1e-15);
        assert!((b.threshold - 0.17064).abs() < 1e-5);
        assert!((b.tail - 0.2858).abs() < 1e-4);

        let b = dkw_bound(0.1, 100, 1, 1, 1.0).unwrap();
        assert!((b.tail - (-2.0f64 * 101.0 * 0.01).exp()).abs() < 1e-15);
        assert!((b.tail - 0.1327).abs() < 1e-4);
        assert!(dkw_bound(1e3, 100, 1, 1, 1.0).unwrap().tail < 1e-300);
    }

    #[test]
    fn tail_monotonicity() {
        let base = dkw_bound(0.1, 500, 2, 2, 0.4).unwrap().tail;
        assert!(dkw_bound(0.2, 500, 2, 2, 0.4).unwrap().tail < base);
        assert!(dkw_bound(0.1, 600, 2, 2, 0.4).unwrap().tail < base);
        assert!(dkw_bound(0.1, 500, 2, 2, 0.5).unwrap().tail < base);
        assert!(dkw_bound(0.1, 500, 2, 3, 0.4).unwrap().tail > base);
    }

    #[test]
    fn constant_sample_deviation() {
        let law = exact_finite_law(&ProcessModel::Iid(Iid::new(vec![0.5, 0.5]).unwrap()), &[1]).unwrap();
        let n = 1000;
        let sample = Sample::from_ids(&vec![0; n]).unwrap();
        let dev = empirical_sup_deviation(&sample, &[1], &law).unwrap();
        // r̂(0) = n / (n + 2) and r̂(1) = 0, so symbol 1 attains |0 − 0.5|
        assert_eq!(dev, 0.5);
        assert!(dev <= 1.0);
        let wild = Sample::from_ids(&[7, 7, 7]).unwrap();
        assert!((empirical_sup_deviation(&wild, &[1], &law).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn u_matches_tail() {
        let (eps, beta, gamma, k, n, l) = (0.1, 0.3, 0.3, 2, 5000, 2);
        let u = dkw_u(eps, beta, gamma, k, n, l);
        let tail = dkw_bound(u, n, l, k, gamma).unwrap().tail;
        assert!((tail - eps / (2.0 * beta)).abs() < 1e-12);
        assert_eq!(dkw_u(0.7, 0.3, 0.3, 2, 5000, 2), 0.0);
    }
}
