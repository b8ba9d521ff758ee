//! Kullback–Leibler divergence and its chi-square upper bound.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KlChi2 {
    /// `Σ P log(P/Q)` with `0 log(0/q) = 0`.
    pub kl: f64,
    /// `Σ (P − Q)² / Q` with `0/0 = 0`.
    pub chi2: f64,
}

/// `KL(P‖Q)` and the bound `χ²(P‖Q) ≥ KL(P‖Q)`. Distributions are indexed by
/// symbol id; a shorter vector is padded with zeros.
pub fn kl_chi2(p: &[f64], q: &[f64]) -> Result<KlChi2> {
    if p.iter().chain(q).any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidArgument("masses must be finite and non-negative".into()));
    }
    let mut kl = 0.0;
    let mut chi2 = 0.0;
    for i in 0..p.len().max(q.len()) {
        let pi = p.get(i).copied().unwrap_or(0.0);
        let qi = q.get(i).copied().unwrap_or(0.0);
        if qi == 0.0 {
            if pi > 0.0 {
                return Err(Error::NotAbsolutelyContinuous(i));
            }
            continue;
        }
        if pi > 0.0 {
            kl += pi * (pi / qi).ln();
        }
        chi2 += (pi - qi) * (pi - qi) / qi;
    }
    debug_assert!(kl <= chi2 + 1e-12, "KL {kl} exceeds chi-square {chi2}");
    Ok(KlChi2 { kl, chi2 })
}
