//! Sample-size guarantees, rate regimes and the combined bound report.

use serde::Serialize;

use super::dkw::{dkw_bound, dkw_u};
use super::risk::{beta_from_table, beta_upper_bound, margin_from_table};
use crate::error::{Error, Result};
use crate::models::variation::DEFAULT_VARIATION_DEPTH;
use crate::models::{exact_finite_law, ProcessModel};
use crate::series::IndexPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SampleSizeBound {
    pub required_n: u64,
    /// `ε ≥ β`: the risk never exceeds `β`, so any sample with one window suffices.
    pub guaranteed: bool,
}

/// Smallest `n` meeting
/// `n ≥ 4/(ε/2 ∨ δ)² · ((K/Γ)² log(2β/ε) + 4K(1−Γ)/Γ + 2) + L − 2`,
/// which guarantees excess risk at most `ε ∧ β`.
pub fn sample_size_bound(epsilon: f64, delta: f64, beta: f64, gamma: f64, k: usize, l: usize) -> Result<SampleSizeBound> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {epsilon}")));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("Γ must lie in (0, 1], got {gamma}")));
    }
    if !(delta >= 0.0 && beta >= 0.0) {
        return Err(Error::InvalidArgument("δ and β must be non-negative".into()));
    }
    if k == 0 || l < k {
        return Err(Error::InvalidArgument(format!("need 1 ≤ K ≤ L, got K = {k}, L = {l}")));
    }
    if epsilon >= beta {
        return Ok(SampleSizeBound { required_n: (l - 1) as u64, guaranteed: true });
    }
    let m = (epsilon / 2.0).max(delta);
    let (kf, lf) = (k as f64, l as f64);
    let inner = (kf / gamma).powi(2) * (2.0 * beta / epsilon).ln() + 4.0 * kf * (1.0 - gamma) / gamma + 2.0;
    let n = (4.0 / (m * m) * inner + lf - 2.0).ceil();
    Ok(SampleSizeBound { required_n: n.max(0.0) as u64, guaranteed: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Margin vanishing faster than `√(log n / n)`: risk of order `√(log n / n)`.
    Subcritical,
    /// Margin large compared with `√(log n / n)`: exponentially small risk.
    Supercritical,
    /// A single model with a fixed positive margin.
    Fixed,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Supercritical => "supercritical",
            Regime::Fixed => "fixed",
        }
    }
}

/// `½ √(log n / n) ∧ β`.
pub fn subcritical_bound(n: usize, beta: f64) -> f64 {
    let n = n as f64;
    (0.5 * (n.ln() / n).sqrt()).min(beta)
}

/// `exp(−Γ² n δ_n² / (8K²)) ∧ β`.
pub fn supercritical_bound(delta_n: f64, n: usize, gamma: f64, k: usize, beta: f64) -> f64 {
    let k = k as f64;
    (-(gamma * gamma * n as f64 * delta_n * delta_n) / (8.0 * k * k)).exp().min(beta)
}

/// Classifies a finite `n` by `δ_n √(n / log n)` against 1 (below or equal:
/// subcritical) and returns the matching risk bound.
pub fn rate_regime_bound(delta_n: f64, n: usize, gamma: f64, k: usize, beta: f64) -> Result<(Regime, f64)> {
    if n < 2 {
        return Err(Error::InvalidArgument("rate regimes need n ≥ 2".into()));
    }
    let proxy = delta_n * (n as f64 / (n as f64).ln()).sqrt();
    if proxy <= 1.0 {
        Ok((Regime::Subcritical, subcritical_bound(n, beta)))
    } else {
        Ok((Regime::Supercritical, supercritical_bound(delta_n, n, gamma, k, beta)))
    }
}

/// Two-point minimax lower bound `e^{−1} n^{−1/2} 4^{−K}`.
pub fn minimax_root_n(n: usize, k: usize) -> f64 {
    (-1.0f64).exp() / (n as f64).sqrt() * 0.25f64.powi(k as i32)
}

/// Everything the theory says about one model, index pair and accuracy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub gamma: f64,
    pub delta: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub required_n: u64,
    pub guaranteed: bool,
    pub regime: Regime,
    /// `u` with tail `ε/(2β)` at `n = required_n`.
    pub dkw_u: f64,
    pub dkw_threshold: f64,
    pub dkw_tail: f64,
    /// Minimax lower bound `e^{−1} n^{−1/2} 4^{−K}` at `n = required_n`.
    pub lower_bound: f64,
    pub pbar: Option<f64>,
    pub beta_upper_bound: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

pub fn bound_report(model: &ProcessModel, pair: &IndexPair, epsilon: f64) -> Result<BoundReport> {
    let table = exact_finite_law(model, &pair.union())?.joint_table(pair)?;
    let delta = margin_from_table(&table).delta;
    let beta = beta_from_table(&table);
    let gamma = model.gamma(DEFAULT_VARIATION_DEPTH)?;
    if gamma.lower_bound <= 0.0 {
        return Err(Error::Divergent(format!("no positive lower bound on Γ ({:?})", gamma.status)));
    }
    let gamma = gamma.lower_bound;
    let (k, l) = (pair.size(), pair.span());
    let ss = sample_size_bound(epsilon, delta, beta, gamma, k, l)?;
    let n_eval = (ss.required_n as usize).max(l).max(2);
    let u = dkw_u(epsilon, beta, gamma, k, n_eval, l);
    let dkw = dkw_bound(u, n_eval, l, k, gamma)?;
    let pbar = model.pbar();
    Ok(BoundReport {
        gamma,
        delta,
        beta,
        epsilon,
        required_n: ss.required_n,
        guaranteed: ss.guaranteed,
        regime: if delta > 0.0 { Regime::Fixed } else { Regime::Subcritical },
        dkw_u: u,
        dkw_threshold: dkw.threshold,
        dkw_tail: dkw.tail,
        lower_bound: minimax_root_n(n_eval, k),
        pbar,
        beta_upper_bound: pbar.and_then(|p| beta_upper_bound(p, k).ok()),
        k,
        l,
    })
}
