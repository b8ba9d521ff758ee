//! Lower bounds on `Γ` for one-dimensional Gibbs measures from the
//! oscillations `Δ(Φ_Λ) = max Φ_Λ − min Φ_Λ` of a translation-invariant
//! interaction potential.
//!
//! For `k ≥ 1`,
//! `Var_k ≤ b_k = (A/2) Σ_{i ≥ k} Σ_{min Λ = 0, max Λ ≥ i/2} Δ(Φ_Λ)`.
//! Grouping shapes by their diameter `ℓ = max Λ` with total oscillation
//! `w(ℓ)`, the double sum collapses to `T(k) = Σ_ℓ w(ℓ) (2ℓ − k + 1)⁺`, and
//! `Σ_{k > N} T(k) = Σ_ℓ w(ℓ) m(m + 1)/2` with `m = (2ℓ − N)⁺`. Shapes beyond
//! an explicit catalog are covered by a power-law majorant
//! `w(ℓ) ≤ a ℓ^{−s}`, whose sums are bounded by integrals from `C + ½`
//! (midpoint rule for a convex summand).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest diameter listed explicitly by [`GibbsPotential::ising`].
pub const ISING_CUTOFF: usize = 100_000;

/// One interaction shape up to translation. `sites` are shifted so that the
/// smallest is 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionShape {
    pub sites: Vec<i64>,
    pub oscillation: f64,
}

impl InteractionShape {
    pub fn new(sites: &[i64], oscillation: f64) -> Result<Self> {
        let Some(&lo) = sites.iter().min() else {
            return Err(Error::InvalidArgument("interaction shape needs at least one site".into()));
        };
        if !(oscillation >= 0.0 && oscillation.is_finite()) {
            return Err(Error::InvalidArgument(format!("oscillation must be finite and ≥ 0, got {oscillation}")));
        }
        let mut sites: Vec<i64> = sites.iter().map(|s| s - lo).collect();
        sites.sort_unstable();
        sites.dedup();
        Ok(InteractionShape { sites, oscillation })
    }

    pub fn diameter(&self) -> usize {
        *self.sites.last().unwrap_or(&0) as usize
    }
}

/// What is known about shapes that are not listed explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum TailRule {
    /// Every shape with non-zero oscillation is listed.
    FiniteRange,
    /// For every diameter `ℓ ≥ from`, the total oscillation of shapes with
    /// that diameter is at most `amplitude · ℓ^{−exponent}`. Listed shapes
    /// must have diameter below `from`.
    PowerLaw { amplitude: f64, exponent: f64, from: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsPotential {
    pub shapes: Vec<InteractionShape>,
    pub tail: TailRule,
    /// A lower bound on the single-site specification mass `h_{0}`, if known.
    pub h0: Option<f64>,
}

impl GibbsPotential {
    /// Long-range Ising chain on `{−1, +1}` with `Φ_{i,j} = |i − j|^{−α} x_i x_j`,
    /// so `Δ(Φ_{0,ℓ}) = 2ℓ^{−α}`. Diameters up to [`ISING_CUTOFF`] are listed;
    /// the rest follow the power-law tail. `h_{0} ≥ 1/(1 + e^{4ζ(α)})` with
    /// `ζ(α)` replaced by an upper bound.
    pub fn ising(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("Ising exponent must exceed 1, got {alpha}")));
        }
        let shapes = (1..=ISING_CUTOFF)
            .map(|l| InteractionShape { sites: vec![0, l as i64], oscillation: 2.0 * (l as f64).powf(-alpha) })
            .collect();
        let zeta_head: f64 = (1..=ISING_CUTOFF).rev().map(|l| (l as f64).powf(-alpha)).sum();
        let zeta = zeta_head + (ISING_CUTOFF as f64 + 0.5).powf(1.0 - alpha) / (alpha - 1.0);
        Ok(GibbsPotential {
            shapes,
            tail: TailRule::PowerLaw { amplitude: 2.0, exponent: alpha, from: ISING_CUTOFF + 1 },
            h0: Some(1.0 / (1.0 + (4.0 * zeta).exp())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsBound {
    /// `b_n = (A/2) T(n)` for `n = 0..=k_max`; `b_n` bounds `Var_n` for `n ≥ 1`.
    pub var_bounds: Vec<f64>,
    /// First `n` with `b_n < 1`.
    pub n_star: usize,
    /// `∏_{n_star ≤ n ≤ k_max} (1 − b_n) · (1 − tail_sum)`.
    pub gamma_lower_bound: f64,
    /// `h · ∏_{1 ≤ n ≤ k_max} max(1 − b_n, h) · (1 − tail_sum)` with
    /// `h = h_{0}`, which also accounts for the factors before `n_star`
    /// through `Var_n ≤ Var_0 ≤ 1 − h_{0}`. Present when `h_{0}` is known.
    pub rigorous_lower_bound: Option<f64>,
    /// Upper bound on `Σ_{n > k_max} b_n`.
    pub tail_sum: f64,
}

pub fn gibbs_gamma(potential: &GibbsPotential, alphabet: usize, k_max: usize) -> Result<GibbsBound> {
    if alphabet < 2 {
        return Err(Error::InvalidArgument(format!("alphabet needs at least 2 symbols, got {alphabet}")));
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if let Some(h) = potential.h0 {
        if !(h > 0.0 && h <= 1.0 / alphabet as f64) {
            return Err(Error::InvalidArgument(format!("h0 must lie in (0, 1/A], got {h}")));
        }
    }
    let (cutoff, tail) = match potential.tail {
        TailRule::FiniteRange => (None, None),
        TailRule::PowerLaw { amplitude, exponent, from } => {
            if !(amplitude >= 0.0 && amplitude.is_finite() && from >= 1) {
                return Err(Error::InvalidArgument("power-law tail needs amplitude ≥ 0 and from ≥ 1".into()));
            }
            if amplitude > 0.0 && (exponent.is_nan() || exponent <= 3.0) {
                return Err(Error::Divergent(format!(
                    "oscillations decaying like ℓ^-{exponent} do not give a summable variation sequence (exponent must exceed 3)"
                )));
            }
            (Some(from - 1), Some((amplitude, exponent)))
        }
    };

    let mut by_diameter: BTreeMap<usize, f64> = BTreeMap::new();
    for s in &potential.shapes {
        if !(s.oscillation >= 0.0 && s.oscillation.is_finite()) {
            return Err(Error::InvalidArgument(format!("oscillation must be finite and ≥ 0, got {}", s.oscillation)));
        }
        let d = s.diameter();
        if cutoff.is_some_and(|c| d > c) {
            return Err(Error::InvalidArgument(format!("listed shape of diameter {d} lies in the power-law tail")));
        }
        *by_diameter.entry(d).or_default() += s.oscillation;
    }
    let top = cutoff.unwrap_or_else(|| by_diameter.keys().next_back().copied().unwrap_or(0));
    let mut w = vec![0.0; top + 1];
    for (d, v) in by_diameter {
        w[d] += v;
    }

    // suffix[m] = Σ_{ℓ ≥ m} w(ℓ), weighted[m] = Σ_{ℓ ≥ m} (2ℓ + 1) w(ℓ)
    let mut suffix = vec![0.0; top + 2];
    let mut weighted = vec![0.0; top + 2];
    for l in (0..=top).rev() {
        suffix[l] = suffix[l + 1] + w[l];
        weighted[l] = weighted[l + 1] + (2 * l + 1) as f64 * w[l];
    }
    let half_a = alphabet as f64 / 2.0;
    let start = |c: usize| c as f64 + 0.5;
    let t_tail = tail.map_or(0.0, |(a, s)| 3.0 * a * start(top).powf(2.0 - s) / (s - 2.0));
    let var_bounds: Vec<f64> = (0..=k_max)
        .map(|k| {
            let m = k.div_ceil(2).min(top + 1);
            half_a * (weighted[m] - k as f64 * suffix[m] + t_tail)
        })
        .collect();

    let explicit_tail: f64 = w
        .iter()
        .enumerate()
        .map(|(l, wl)| {
            let m = (2 * l).saturating_sub(k_max) as f64;
            wl * m * (m + 1.0) / 2.0
        })
        .sum();
    let majorant = tail.map_or(0.0, |(a, s)| 4.5 * a * start(top).powf(3.0 - s) / (s - 3.0));
    let tail_sum = half_a * (explicit_tail + majorant);

    let Some(n_star) = var_bounds.iter().position(|&b| b < 1.0) else {
        return Err(Error::InvalidArgument(format!("every variation bound up to k_max = {k_max} is ≥ 1; increase k_max")));
    };
    let tail_factor = (1.0 - tail_sum).max(0.0);
    let gamma_lower_bound = var_bounds[n_star..].iter().map(|b| 1.0 - b).product::<f64>() * tail_factor;
    let rigorous_lower_bound = potential
        .h0
        .map(|h| h * var_bounds[1..].iter().map(|b| (1.0 - b).max(h)).product::<f64>() * tail_factor);
    Ok(GibbsBound { var_bounds, n_star, gamma_lower_bound, rigorous_lower_bound, tail_sum })
}
