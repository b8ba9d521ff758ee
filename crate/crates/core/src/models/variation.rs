//! Per-family analytic quantities: `p̄`, the variation sequence `Var_j`, and
//! the memory-decay constant `Γ = ∏_j (1 − Var_j)`.

use serde::Serialize;

use super::kernel::{poisson_pmf, upsilon};
use super::ProcessModel;
use crate::error::{Error, Result};

/// Depth `j_max` used when a single lower bound on `Γ` is needed.
pub const DEFAULT_VARIATION_DEPTH: usize = 64;

/// Upper bounds on `Var_0..Var_{j_max}` plus a bound on `Σ_{j > j_max} Var_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariationBound {
    pub values: Vec<f64>,
    pub tail_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaStatus {
    /// The lower bound is strictly positive.
    Holds,
    /// `Var_0 ≥ 1`: the memory-decay assumption fails.
    Violated,
    /// The available bounds are too weak to certify `Γ > 0`.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaBound {
    /// `∏_{j ≤ j_max} (1 − Var_j)`.
    pub truncated_product: f64,
    /// Truncated product times `(1 − tail_sum)`, clipped at 0.
    pub lower_bound: f64,
    pub status: GammaStatus,
    pub variation: VariationBound,
}

/// Combines a variation sequence into a lower bound on `Γ`, using
/// `∏_{j > j_max} (1 − Var_j) ≥ 1 − Σ_{j > j_max} Var_j` for the tail.
pub fn gamma_from_variation(variation: VariationBound) -> GammaBound {
    if variation.values.first().is_some_and(|&v| v >= 1.0) {
        return GammaBound { truncated_product: 0.0, lower_bound: 0.0, status: GammaStatus::Violated, variation };
    }
    let truncated_product: f64 = variation.values.iter().map(|v| (1.0 - v).max(0.0)).product();
    let lower_bound = truncated_product * (1.0 - variation.tail_sum).max(0.0);
    let status = if lower_bound > 0.0 { GammaStatus::Holds } else { GammaStatus::Inconclusive };
    GammaBound { truncated_product, lower_bound, status, variation }
}

/// `Σ_{k > j} w_k` and `Σ_{j' > j_max} Σ_{k > j'} w_k` for weights indexed `1, 2, ...`.
fn tail_sums(weights: &[f64], j_max: usize) -> (Vec<f64>, f64) {
    let values = (0..=j_max).map(|j| weights.iter().skip(j).sum()).collect();
    let tail = weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * ((i + 1) as f64 - j_max as f64 - 1.0).max(0.0))
        .sum();
    (values, tail)
}

impl ProcessModel {
    /// `p̄ = sup_{x, a} p(a | x)`: exact for chains, an analytic bound for the
    /// regression families, `None` for hidden Markov processes.
    pub fn pbar(&self) -> Option<f64> {
        match self {
            ProcessModel::Iid(m) => Some(m.probs().iter().copied().fold(0.0, f64::max)),
            ProcessModel::Markov(m) => Some(m.chain().max_entry()),
            ProcessModel::BinaryAr(m) => {
                Some(upsilon(m.xi0().abs() + m.xi().iter().map(|x| x.abs()).sum::<f64>()))
            }
            ProcessModel::PoissonReg(m) => {
                // pmf(a, ·) increases on (0, a]; with v ≤ 1 only a = 0 prefers
                // the smallest mean.
                let v_min = m.min_mean();
                Some(poisson_pmf(v_min, 0).max(poisson_pmf(1.0, 1)))
            }
            ProcessModel::HiddenMarkov(_) => None,
            ProcessModel::Mixture(_) => self.finite_chain().ok().map(|(c, _)| c.max_entry()),
        }
    }

    /// Upper bounds on `Var_0..Var_{j_max}` and on the tail beyond `j_max`.
    pub fn variation_sequence(&self, j_max: usize) -> Result<VariationBound> {
        match self {
            ProcessModel::Iid(_) => Ok(VariationBound { values: vec![0.0; j_max + 1], tail_sum: 0.0 }),
            ProcessModel::Markov(m) => {
                let c = m.chain();
                let values = (0..=j_max).map(|j| c.variation(j)).collect();
                let tail = (j_max + 1..c.order()).map(|j| c.variation(j)).sum();
                Ok(VariationBound { values, tail_sum: tail })
            }
            ProcessModel::BinaryAr(m) => {
                let (values, tail_sum) = tail_sums(m.xi(), j_max);
                Ok(VariationBound { values, tail_sum })
            }
            ProcessModel::PoissonReg(m) => {
                let scaled: Vec<f64> = m.xi().iter().map(|x| 0.5 * m.threshold() * x.abs()).collect();
                let (values, tail_sum) = tail_sums(&scaled, j_max);
                Ok(VariationBound { values, tail_sum })
            }
            ProcessModel::Mixture(m) => {
                let max_order = m.order();
                let mut by_order = vec![0.0; max_order];
                for (w, c) in m.components() {
                    by_order[c.order() - 1] += w;
                }
                let (values, tail_sum) = tail_sums(&by_order, j_max);
                Ok(VariationBound { values, tail_sum })
            }
            ProcessModel::HiddenMarkov(_) => Err(Error::NoVariationBound("hidden Markov")),
        }
    }

    /// Lower bound on `Γ(P)` from [`ProcessModel::variation_sequence`].
    pub fn gamma(&self, j_max: usize) -> Result<GammaBound> {
        Ok(gamma_from_variation(self.variation_sequence(j_max)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{exact_finite_law, BinaryAr, Iid, Markov, Mixture, PoissonReg};

    fn q() -> ProcessModel {
        ProcessModel::Markov(Markov::new(1, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap())
    }

    #[test]
    fn markov_variation_and_gamma() {
        let v = q().variation_sequence(3).unwrap();
        assert!((v.values[0] - 0.7).abs() < 1e-15);
        assert_eq!(&v.values[1..], &[0.0, 0.0, 0.0]);
        let g = q().gamma(3).unwrap();
        assert!((g.lower_bound - 0.3).abs() < 1e-12);
        assert_eq!(g.status, GammaStatus::Holds);
    }

    #[test]
    fn iid_gamma_is_one() {
        let m = ProcessModel::Iid(Iid::new(vec![0.5, 0.3, 0.2]).unwrap());
        assert_eq!(m.variation_sequence(5).unwrap().values, vec![0.0; 6]);
        assert_eq!(m.gamma(5).unwrap().lower_bound, 1.0);
        assert_eq!(m.pbar(), Some(0.5));
    }

    #[test]
    fn gamma_direct_product() {
        let g = gamma_from_variation(VariationBound { values: vec![0.3, 0.1, 0.0], tail_sum: 0.0 });
        assert!((g.lower_bound - 0.63).abs() < 1e-15);
        let g = gamma_from_variation(VariationBound { values: vec![1.0, 0.0], tail_sum: 0.0 });
        assert_eq!(g.status, GammaStatus::Violated);
    }

    #[test]
    fn gamma_is_antitone_in_each_variation() {
        let base = [0.3, 0.2, 0.1, 0.05];
        let g0 = gamma_from_variation(VariationBound { values: base.to_vec(), tail_sum: 0.01 }).lower_bound;
        for i in 0..base.len() {
            let mut v = base.to_vec();
            v[i] += 0.05;
            let g = gamma_from_variation(VariationBound { values: v, tail_sum: 0.01 }).lower_bound;
            assert!(g < g0);
        }
    }

    #[test]
    fn mixture_geometric_weights() {
        // λ_0 = 1/2 (memoryless), λ_j = 2^{-(j+1)} for j = 1..10, the remainder on j = 10.
        let mut weights: Vec<f64> = (1..=10).map(|j| 0.5f64.powi(j + 1)).collect();
        let rest = 0.5 - weights.iter().sum::<f64>();
        weights[9] += rest;
        let comps = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let order = i + 1;
                let rows = vec![vec![0.6, 0.4]; 1 << order];
                (w, Markov::new(order, rows).unwrap())
            })
            .collect();
        let m = ProcessModel::Mixture(Mixture::new(Some((0.5, vec![0.5, 0.5])), comps).unwrap());
        let v = m.variation_sequence(12).unwrap();
        for j in 0..=12 {
            let partial: f64 = weights.iter().skip(j).sum();
            assert!((v.values[j] - partial).abs() < 1e-15);
        }
        assert!((v.values[0] - 0.5).abs() < 1e-12);
        // Γ ≥ ∏_{k ≥ 1} (1 − Σ_{j ≥ k} λ_j)
        let g = m.gamma(12).unwrap();
        let expected: f64 = (1..=10).map(|k| 1.0 - weights.iter().skip(k - 1).sum::<f64>()).product();
        assert!((g.lower_bound - expected).abs() < 1e-12);
    }

    #[test]
    fn regression_families() {
        let ar = ProcessModel::BinaryAr(BinaryAr::new(0.7, vec![0.4, 0.2, 0.1]).unwrap());
        let v = ar.variation_sequence(1).unwrap();
        assert!((v.values[0] - 0.7).abs() < 1e-15);
        assert!((v.values[1] - 0.3).abs() < 1e-15);
        // Var_2 = 0.1, Var_3.. = 0
        assert!((v.tail_sum - 0.1).abs() < 1e-15);
        assert!((ar.pbar().unwrap() - upsilon(1.4)).abs() < 1e-15);

        let pr = ProcessModel::PoissonReg(PoissonReg::new(vec![0.0; 4], 1.0).unwrap());
        assert!((pr.pbar().unwrap() - (-1f64).exp()).abs() < 1e-15);
        let pr = ProcessModel::PoissonReg(PoissonReg::new(vec![-0.2, -0.1], 2.0).unwrap());
        let v = pr.variation_sequence(2).unwrap();
        assert!((v.values[0] - 0.3).abs() < 1e-15);
        assert!((v.values[1] - 0.1).abs() < 1e-15);
        assert_eq!(v.values[2], 0.0);
    }

    #[test]
    fn pbar_dominates_marginals() {
        let models = [
            q(),
            ProcessModel::Iid(Iid::new(vec![0.2, 0.7, 0.1]).unwrap()),
            ProcessModel::BinaryAr(BinaryAr::new(0.2, vec![0.3, 0.1]).unwrap()),
            ProcessModel::PoissonReg(PoissonReg::new(vec![-0.4], 1.5).unwrap()),
        ];
        for m in &models {
            let law = exact_finite_law(m, &[1]).unwrap();
            let top = law.probs().iter().copied().fold(0.0, f64::max);
            assert!(m.pbar().unwrap() >= top - 1e-12, "{}", m.family());
        }
    }
}
