//! Excess risk, margin and gap of a guessing problem under a known law.
//!
//! With `P(a, b) = P(X_G = a, X_D = b)`, the regret of guessing `c` after
//! seeing `b` is `max_a P(a, b) − P(c, b)`. The excess risk of a rule is the
//! largest regret over `b`, the margin is the smallest strictly positive
//! regret and the gap is the largest possible regret.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimator::{count_patterns, fit_guess_rule, GuessRule};
use crate::models::{exact_finite_law, ExactLaw, JointTable, ProcessModel};
use crate::sampler::{derive_seed, simulate, SimulationPlan};
use crate::series::{IndexPair, Pattern};

/// Regret differences at or below this are treated as ties.
pub const GAP_TOLERANCE: f64 = 1e-12;
/// For laws on a truncated alphabet, data patterns lighter than this are
/// left out of the supremum over `b`.
pub const TRUNCATED_MASS_FLOOR: f64 = 1e-12;

fn table_for(law: &ExactLaw, pair: &IndexPair) -> Result<JointTable> {
    let union = pair.union();
    if law.positions() == union.as_slice() {
        law.joint_table(pair)
    } else {
        law.marginal(&union)?.joint_table(pair)
    }
}

fn row_max(row: &[f64]) -> f64 {
    row.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    /// `δ = inf_b δ(b)`.
    pub delta: f64,
    /// `δ(b)`: smallest regret above [`GAP_TOLERANCE`], or 0 if there is none.
    pub per_b: BTreeMap<Pattern, f64>,
}

/// Margin `δ` and its per-pattern values, over every `b ∈ A^D`.
pub fn margin_delta(law: &ExactLaw, pair: &IndexPair) -> Result<MarginReport> {
    Ok(margin_from_table(&table_for(law, pair)?))
}

pub fn margin_from_table(table: &JointTable) -> MarginReport {
    let mut per_b = BTreeMap::new();
    let mut delta = f64::INFINITY;
    for b in 0..table.data_patterns() {
        let row = table.row(b);
        let top = row_max(row);
        let d = row.iter().map(|p| top - p).filter(|&g| g > GAP_TOLERANCE).fold(f64::INFINITY, f64::min);
        let d = if d.is_finite() { d } else { 0.0 };
        delta = delta.min(d);
        per_b.insert(table.data_pattern(b), d);
    }
    MarginReport { delta, per_b }
}

/// Gap `β = sup_b (max_a P(a, b) − min_c P(c, b))`.
pub fn beta_gap(law: &ExactLaw, pair: &IndexPair) -> Result<f64> {
    Ok(beta_from_table(&table_for(law, pair)?))
}

pub fn beta_from_table(table: &JointTable) -> f64 {
    (0..table.data_patterns())
        .map(|b| {
            let row = table.row(b);
            row_max(row) - row.iter().copied().fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// `p̄^K`, an upper bound on `β` when every kernel mass is at most `p̄`.
pub fn beta_upper_bound(pbar: f64, k: usize) -> Result<f64> {
    if !(pbar > 0.0 && pbar < 1.0) {
        return Err(Error::InvalidArgument(format!("p̄ must lie in (0, 1), got {pbar}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    Ok(pbar.powi(k as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub value: f64,
    /// Regret `max_a P(a, b) − P(rule(b), b)` per data pattern.
    pub per_b: BTreeMap<Pattern, f64>,
    /// A data pattern attaining the supremum (the smallest such).
    pub achieving_b: Option<Pattern>,
}

/// Excess risk of `rule` under `law`, in the joint form
/// `sup_b [max_a P(a, b) − P(rule(b), b)]`.
pub fn excess_risk_exact(rule: &GuessRule, law: &ExactLaw) -> Result<RiskReport> {
    excess_risk_on_table(rule, &table_for(law, rule.pair())?)
}

pub fn excess_risk_on_table(rule: &GuessRule, table: &JointTable) -> Result<RiskReport> {
    let mut per_b = BTreeMap::new();
    let mut best: Option<(f64, Pattern)> = None;
    for b in 0..table.data_patterns() {
        let row = table.row(b);
        if table.is_truncated() && row.iter().sum::<f64>() < TRUNCATED_MASS_FLOOR {
            continue;
        }
        let pattern = table.data_pattern(b);
        let regret = regret(rule, table, row, &pattern)?;
        if best.as_ref().is_none_or(|(v, _)| regret > *v) {
            best = Some((regret, pattern.clone()));
        }
        per_b.insert(pattern, regret);
    }
    let (value, achieving_b) = best.map_or((0.0, None), |(v, b)| (v, Some(b)));
    Ok(RiskReport { value, per_b, achieving_b })
}

fn regret(rule: &GuessRule, table: &JointTable, row: &[f64], b: &Pattern) -> Result<f64> {
    let guess = rule.guess(b)?;
    let hit = guess.index(table.alphabet()).map_or(0.0, |i| row[i]);
    Ok((row_max(row) - hit).max(0.0))
}

/// Excess risk only, without the per-pattern breakdown.
pub fn excess_risk_value(rule: &GuessRule, table: &JointTable) -> Result<f64> {
    let mut value = 0.0f64;
    for b in 0..table.data_patterns() {
        let row = table.row(b);
        if table.is_truncated() && row.iter().sum::<f64>() < TRUNCATED_MASS_FLOOR {
            continue;
        }
        value = value.max(regret(rule, table, row, &table.data_pattern(b))?);
    }
    Ok(value)
}

/// Monte Carlo summary of the excess risk of fitted rules.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskSummary {
    pub replicates: usize,
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub q05: f64,
    pub q95: f64,
}

/// Mean, standard error and 5%/95% quantiles (linear interpolation between
/// order statistics). Values are accumulated in the given order.
pub fn summarize(values: &[f64]) -> RiskSummary {
    let r = values.len();
    if r == 0 {
        return RiskSummary { replicates: 0, mean: f64::NAN, se: f64::NAN, q05: f64::NAN, q95: f64::NAN };
    }
    let mean = values.iter().sum::<f64>() / r as f64;
    let se = if r > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        (var / r as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    RiskSummary { replicates: r, mean, se, q05: quantile(&sorted, 0.05), q95: quantile(&sorted, 0.95) }
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Excess risk of each of `replicates` rules, each fitted on an independent
/// simulated sample of length `n`, evaluated exactly against the model's law.
/// Replicate `r` uses seed [`derive_seed`]`(seed, r)`; values are returned in
/// replicate order whatever the thread count.
pub fn excess_risk_replicates(
    model: &ProcessModel,
    pair: &IndexPair,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if replicates == 0 {
        return Err(Error::InvalidArgument("replicates must be at least 1".into()));
    }
    let table = exact_finite_law(model, &pair.union())?.joint_table(pair)?;
    let plan = SimulationPlan::new(model.clone(), n, seed)?;
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let sample = simulate(&plan.clone().with_seed(derive_seed(seed, r as u64)))?;
            let rule = fit_guess_rule(&count_patterns(&sample, pair))?;
            excess_risk_value(&rule, &table)
        })
        .collect()
}

pub fn excess_risk_mc(
    model: &ProcessModel,
    pair: &IndexPair,
    n: usize,
    replicates: usize,
    seed: u64,
) -> Result<RiskSummary> {
    Ok(summarize(&excess_risk_replicates(model, pair, n, replicates, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::CountTable;
    use crate::models::{Iid, Markov};

    fn iid532() -> ProcessModel {
        ProcessModel::Iid(Iid::new(vec![0.5, 0.3, 0.2]).unwrap())
    }

    fn unigram() -> IndexPair {
        IndexPair::new(&[], &[1]).unwrap()
    }

    fn rule_guessing(pair: &IndexPair, a: u32) -> GuessRule {
        let b = Pattern::from_ids(&vec![0; pair.data().len()]);
        let t = CountTable::from_counts(pair.clone(), [((b, Pattern::from_ids(&[a])), 1)]).unwrap();
        fit_guess_rule(&t).unwrap()
    }

    #[test]
    fn margin_and_gap_examples() {
        let law = exact_finite_law(&iid532(), &[1]).unwrap();
        let m = margin_delta(&law, &unigram()).unwrap();
        assert!((m.delta - 0.2).abs() < 1e-15);
        assert!((beta_gap(&law, &unigram()).unwrap() - 0.3).abs() < 1e-15);

        let uniform = ProcessModel::Iid(Iid::new(vec![0.5, 0.5]).unwrap());
        let law = exact_finite_law(&uniform, &[1]).unwrap();
        assert_eq!(margin_delta(&law, &unigram()).unwrap().delta, 0.0);
        assert_eq!(beta_gap(&law, &unigram()).unwrap(), 0.0);

        // G = {1, 2}: masses 0.25 vs 0.15 is the smallest positive gap
        let pair = IndexPair::new(&[], &[1, 2]).unwrap();
        let law = exact_finite_law(&iid532(), &[1, 2]).unwrap();
        let mut masses: Vec<f64> = law.probs().to_vec();
        masses.sort_by(f64::total_cmp);
        let top = masses[masses.len() - 1];
        let oracle = masses.iter().map(|p| top - p).filter(|g| *g > 1e-12).fold(1.0, f64::min);
        assert!((margin_delta(&law, &pair).unwrap().delta - oracle).abs() < 1e-15);
        assert!((oracle - 0.1).abs() < 1e-12);
    }

    #[test]
    fn markov_gap_is_below_power_bound() {
        let q = ProcessModel::Markov(Markov::new(1, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap());
        let pair = IndexPair::new(&[1], &[2]).unwrap();
        let law = exact_finite_law(&q, &[1, 2]).unwrap();
        let beta = beta_gap(&law, &pair).unwrap();
        // b = 0: 0.6 − 2/3·0.1
        assert!((beta - (0.6 - 0.2 / 3.0)).abs() < 1e-12);
        assert!(beta <= beta_upper_bound(q.pbar().unwrap(), 2).unwrap());
        assert!((beta_upper_bound(0.9, 2).unwrap() - 0.81).abs() < 1e-15);
        assert_eq!(beta_upper_bound(0.5, 1).unwrap(), 0.5);
        assert!(beta_upper_bound(1.0, 1).is_err());
    }

    #[test]
    fn risk_examples() {
        let law = exact_finite_law(&iid532(), &[1]).unwrap();
        let pair = unigram();
        assert_eq!(excess_risk_exact(&rule_guessing(&pair, 0), &law).unwrap().value, 0.0);
        let r = excess_risk_exact(&rule_guessing(&pair, 1), &law).unwrap();
        assert!((r.value - 0.2).abs() < 1e-15);
        assert_eq!(r.achieving_b, Some(Pattern::empty()));
        let r = excess_risk_exact(&rule_guessing(&pair, 2), &law).unwrap();
        assert!((r.value - 0.3).abs() < 1e-15);
    }

    #[test]
    fn uniform_model_has_zero_mc_risk() {
        let m = ProcessModel::Iid(Iid::new(vec![0.5, 0.5]).unwrap());
        let s = excess_risk_mc(&m, &IndexPair::new(&[1], &[2]).unwrap(), 20, 50, 3).unwrap();
        assert_eq!(s.mean, 0.0);
        assert_eq!(s.q95, 0.0);
    }

    #[test]
    fn mc_matches_multinomial_oracle() {
        // n = 10 draws from (0.5, 0.3, 0.2); the fitted rule guesses the most
        // frequent symbol, smallest id on ties.
        let p: [f64; 3] = [0.5, 0.3, 0.2];
        let regret = [0.0, 0.2, 0.3];
        let n = 10u32;
        let mut expected = 0.0;
        let fact = |k: u32| (1..=k).map(f64::from).product::<f64>();
        for c0 in 0..=n {
            for c1 in 0..=n - c0 {
                let c2 = n - c0 - c1;
                let prob = fact(n) / (fact(c0) * fact(c1) * fact(c2))
                    * p[0].powi(c0 as i32)
                    * p[1].powi(c1 as i32)
                    * p[2].powi(c2 as i32);
                let counts = [c0, c1, c2];
                let top = *counts.iter().max().unwrap();
                let guess = counts.iter().position(|&c| c == top).unwrap();
                expected += prob * regret[guess];
            }
        }
        let s = excess_risk_mc(&iid532(), &unigram(), n as usize, 10_000, 99).unwrap();
        assert!((s.mean - expected).abs() <= 5.0 * s.se, "{} vs {expected} (se {})", s.mean, s.se);
    }

    #[test]
    fn summary_statistics() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(s.mean, 3.0);
        assert!((s.se - (2.5f64 / 5.0).sqrt()).abs() < 1e-15);
        assert!((s.q05 - 1.2).abs() < 1e-12);
        assert!((s.q95 - 4.8).abs() < 1e-12);
    }
}
