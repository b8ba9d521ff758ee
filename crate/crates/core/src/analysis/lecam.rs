//! Two-point lower-bound constructions and the exact error of the optimal test.
//!
//! Two product laws `P0`, `P1` share every mass except those of symbols 0 and
//! 1, which are swapped:
//!
//! `P0(0) = ¼ + η + 2^{−A}`, `P0(1) = ¼ − η + 2^{−A}`, `P0(i) = 2^{−i}` for
//! `i ≥ 2`, with `η = 1/(8√n)` (root-n family) or `η = δ_n/8` (margin family)
//! and `2^{−A} = 0` for an unbounded alphabet.

use serde::Serialize;
use statrs::distribution::{Binomial, Discrete, DiscreteCDF};

use super::divergence::kl_chi2;
use crate::error::{Error, Result};
use crate::models::{Iid, ProcessModel};
use crate::series::{Alphabet, IndexPair};

/// Last explicit symbol when the alphabet is unbounded; it carries the whole
/// remaining mass `Σ_{i ≥ 62} 2^{−i} = 2^{−61}`.
pub const UNBOUNDED_TRUNCATION: usize = 62;
/// Largest `n` accepted by the exact binomial summation.
pub const MAX_ORACLE_N: usize = 1_000_000;
/// Outer binomial weights below this are skipped by the oracle.
const PMF_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LeCamRegime {
    /// Perturbation `1/(8√n)`.
    RootN,
    /// Perturbation `δ_n/8`.
    Margin { delta_n: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeCamPair {
    pub regime: LeCamRegime,
    pub n: usize,
    /// `K = |D| + |G|`.
    pub k: usize,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub perturbation: f64,
    pub a0: u32,
    pub a1: u32,
    /// `χ²(P0 ‖ P1)` of one observation.
    pub chi2_step: f64,
    /// `KL(P0 ‖ P1)` of one observation.
    pub kl_step: f64,
    /// `n · chi2_step`, an upper bound on `KL(P0^n ‖ P1^n)`.
    pub kl_bound: f64,
    /// `e^{−1} n^{−1/2} 4^{−K}` (root-n) or `δ_n e^{−nδ_n²} 4^{−K}` (margin).
    pub minimax_value: f64,
    /// Whether `chi2_step ≤ 1/n` (root-n) or `chi2_step ≤ δ_n²` (margin).
    pub chi2_claim_holds: bool,
}

impl LeCamPair {
    /// The same construction with the roles of `P0` and `P1` exchanged.
    pub fn swapped(&self) -> LeCamPair {
        let mut s = self.clone();
        std::mem::swap(&mut s.p0, &mut s.p1);
        s.kl_step = kl_chi2(&s.p0, &s.p1).map_or(f64::NAN, |d| d.kl);
        s.chi2_step = kl_chi2(&s.p0, &s.p1).map_or(f64::NAN, |d| d.chi2);
        s.kl_bound = s.n as f64 * s.chi2_step;
        s
    }

    pub fn model0(&self) -> Result<ProcessModel> {
        Ok(ProcessModel::Iid(Iid::new(self.p0.clone())?))
    }

    pub fn model1(&self) -> Result<ProcessModel> {
        Ok(ProcessModel::Iid(Iid::new(self.p1.clone())?))
    }
}

pub fn lecam_pair(n: usize, alphabet: Alphabet, regime: LeCamRegime, pair: &IndexPair) -> Result<LeCamPair> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("two-point construction needs n ≥ 2, got {n}")));
    }
    let (size, correction) = match alphabet {
        Alphabet::Finite(a) if a >= 2 => (a, 0.5f64.powi(a.min(2048) as i32)),
        Alphabet::Finite(a) => return Err(Error::InvalidArgument(format!("alphabet needs at least 2 symbols, got {a}"))),
        Alphabet::Unbounded => (UNBOUNDED_TRUNCATION + 1, 0.0),
    };
    let perturbation = match regime {
        LeCamRegime::RootN => 1.0 / (8.0 * (n as f64).sqrt()),
        LeCamRegime::Margin { delta_n } => {
            if !(delta_n > 0.0 && delta_n < 2.0) {
                return Err(Error::InvalidArgument(format!("δ_n must lie in (0, 2), got {delta_n}")));
            }
            delta_n / 8.0
        }
    };
    let mut p0 = vec![0.0; size];
    p0[0] = 0.25 + perturbation + correction;
    p0[1] = 0.25 - perturbation + correction;
    for (i, m) in p0.iter_mut().enumerate().skip(2) {
        *m = 0.5f64.powi(i as i32);
    }
    if alphabet == Alphabet::Unbounded {
        p0[UNBOUNDED_TRUNCATION] = 0.5f64.powi(UNBOUNDED_TRUNCATION as i32 - 1);
    }
    if p0.iter().any(|&m| !(m > 0.0 && m < 1.0)) {
        return Err(Error::InvalidArgument(format!("perturbation {perturbation} leaves the open simplex")));
    }
    let mut p1 = p0.clone();
    p1.swap(0, 1);
    let step = kl_chi2(&p0, &p1)?;
    let k = pair.size();
    let quarter_k = 0.25f64.powi(k as i32);
    let nf = n as f64;
    let (minimax_value, chi2_claim_holds) = match regime {
        LeCamRegime::RootN => ((-1.0f64).exp() / nf.sqrt() * quarter_k, step.chi2 <= 1.0 / nf),
        LeCamRegime::Margin { delta_n } => {
            (delta_n * (-nf * delta_n * delta_n).exp() * quarter_k, step.chi2 <= delta_n * delta_n)
        }
    };
    Ok(LeCamPair {
        regime,
        n,
        k,
        p0,
        p1,
        perturbation,
        a0: 0,
        a1: 1,
        chi2_step: step.chi2,
        kl_step: step.kl,
        kl_bound: nf * step.chi2,
        minimax_value,
        chi2_claim_holds,
    })
}

/// Average error `½[P0(test says 1) + P1(test says 0)]` of the likelihood-ratio
/// test between `P0^n` and `P1^n`, equal to `½(1 − d_TV(P0^n, P1^n))`.
pub fn bayes_error_oracle(pair: &LeCamPair, n: usize) -> Result<f64> {
    let (a0, a1) = (pair.a0 as usize, pair.a1 as usize);
    let differs = pair.p0.iter().zip(&pair.p1).enumerate().any(|(i, (x, y))| i != a0 && i != a1 && x != y);
    if differs || pair.p0.len() != pair.p1.len() {
        return Err(Error::InvalidArgument("laws must differ only by swapping the masses of a0 and a1".into()));
    }
    bayes_error_two_point(pair.p0[a0], pair.p0[a1], n)
}

/// Optimal average testing error between the product laws of `n` draws where
/// one law gives mass `p` to symbol `a0` and `q` to `a1`, the other swaps
/// them, and all remaining symbols agree.
///
/// The likelihood ratio only depends on the counts `N0`, `N1` of the two
/// symbols. With `M = N0 + N1 ~ Bin(n, p + q)` and `r = p/(p + q)`, the error
/// conditional on `M = m` is `½ Σ_k min(Bin(k; m, r), Bin(k; m, 1 − r))`,
/// which the symmetry `k ↔ m − k` reduces to two binomial CDF values.
pub fn bayes_error_two_point(p: f64, q: f64, n: usize) -> Result<f64> {
    if n > MAX_ORACLE_N {
        return Err(Error::InvalidArgument(format!("exact binomial summation is limited to n ≤ {MAX_ORACLE_N}")));
    }
    if !(p >= 0.0 && q >= 0.0 && p + q <= 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!("invalid masses p = {p}, q = {q}")));
    }
    let s = (p + q).min(1.0);
    if s == 0.0 || p == q || n == 0 {
        return Ok(0.5);
    }
    let r = p.max(q) / s;
    let outer = Binomial::new(s, n as u64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut overlap = 0.0;
    for m in 0..=n as u64 {
        let w = outer.pmf(m);
        if w < PMF_FLOOR {
            continue;
        }
        overlap += w * min_overlap(r, m)?;
    }
    Ok(0.5 * overlap)
}

/// `Σ_k min(Bin(k; m, r), Bin(k; m, 1 − r))` for `r ≥ ½`.
fn min_overlap(r: f64, m: u64) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    let inner = Binomial::new(r, m).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let below = if m.div_ceil(2) == 0 { 0.0 } else { inner.cdf(m.div_ceil(2) - 1) };
    Ok(below + inner.cdf(m / 2))
}

/// The testing-error side of the two-point argument for `n` observations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BretagnolleHuber {
    /// Average error of the optimal test, `½(1 − d_TV)`.
    pub average_error: f64,
    pub total_variation: f64,
    /// Exact `KL(P0^n ‖ P1^n) = n · kl_step`.
    pub kl: f64,
    /// `e^{−KL}`, the lower bound on `1 − d_TV` in the form used by the
    /// two-point argument.
    pub printed_bound: f64,
    pub printed_holds: bool,
    /// `½ e^{−KL}`, the textbook form of the inequality.
    pub conservative_bound: f64,
    pub conservative_holds: bool,
}

pub fn bretagnolle_huber_check(pair: &LeCamPair) -> Result<BretagnolleHuber> {
    let average_error = bayes_error_oracle(pair, pair.n)?;
    let one_minus_tv = 2.0 * average_error;
    let kl = pair.n as f64 * pair.kl_step;
    let printed_bound = (-kl).exp();
    let conservative_bound = 0.5 * printed_bound;
    Ok(BretagnolleHuber {
        average_error,
        total_variation: 1.0 - one_minus_tv,
        kl,
        printed_bound,
        printed_holds: one_minus_tv >= printed_bound,
        conservative_bound,
        conservative_holds: one_minus_tv >= conservative_bound,
    })
}
