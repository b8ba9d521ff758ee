//! Process model catalog.
//!
//! Every model exposes its left conditional kernel `p(a | past)`. Models on a
//! finite alphabet with finite memory additionally lift to a [`FiniteChain`],
//! from which exact stationary laws of finite patterns are computed.

pub mod chain;
pub mod kernel;
pub mod law;
pub mod variation;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Alphabet, Symbol};

pub use chain::FiniteChain;
pub use kernel::{upsilon, NextDistribution};
pub use law::{exact_finite_law, exact_finite_law_with_budget, ExactLaw, JointTable, DEFAULT_LAW_BUDGET};
pub use variation::{GammaBound, GammaStatus, VariationBound};

const SUM_TOLERANCE: f64 = 1e-12;

fn check_probs(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidModel(format!("{what}: empty probability vector")));
    }
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidModel(format!("{what}: negative or non-finite probability")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidModel(format!("{what}: probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Independent draws from a fixed probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Iid {
    probs: Vec<f64>,
}

impl Iid {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_probs(&probs, "iid")?;
        Ok(Iid { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// Markov chain of order `k ≥ 1` on a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Markov {
    chain: FiniteChain,
}

impl Markov {
    /// `transitions` holds `A^order` rows of length `A`, contexts ordered
    /// oldest symbol first.
    pub fn new(order: usize, transitions: Vec<Vec<f64>>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidModel("markov order must be at least 1".into()));
        }
        let a = transitions.first().map_or(0, Vec::len);
        if a < 1 {
            return Err(Error::InvalidModel("markov: empty transition matrix".into()));
        }
        for (i, row) in transitions.iter().enumerate() {
            if row.len() != a {
                return Err(Error::InvalidModel(format!("markov: row {i} has length {}, expected {a}", row.len())));
            }
            check_probs(row, &format!("markov row {i}"))?;
        }
        let chain = FiniteChain::new(a, order, transitions.concat())?;
        Ok(Markov { chain })
    }

    pub fn chain(&self) -> &FiniteChain {
        &self.chain
    }

    pub fn order(&self) -> usize {
        self.chain.order()
    }

    pub fn alphabet(&self) -> usize {
        self.chain.alphabet()
    }

    pub fn transitions(&self) -> Vec<Vec<f64>> {
        self.chain.rows().chunks(self.alphabet()).map(<[f64]>::to_vec).collect()
    }
}

/// Binary autoregressive chain on `{−1, +1}` (ids `0`, `1`) with
/// `p(a | x) = Υ(a·(ξ_0 + Σ_j ξ_j x_{−j}))`. The coefficient list is finite;
/// coefficients beyond it are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryAr {
    xi0: f64,
    xi: Vec<f64>,
}

impl BinaryAr {
    pub fn new(xi0: f64, xi: Vec<f64>) -> Result<Self> {
        if !xi0.is_finite() || xi.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidModel("binary_ar: coefficients ξ_j must be finite and non-negative".into()));
        }
        Ok(BinaryAr { xi0, xi })
    }

    pub fn xi0(&self) -> f64 {
        self.xi0
    }

    /// `ξ_1, ξ_2, ...`
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// `±1` value of a symbol id.
    #[inline]
    pub fn spin(s: Symbol) -> f64 {
        if s.0 == 0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Probability of `+1` after `past` (most recent last), padding with `−1`.
    pub fn prob_plus(&self, past: &[Symbol]) -> f64 {
        upsilon(self.field(past))
    }

    fn field(&self, past: &[Symbol]) -> f64 {
        let mut s = self.xi0;
        for (j, &w) in self.xi.iter().enumerate() {
            let x = past.len().checked_sub(j + 1).map_or(-1.0, |i| Self::spin(past[i]));
            s += w * x;
        }
        s
    }
}

/// Poisson regression for counts: `p(· | x) = Poisson(v(x))` with
/// `v(x) = exp(Σ_j ξ_j min(x_{−j}, c))`, `ξ_j ≤ 0`, `c > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReg {
    xi: Vec<f64>,
    c: f64,
}

impl PoissonReg {
    pub fn new(xi: Vec<f64>, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidModel("poisson_reg: threshold c must be positive".into()));
        }
        if xi.iter().any(|x| !x.is_finite() || *x > 0.0) {
            return Err(Error::InvalidModel("poisson_reg: coefficients ξ_j must be finite and non-positive".into()));
        }
        Ok(PoissonReg { xi, c })
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn threshold(&self) -> f64 {
        self.c
    }

    /// Mean `v(x)` after `past` (most recent last), padding with count 0.
    pub fn mean(&self, past: &[Symbol]) -> f64 {
        let mut r = 0.0;
        for (j, &w) in self.xi.iter().enumerate() {
            let x = past.len().checked_sub(j + 1).map_or(0.0, |i| past[i].0 as f64);
            r += w * x.min(self.c);
        }
        r.exp()
    }

    /// Smallest reachable mean, `exp(c · Σ ξ_j)`.
    pub fn min_mean(&self) -> f64 {
        (self.c * self.xi.iter().sum::<f64>()).exp()
    }
}

/// Pointwise projection `Y_i = f(X_i)` of a first-order Markov chain.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenMarkov {
    base: Markov,
    projection: Vec<u32>,
    observed: usize,
}

impl HiddenMarkov {
    pub fn new(base: Markov, projection: Vec<u32>) -> Result<Self> {
        if base.order() != 1 {
            return Err(Error::InvalidModel("hidden_markov: base chain must have order 1".into()));
        }
        if projection.len() != base.alphabet() {
            return Err(Error::InvalidModel(format!(
                "hidden_markov: projection has {} entries for {} base states",
                projection.len(),
                base.alphabet()
            )));
        }
        let observed = projection.iter().copied().max().unwrap_or(0) as usize + 1;
        if observed >= base.alphabet() {
            return Err(Error::InvalidModel("hidden_markov: projection must merge states (|B| < |A|)".into()));
        }
        Ok(HiddenMarkov { base, projection, observed })
    }

    pub fn base(&self) -> &Markov {
        &self.base
    }

    pub fn projection(&self) -> &[u32] {
        &self.projection
    }

    pub fn observed_alphabet(&self) -> usize {
        self.observed
    }

    /// Exact predictive law of the next observation given a finite observed
    /// past, by forward filtering from the stationary base law.
    pub fn predictive(&self, past: &[Symbol]) -> Result<Vec<f64>> {
        let chain = self.base.chain();
        let a = chain.alphabet();
        let mut alpha = chain.stationary()?;
        let step = |alpha: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; a];
            for (s, &m) in alpha.iter().enumerate() {
                for (t, &p) in chain.row(s).iter().enumerate() {
                    out[t] += m * p;
                }
            }
            out
        };
        for (i, y) in past.iter().enumerate() {
            if y.id() >= self.observed {
                return Err(Error::SymbolOutOfRange { symbol: y.0, alphabet: self.observed });
            }
            if i > 0 {
                alpha = step(&alpha);
            }
            for (s, m) in alpha.iter_mut().enumerate() {
                if self.projection[s] != y.0 {
                    *m = 0.0;
                }
            }
            let total: f64 = alpha.iter().sum();
            if total <= 0.0 {
                return Err(Error::InvalidArgument("past has probability zero under the model".into()));
            }
            alpha.iter_mut().for_each(|m| *m /= total);
        }
        let next = if past.is_empty() { alpha } else { step(&alpha) };
        let mut out = vec![0.0; self.observed];
        for (s, m) in next.into_iter().enumerate() {
            out[self.projection[s] as usize] += m;
        }
        Ok(out)
    }
}

/// Convex mixture of finite-order Markov kernels,
/// `p(a | x) = λ_0 p^[0](a) + Σ_j λ_j p^[j](a | x_{−j..−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    memoryless: Option<(f64, Vec<f64>)>,
    components: Vec<(f64, Markov)>,
    alphabet: usize,
}

impl Mixture {
    pub fn new(memoryless: Option<(f64, Vec<f64>)>, components: Vec<(f64, Markov)>) -> Result<Self> {
        let alphabet = components
            .first()
            .map(|(_, m)| m.alphabet())
            .or_else(|| memoryless.as_ref().map(|(_, p)| p.len()))
            .ok_or_else(|| Error::InvalidModel("mixture: no components".into()))?;
        let mut total = 0.0;
        if let Some((w, p)) = &memoryless {
            check_probs(p, "mixture memoryless component")?;
            if p.len() != alphabet || !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidModel("mixture: bad memoryless component".into()));
            }
            total += w;
        }
        for (w, m) in &components {
            if m.alphabet() != alphabet || !(w.is_finite() && *w >= 0.0) {
                return Err(Error::InvalidModel("mixture: components must share the alphabet and have non-negative weights".into()));
            }
            total += w;
        }
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidModel(format!("mixture: weights sum to {total}, not 1")));
        }
        Ok(Mixture { memoryless, components, alphabet })
    }

    pub fn memoryless(&self) -> Option<(f64, &[f64])> {
        self.memoryless.as_ref().map(|(w, p)| (*w, p.as_slice()))
    }

    pub fn components(&self) -> &[(f64, Markov)] {
        &self.components
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Largest component order.
    pub fn order(&self) -> usize {
        self.components.iter().map(|(_, m)| m.order()).max().unwrap_or(0)
    }

    pub fn prob(&self, past: &[Symbol], a: usize) -> f64 {
        let mut p = self.memoryless.as_ref().map_or(0.0, |(w, q)| w * q[a]);
        for (w, m) in &self.components {
            p += w * m.chain().row(m.chain().context_of(past))[a];
        }
        p
    }
}

/// A process description: one of the supported families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub enum ProcessModel {
    Iid(Iid),
    Markov(Markov),
    BinaryAr(BinaryAr),
    PoissonReg(PoissonReg),
    HiddenMarkov(HiddenMarkov),
    Mixture(Mixture),
}

impl ProcessModel {
    pub fn family(&self) -> &'static str {
        match self {
            ProcessModel::Iid(_) => "iid",
            ProcessModel::Markov(_) => "markov",
            ProcessModel::BinaryAr(_) => "binary_ar",
            ProcessModel::PoissonReg(_) => "poisson_reg",
            ProcessModel::HiddenMarkov(_) => "hidden_markov",
            ProcessModel::Mixture(_) => "mixture",
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            ProcessModel::Iid(m) => Alphabet::Finite(m.probs.len()),
            ProcessModel::Markov(m) => Alphabet::Finite(m.alphabet()),
            ProcessModel::BinaryAr(_) => Alphabet::Finite(2),
            ProcessModel::PoissonReg(_) => Alphabet::Unbounded,
            ProcessModel::HiddenMarkov(m) => Alphabet::Finite(m.observed),
            ProcessModel::Mixture(m) => Alphabet::Finite(m.alphabet),
        }
    }

    /// Number of past symbols the kernel reads; `None` for hidden Markov
    /// processes, whose kernel depends on the whole past.
    pub fn memory(&self) -> Option<usize> {
        match self {
            ProcessModel::Iid(_) => Some(0),
            ProcessModel::Markov(m) => Some(m.order()),
            ProcessModel::BinaryAr(m) => Some(m.xi.len()),
            ProcessModel::PoissonReg(m) => Some(m.xi.len()),
            ProcessModel::HiddenMarkov(_) => None,
            ProcessModel::Mixture(m) => Some(m.order()),
        }
    }

    /// Left conditional kernel `p(· | past)`, past given most recent last.
    /// Pasts shorter than the memory are left-padded with symbol 0.
    pub fn kernel_next_distribution(&self, past: &[Symbol]) -> Result<NextDistribution> {
        let alphabet = self.alphabet();
        if let Some(bad) = past.iter().find(|s| !alphabet.contains(**s)) {
            return Err(Error::SymbolOutOfRange { symbol: bad.0, alphabet: alphabet.finite().unwrap_or(0) });
        }
        Ok(match self {
            ProcessModel::Iid(m) => NextDistribution::Finite { probs: m.probs.clone() },
            ProcessModel::Markov(m) => {
                NextDistribution::Finite { probs: m.chain.row(m.chain.context_of(past)).to_vec() }
            }
            ProcessModel::BinaryAr(m) => {
                let plus = m.prob_plus(past);
                NextDistribution::Finite { probs: vec![1.0 - plus, plus] }
            }
            ProcessModel::PoissonReg(m) => NextDistribution::poisson(m.mean(past)),
            ProcessModel::HiddenMarkov(m) => NextDistribution::Finite { probs: m.predictive(past)? },
            ProcessModel::Mixture(m) => {
                NextDistribution::Finite { probs: (0..m.alphabet).map(|a| m.prob(past, a)).collect() }
            }
        })
    }

    /// One inverse-CDF draw from the kernel without allocating. Hidden Markov
    /// models are simulated through their base chain instead.
    pub(crate) fn draw(&self, past: &[Symbol], u: f64) -> Symbol {
        match self {
            ProcessModel::Iid(m) => Symbol(kernel::inverse_cdf(m.probs.iter().copied(), u)),
            ProcessModel::Markov(m) => {
                let row = m.chain.row(m.chain.context_of(past));
                Symbol(kernel::inverse_cdf(row.iter().copied(), u))
            }
            ProcessModel::BinaryAr(m) => {
                if u < 1.0 - m.prob_plus(past) {
                    Symbol(0)
                } else {
                    Symbol(1)
                }
            }
            ProcessModel::PoissonReg(m) => Symbol(kernel::poisson_inverse_cdf(m.mean(past), u)),
            ProcessModel::Mixture(m) => Symbol(kernel::inverse_cdf((0..m.alphabet).map(|a| m.prob(past, a)), u)),
            ProcessModel::HiddenMarkov(m) => {
                let base = m.base.chain();
                Symbol(kernel::inverse_cdf(base.row(base.context_of(past)).iter().copied(), u))
            }
        }
    }

    /// Lifts a finite-memory model on a finite alphabet to a [`FiniteChain`].
    /// Poisson regression is lifted on the alphabet truncated where the
    /// `Poisson(1)` tail drops below `1e-12`, with renormalized rows; the flag
    /// in the result reports that truncation.
    pub fn finite_chain(&self) -> Result<(FiniteChain, bool)> {
        match self {
            ProcessModel::Iid(m) => Ok((FiniteChain::new(m.probs.len(), 0, m.probs.clone())?, false)),
            ProcessModel::Markov(m) => Ok((m.chain.clone(), false)),
            ProcessModel::BinaryAr(m) => {
                let order = m.xi.len();
                let contexts = chain::checked_pow(2, order)
                    .filter(|&c| c <= DEFAULT_LAW_BUDGET as usize)
                    .ok_or(Error::BudgetExceeded { states: 1u128 << order.min(127), budget: DEFAULT_LAW_BUDGET })?;
                let mut rows = Vec::with_capacity(contexts * 2);
                let mut past = vec![Symbol(0); order];
                for c in 0..contexts {
                    fill_context(&mut past, c, 2);
                    let plus = m.prob_plus(&past);
                    rows.extend([1.0 - plus, plus]);
                }
                Ok((FiniteChain::new(2, order, rows)?, false))
            }
            ProcessModel::PoissonReg(m) => {
                let a = kernel::poisson_truncation(1.0) as usize + 1;
                let order = m.xi.len();
                let contexts = chain::checked_pow(a, order)
                    .filter(|&c| c <= DEFAULT_LAW_BUDGET as usize)
                    .ok_or(Error::BudgetExceeded { states: (a as u128).saturating_pow(order as u32), budget: DEFAULT_LAW_BUDGET })?;
                let mut rows = Vec::with_capacity(contexts * a);
                let mut past = vec![Symbol(0); order];
                for c in 0..contexts {
                    fill_context(&mut past, c, a);
                    let masses: Vec<f64> = kernel::PoissonMasses::new(m.mean(&past)).take(a).collect();
                    let total: f64 = masses.iter().sum();
                    rows.extend(masses.into_iter().map(|p| p / total));
                }
                Ok((FiniteChain::new(a, order, rows)?, true))
            }
            ProcessModel::Mixture(m) => {
                let order = m.order();
                let a = m.alphabet;
                let contexts = chain::checked_pow(a, order)
                    .filter(|&c| c <= DEFAULT_LAW_BUDGET as usize)
                    .ok_or(Error::BudgetExceeded { states: (a as u128).saturating_pow(order as u32), budget: DEFAULT_LAW_BUDGET })?;
                let mut rows = Vec::with_capacity(contexts * a);
                let mut past = vec![Symbol(0); order];
                for c in 0..contexts {
                    fill_context(&mut past, c, a);
                    rows.extend((0..a).map(|s| m.prob(&past, s)));
                }
                Ok((FiniteChain::new(a, order, rows)?, false))
            }
            ProcessModel::HiddenMarkov(_) => {
                Err(Error::InvalidArgument("hidden Markov processes have no finite-order lift".into()))
            }
        }
    }
}

/// Writes the digits of context `c` (oldest first) into `past`.
fn fill_context(past: &mut [Symbol], mut c: usize, a: usize) {
    for slot in past.iter_mut().rev() {
        *slot = Symbol((c % a) as u32);
        c /= a;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum ModelSpec {
    Iid {
        probs: Vec<f64>,
    },
    Markov {
        #[serde(default = "one")]
        order: usize,
        transitions: Vec<Vec<f64>>,
    },
    BinaryAr {
        xi0: f64,
        xi: Vec<f64>,
    },
    PoissonReg {
        xi: Vec<f64>,
        c: f64,
    },
    HiddenMarkov {
        transitions: Vec<Vec<f64>>,
        projection: Vec<u32>,
    },
    Mixture {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        memoryless: Option<MemorylessSpec>,
        components: Vec<ComponentSpec>,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MemorylessSpec {
    weight: f64,
    probs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentSpec {
    weight: f64,
    order: usize,
    transitions: Vec<Vec<f64>>,
}

impl TryFrom<ModelSpec> for ProcessModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        Ok(match spec {
            ModelSpec::Iid { probs } => ProcessModel::Iid(Iid::new(probs)?),
            ModelSpec::Markov { order, transitions } => ProcessModel::Markov(Markov::new(order, transitions)?),
            ModelSpec::BinaryAr { xi0, xi } => ProcessModel::BinaryAr(BinaryAr::new(xi0, xi)?),
            ModelSpec::PoissonReg { xi, c } => ProcessModel::PoissonReg(PoissonReg::new(xi, c)?),
            ModelSpec::HiddenMarkov { transitions, projection } => {
                ProcessModel::HiddenMarkov(HiddenMarkov::new(Markov::new(1, transitions)?, projection)?)
            }
            ModelSpec::Mixture { memoryless, components } => {
                let comps = components
                    .into_iter()
                    .map(|c| Ok((c.weight, Markov::new(c.order, c.transitions)?)))
                    .collect::<Result<Vec<_>>>()?;
                ProcessModel::Mixture(Mixture::new(memoryless.map(|m| (m.weight, m.probs)), comps)?)
            }
        })
    }
}

impl From<ProcessModel> for ModelSpec {
    fn from(m: ProcessModel) -> Self {
        match m {
            ProcessModel::Iid(m) => ModelSpec::Iid { probs: m.probs },
            ProcessModel::Markov(m) => ModelSpec::Markov { order: m.order(), transitions: m.transitions() },
            ProcessModel::BinaryAr(m) => ModelSpec::BinaryAr { xi0: m.xi0, xi: m.xi },
            ProcessModel::PoissonReg(m) => ModelSpec::PoissonReg { xi: m.xi, c: m.c },
            ProcessModel::HiddenMarkov(m) => {
                ModelSpec::HiddenMarkov { transitions: m.base.transitions(), projection: m.projection }
            }
            ProcessModel::Mixture(m) => ModelSpec::Mixture {
                memoryless: m.memoryless.map(|(weight, probs)| MemorylessSpec { weight, probs }),
                components: m
                    .components
                    .into_iter()
                    .map(|(weight, c)| ComponentSpec { weight, order: c.order(), transitions: c.transitions() })
                    .collect(),
            },
        }
    }
}

impl std::fmt::Display for ProcessModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| std::fmt::Error)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q_markov() -> ProcessModel {
        ProcessModel::Markov(Markov::new(1, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap())
    }

    #[test]
    fn kernel_examples() {
        let ar = ProcessModel::BinaryAr(BinaryAr::new(0.0, vec![0.0; 4]).unwrap());
        let d = ar.kernel_next_distribution(&[Symbol(1), Symbol(0)]).unwrap();
        assert_eq!(d, NextDistribution::Finite { probs: vec![0.5, 0.5] });

        let pr = ProcessModel::PoissonReg(PoissonReg::new(vec![0.0; 3], 2.0).unwrap());
        let d = pr.kernel_next_distribution(&[Symbol(7)]).unwrap();
        assert!((d.prob(Symbol(0)) - 0.367_879_441_171_442_3).abs() < 1e-15);

        let d = q_markov().kernel_next_distribution(&[Symbol(1), Symbol(0)]).unwrap();
        assert_eq!(d, NextDistribution::Finite { probs: vec![0.9, 0.1] });
    }

    #[test]
    fn kernel_rejects_invalid_past() {
        assert!(matches!(
            q_markov().kernel_next_distribution(&[Symbol(2)]),
            Err(Error::SymbolOutOfRange { symbol: 2, alphabet: 2 })
        ));
    }

    #[test]
    fn kernels_are_normalized() {
        let models = [
            q_markov(),
            ProcessModel::BinaryAr(BinaryAr::new(0.3, vec![0.5, 0.25, 0.125]).unwrap()),
            ProcessModel::Mixture(
                Mixture::new(
                    Some((0.5, vec![0.2, 0.8])),
                    vec![(0.5, Markov::new(2, vec![vec![0.5, 0.5], vec![0.1, 0.9], vec![0.7, 0.3], vec![1.0, 0.0]]).unwrap())],
                )
                .unwrap(),
            ),
            ProcessModel::HiddenMarkov(
                HiddenMarkov::new(
                    Markov::new(1, vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]]).unwrap(),
                    vec![0, 0, 1],
                )
                .unwrap(),
            ),
        ];
        let pasts: [&[Symbol]; 3] = [&[], &[Symbol(1)], &[Symbol(0), Symbol(1), Symbol(1), Symbol(0)]];
        for m in &models {
            for past in pasts {
                let d = m.kernel_next_distribution(past).unwrap();
                assert!((d.masses().iter().sum::<f64>() - 1.0).abs() < 1e-10, "{}", m.family());
            }
        }
        let pr = ProcessModel::PoissonReg(PoissonReg::new(vec![-0.5, -0.2], 3.0).unwrap());
        let d = pr.kernel_next_distribution(&[Symbol(4), Symbol(1)]).unwrap();
        assert!(d.masses().iter().sum::<f64>() >= kernel::POISSON_TRUNCATION_MASS);
    }

    #[test]
    fn hidden_markov_predictive_matches_pushforward() {
        let base = Markov::new(1, vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]]).unwrap();
        let hmm = HiddenMarkov::new(base.clone(), vec![0, 0, 1]).unwrap();
        // P(Y_1 = 1 | Y_0 = 1) = P(X_1 = 2 | X_0 = 2) since state 2 is the only preimage of 1.
        let p = hmm.predictive(&[Symbol(1)]).unwrap();
        assert!((p[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert!(Iid::new(vec![0.5, 0.4]).is_err());
        assert!(Markov::new(1, vec![vec![0.5, 0.5], vec![1.0]]).is_err());
        assert!(Markov::new(2, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).is_err());
        assert!(BinaryAr::new(0.0, vec![-0.1]).is_err());
        assert!(PoissonReg::new(vec![0.1], 1.0).is_err());
        assert!(PoissonReg::new(vec![-0.1], 0.0).is_err());
        let base = Markov::new(1, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(HiddenMarkov::new(base, vec![0, 1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"family":"mixture","memoryless":{"weight":0.25,"probs":[0.5,0.5]},
            "components":[{"weight":0.75,"order":1,"transitions":[[0.9,0.1],[0.2,0.8]]}]}"#;
        let m: ProcessModel = serde_json::from_str(text).unwrap();
        let back: ProcessModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<ProcessModel>(r#"{"family":"iid","probs":[0.3]}"#).is_err());
    }
}
