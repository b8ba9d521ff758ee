//! Exact stationary laws of finitely many coordinates.

use serde::Serialize;

use super::ProcessModel;
use crate::error::{Error, Result};
use crate::series::{IndexPair, Pattern};

/// Default cap on the number of enumerated states (`A^width`).
pub const DEFAULT_LAW_BUDGET: u64 = 10_000_000;

/// Stationary joint law of `X_F` for a finite set of positions `F`.
///
/// Probabilities are stored densely over `A^|F|`, indexed in lexicographic
/// pattern order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactLaw {
    alphabet: usize,
    positions: Vec<i64>,
    probs: Vec<f64>,
    truncated: bool,
}

impl ExactLaw {
    pub fn new(alphabet: usize, positions: Vec<i64>, probs: Vec<f64>) -> Result<Self> {
        let mut sorted = positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted != positions {
            return Err(Error::InvalidArgument("law positions must be strictly increasing".into()));
        }
        if Some(probs.len()) != super::chain::checked_pow(alphabet, positions.len()) {
            return Err(Error::InvalidArgument("law size does not match alphabet and support".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidArgument("law has negative or non-finite mass".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("law sums to {total}, not 1")));
        }
        Ok(ExactLaw { alphabet, positions, probs, truncated: false })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// True when the law lives on a truncated version of an unbounded alphabet.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn prob(&self, pattern: &Pattern) -> f64 {
        if pattern.len() != self.positions.len() {
            return 0.0;
        }
        pattern.index(self.alphabet).map_or(0.0, |i| self.probs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pattern, f64)> + '_ {
        let len = self.positions.len();
        self.probs.iter().enumerate().map(move |(i, &p)| (Pattern::from_index(i, len, self.alphabet), p))
    }

    /// Law of the sub-vector `X_{F'}` for `F' ⊆ F`.
    pub fn marginal(&self, subset: &[i64]) -> Result<ExactLaw> {
        let keep: Vec<usize> = subset
            .iter()
            .map(|x| {
                self.positions
                    .binary_search(x)
                    .map_err(|_| Error::InvalidArgument(format!("position {x} not in law support")))
            })
            .collect::<Result<_>>()?;
        let a = self.alphabet;
        let len = self.positions.len();
        let mut out = vec![0.0; super::chain::checked_pow(a, keep.len()).unwrap()];
        for (i, &p) in self.probs.iter().enumerate() {
            let mut j = 0usize;
            for &k in &keep {
                j = j * a + digit(i, k, len, a);
            }
            out[j] += p;
        }
        Ok(ExactLaw { alphabet: a, positions: subset.to_vec(), probs: out, truncated: self.truncated })
    }

    /// Image law under a symbol map `f` onto `0..target`.
    pub fn pushforward(&self, f: &[u32], target: usize) -> ExactLaw {
        let a = self.alphabet;
        let len = self.positions.len();
        let mut out = vec![0.0; target.pow(len as u32)];
        for (i, &p) in self.probs.iter().enumerate() {
            let mut j = 0usize;
            for k in 0..len {
                j = j * target + f[digit(i, k, len, a)] as usize;
            }
            out[j] += p;
        }
        ExactLaw { alphabet: target, positions: self.positions.clone(), probs: out, truncated: self.truncated }
    }

    /// Rearranges the law on `D ∪ G` into a `b × a` table of joint masses
    /// `P(X_D = b, X_G = a)`. The law's positions must equal the pair's union.
    pub fn joint_table(&self, pair: &IndexPair) -> Result<JointTable> {
        if self.positions != pair.union() {
            return Err(Error::InvalidArgument(format!(
                "law support {:?} does not match D ∪ G = {:?}",
                self.positions,
                pair.union()
            )));
        }
        let a = self.alphabet;
        let len = self.positions.len();
        let d_at: Vec<usize> = pair.data().iter().map(|x| self.positions.binary_search(x).unwrap()).collect();
        let g_at: Vec<usize> = pair.guess().iter().map(|x| self.positions.binary_search(x).unwrap()).collect();
        let n_a = a.pow(g_at.len() as u32);
        let n_b = a.pow(d_at.len() as u32);
        let mut mass = vec![0.0; n_a * n_b];
        for (i, &p) in self.probs.iter().enumerate() {
            let b = d_at.iter().fold(0usize, |acc, &k| acc * a + digit(i, k, len, a));
            let g = g_at.iter().fold(0usize, |acc, &k| acc * a + digit(i, k, len, a));
            mass[b * n_a + g] = p;
        }
        Ok(JointTable { alphabet: a, data_len: d_at.len(), guess_len: g_at.len(), mass, truncated: self.truncated })
    }
}

#[inline]
fn digit(index: usize, k: usize, len: usize, a: usize) -> usize {
    (index / a.pow((len - 1 - k) as u32)) % a
}

/// Joint masses `P(X_D = b, X_G = a)` laid out as rows `b`, columns `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    alphabet: usize,
    data_len: usize,
    guess_len: usize,
    mass: Vec<f64>,
    truncated: bool,
}

impl JointTable {
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn data_patterns(&self) -> usize {
        self.alphabet.pow(self.data_len as u32)
    }

    pub fn guess_patterns(&self) -> usize {
        self.alphabet.pow(self.guess_len as u32)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// Row of masses over `a` for data pattern index `b`.
    pub fn row(&self, b: usize) -> &[f64] {
        let n = self.guess_patterns();
        &self.mass[b * n..(b + 1) * n]
    }

    pub fn data_pattern(&self, b: usize) -> Pattern {
        Pattern::from_index(b, self.data_len, self.alphabet)
    }

    pub fn guess_pattern(&self, a: usize) -> Pattern {
        Pattern::from_index(a, self.guess_len, self.alphabet)
    }

    pub fn data_len(&self) -> usize {
        self.data_len
    }

    pub fn guess_len(&self) -> usize {
        self.guess_len
    }
}

/// Exact stationary law of `X_F` with the default enumeration budget.
pub fn exact_finite_law(model: &ProcessModel, positions: &[i64]) -> Result<ExactLaw> {
    exact_finite_law_with_budget(model, positions, DEFAULT_LAW_BUDGET)
}

/// Exact stationary law of `X_F`: stationary vector of the order-lifted chain,
/// forward products across the span of `F`, then marginalization onto `F`.
/// Hidden Markov laws are computed on the base chain and pushed through the
/// projection.
pub fn exact_finite_law_with_budget(model: &ProcessModel, positions: &[i64], budget: u64) -> Result<ExactLaw> {
    let mut f = positions.to_vec();
    f.sort_unstable();
    f.dedup();
    let (Some(&lo), Some(&hi)) = (f.first(), f.last()) else {
        return Err(Error::InvalidArgument("empty support".into()));
    };
    let span = (hi - lo + 1) as usize;

    let (chain, truncated, projection) = match model {
        ProcessModel::HiddenMarkov(h) => {
            (h.base().chain().clone(), false, Some((h.projection().to_vec(), h.observed_alphabet())))
        }
        _ => {
            let (chain, truncated) = model.finite_chain()?;
            (chain, truncated, None)
        }
    };
    let window = chain.window_law(span, budget)?;
    let full = ExactLaw {
        alphabet: chain.alphabet(),
        positions: (lo..=hi).collect(),
        probs: window,
        truncated,
    };
    let law = if f.len() == span { full } else { full.marginal(&f)? };
    Ok(match projection {
        Some((map, target)) => law.pushforward(&map, target),
        None => law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{HiddenMarkov, Iid, Markov, Mixture};
    use crate::series::Alphabet;

    fn iid532() -> ProcessModel {
        ProcessModel::Iid(Iid::new(vec![0.5, 0.3, 0.2]).unwrap())
    }

    fn q() -> ProcessModel {
        ProcessModel::Markov(Markov::new(1, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap())
    }

    #[test]
    fn iid_laws() {
        let law = exact_finite_law(&iid532(), &[1]).unwrap();
        assert_eq!(law.probs(), &[0.5, 0.3, 0.2]);
        let law = exact_finite_law(&iid532(), &[1, 2]).unwrap();
        // product law, brute force
        for a in 0..3u32 {
            for b in 0..3u32 {
                let p = [0.5, 0.3, 0.2][a as usize] * [0.5, 0.3, 0.2][b as usize];
                assert!((law.prob(&Pattern::from_ids(&[a, b])) - p).abs() < 1e-15);
            }
        }
        assert!((law.prob(&Pattern::from_ids(&[0, 0])) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn markov_pair_law() {
        let law = exact_finite_law(&q(), &[1, 2]).unwrap();
        assert!((law.prob(&Pattern::from_ids(&[0, 0])) - 0.6).abs() < 1e-12);
    }

    /// Brute-force path enumeration: π(x_1) Π Q(x_i, x_{i+1}), π from the
    /// closed form of a two-state chain.
    fn brute_markov(q: [[f64; 2]; 2], positions: &[i64]) -> Vec<f64> {
        let pi = [q[1][0] / (q[0][1] + q[1][0]), q[0][1] / (q[0][1] + q[1][0])];
        let lo = positions[0];
        let span = (positions[positions.len() - 1] - lo + 1) as usize;
        let mut out = vec![0.0; 1 << positions.len()];
        for path in 0..(1usize << span) {
            let x: Vec<usize> = (0..span).map(|i| (path >> (span - 1 - i)) & 1).collect();
            let mut p = pi[x[0]];
            for w in x.windows(2) {
                p *= q[w[0]][w[1]];
            }
            let idx = positions.iter().fold(0, |acc, &pos| acc * 2 + x[(pos - lo) as usize]);
            out[idx] += p;
        }
        out
    }

    #[test]
    fn markov_law_matches_path_enumeration() {
        let qm = [[0.9, 0.1], [0.2, 0.8]];
        for f in [vec![1], vec![1, 2], vec![1, 3], vec![2, 4], vec![1, 2, 4], vec![1, 2, 3, 4]] {
            let law = exact_finite_law(&q(), &f).unwrap();
            for (x, y) in law.probs().iter().zip(brute_markov(qm, &f)) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn marginals_are_consistent() {
        let m = ProcessModel::Mixture(
            Mixture::new(
                Some((0.3, vec![0.2, 0.5, 0.3])),
                vec![(
                    0.7,
                    Markov::new(1, vec![vec![0.6, 0.3, 0.1], vec![0.1, 0.1, 0.8], vec![0.3, 0.4, 0.3]]).unwrap(),
                )],
            )
            .unwrap(),
        );
        let full = exact_finite_law(&m, &[1, 2, 4]).unwrap();
        for sub in [vec![1], vec![2], vec![4], vec![1, 4], vec![2, 4]] {
            let direct = exact_finite_law(&m, &sub).unwrap();
            let via = full.marginal(&sub).unwrap();
            for (x, y) in direct.probs().iter().zip(via.probs()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hidden_markov_fiber_sums() {
        let base = Markov::new(1, vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.6, 0.3], vec![0.3, 0.3, 0.4]]).unwrap();
        let base_law = exact_finite_law(&ProcessModel::Markov(base.clone()), &[1]).unwrap();
        let hmm = ProcessModel::HiddenMarkov(HiddenMarkov::new(base, vec![1, 0, 1]).unwrap());
        assert_eq!(hmm.alphabet(), Alphabet::Finite(2));
        let law = exact_finite_law(&hmm, &[1]).unwrap();
        assert!((law.probs()[0] - base_law.probs()[1]).abs() < 1e-12);
        assert!((law.probs()[1] - base_law.probs()[0] - base_law.probs()[2]).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_budget_errors() {
        assert!(matches!(
            exact_finite_law_with_budget(&q(), &[1, 40], 1_000_000),
            Err(Error::BudgetExceeded { .. })
        ));
        let pr = ProcessModel::PoissonReg(crate::models::PoissonReg::new(vec![-0.3], 2.0).unwrap());
        let law = exact_finite_law(&pr, &[1, 2]).unwrap();
        assert!(law.is_truncated());
        assert!((law.probs().iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn joint_table_layout() {
        let pair = IndexPair::new(&[1], &[2]).unwrap();
        let law = exact_finite_law(&q(), &pair.union()).unwrap();
        let t = law.joint_table(&pair).unwrap();
        assert!((t.row(0)[0] - 0.6).abs() < 1e-12);
        assert!((t.row(0)[1] - 2.0 / 3.0 * 0.1).abs() < 1e-12);
        assert!((t.row(1)[0] - 1.0 / 3.0 * 0.2).abs() < 1e-12);
        // interpolation: G strictly inside D's span
        let pair = IndexPair::new(&[1, 3], &[2]).unwrap();
        let law = exact_finite_law(&q(), &pair.union()).unwrap();
        let t = law.joint_table(&pair).unwrap();
        assert_eq!((t.data_patterns(), t.guess_patterns()), (4, 2));
        let p = law.prob(&Pattern::from_ids(&[0, 0, 1]));
        assert_eq!(t.row(0b01)[0], p);
    }
}
