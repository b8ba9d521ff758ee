//! Finite-order chains on a finite alphabet, lifted to their context space.
//!
//! A chain of order `k` on `A` symbols stores one next-symbol row per context
//! of `k` symbols. Contexts are indexed in mixed radix with the oldest symbol
//! most significant, so the most recent symbol is `context % A` and the last
//! `j` symbols are `context % A^j`.

use crate::error::{Error, Result};
use crate::series::Symbol;

/// Fixed-point tolerance (L1) of the stationary power iteration.
pub const STATIONARY_TOLERANCE: f64 = 1e-13;
/// Iteration cap of the stationary power iteration.
pub const STATIONARY_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChain {
    alphabet: usize,
    order: usize,
    rows: Vec<f64>,
}

impl FiniteChain {
    /// `rows` has `A^order · A` entries, one row per context.
    pub fn new(alphabet: usize, order: usize, rows: Vec<f64>) -> Result<Self> {
        let contexts = checked_pow(alphabet, order)
            .ok_or_else(|| Error::InvalidModel(format!("{alphabet}^{order} contexts overflow")))?;
        if rows.len() != contexts * alphabet {
            return Err(Error::InvalidModel(format!(
                "expected {} transition entries, got {}",
                contexts * alphabet,
                rows.len()
            )));
        }
        Ok(FiniteChain { alphabet, order, rows })
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contexts(&self) -> usize {
        self.rows.len() / self.alphabet
    }

    pub fn row(&self, context: usize) -> &[f64] {
        &self.rows[context * self.alphabet..(context + 1) * self.alphabet]
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    /// Context index of the last `order` symbols of `past` (most recent last),
    /// left-padding with symbol 0 when the past is shorter.
    pub fn context_of(&self, past: &[Symbol]) -> usize {
        let k = self.order;
        let mut ctx = 0usize;
        for i in 0..k {
            // position i of the context window, oldest first
            let from_end = k - i;
            let s = if from_end <= past.len() { past[past.len() - from_end].id() } else { 0 };
            ctx = ctx * self.alphabet + s;
        }
        ctx
    }

    #[inline]
    pub fn next_context(&self, context: usize, a: usize) -> usize {
        if self.order == 0 {
            0
        } else {
            let shift = self.contexts() / self.alphabet;
            (context % shift) * self.alphabet + a
        }
    }

    /// Stationary law of `order` consecutive symbols, by power iteration from
    /// the uniform start. Uniqueness is checked by a second run started from
    /// a point mass.
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let n = self.contexts();
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let uniform = self.power_iterate(vec![1.0 / n as f64; n])?;
        let mut point = vec![0.0; n];
        point[0] = 1.0;
        let from_point = self.power_iterate(point)?;
        let gap: f64 = uniform.iter().zip(&from_point).map(|(x, y)| (x - y).abs()).sum();
        if gap > 1e-10 {
            return Err(Error::NonErgodic(format!(
                "power iteration converged to different vectors (L1 gap {gap:.3e})"
            )));
        }
        Ok(uniform)
    }

    fn power_iterate(&self, mut pi: Vec<f64>) -> Result<Vec<f64>> {
        let n = pi.len();
        let mut next = vec![0.0; n];
        for _ in 0..STATIONARY_MAX_ITERATIONS {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (c, &mass) in pi.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for (a, &p) in self.row(c).iter().enumerate() {
                    next[self.next_context(c, a)] += mass * p;
                }
            }
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= total);
            let change: f64 = pi.iter().zip(&next).map(|(x, y)| (x - y).abs()).sum();
            std::mem::swap(&mut pi, &mut next);
            if change <= STATIONARY_TOLERANCE {
                return Ok(pi);
            }
        }
        Err(Error::NonErgodic(format!(
            "power iteration did not converge in {STATIONARY_MAX_ITERATIONS} iterations"
        )))
    }

    /// Stationary law of `len` consecutive symbols, indexed oldest-first in
    /// mixed radix. `A^max(len, order)` must not exceed `budget`.
    pub fn window_law(&self, len: usize, budget: u64) -> Result<Vec<f64>> {
        let a = self.alphabet;
        let width = len.max(self.order);
        let states = (a as u128).checked_pow(width as u32).unwrap_or(u128::MAX);
        if states > budget as u128 {
            return Err(Error::BudgetExceeded { states, budget });
        }
        let pi = self.stationary()?;
        if len <= self.order {
            let drop = checked_pow(a, self.order - len).expect("within budget");
            let mut out = vec![0.0; checked_pow(a, len).expect("within budget")];
            for (c, &m) in pi.iter().enumerate() {
                out[c / drop] += m;
            }
            return Ok(out);
        }
        let mut law = pi;
        let ctx_mod = self.contexts();
        for _ in self.order..len {
            let mut next = vec![0.0; law.len() * a];
            for (idx, &m) in law.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let row = self.row(idx % ctx_mod);
                for (s, &p) in row.iter().enumerate() {
                    next[idx * a + s] = m * p;
                }
            }
            law = next;
        }
        Ok(law)
    }

    /// Exact variation of the kernel at depth `j`: the largest total-variation
    /// distance between rows whose contexts agree on the last `j` symbols.
    /// Zero for `j ≥ order`.
    pub fn variation(&self, j: usize) -> f64 {
        if j >= self.order {
            return 0.0;
        }
        let n = self.contexts();
        let modulus = checked_pow(self.alphabet, j).unwrap();
        let mut worst = 0.0f64;
        for c1 in 0..n {
            for c2 in (c1 + 1)..n {
                if c1 % modulus != c2 % modulus {
                    continue;
                }
                worst = worst.max(total_variation(self.row(c1), self.row(c2)));
            }
        }
        worst
    }

    pub fn max_entry(&self) -> f64 {
        self.rows.iter().copied().fold(0.0, f64::max)
    }
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

pub fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> FiniteChain {
        FiniteChain::new(2, 1, vec![0.9, 0.1, 0.2, 0.8]).unwrap()
    }

    #[test]
    fn stationary_of_two_state_chain() {
        let pi = two_state().stationary().unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn window_law_pairs() {
        let law = two_state().window_law(2, 1_000).unwrap();
        assert!((law[0] - 0.6).abs() < 1e-12);
        assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reducible_chain_is_rejected() {
        let c = FiniteChain::new(2, 1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(c.stationary(), Err(Error::NonErgodic(_))));
    }

    #[test]
    fn periodic_chain_is_rejected() {
        let c = FiniteChain::new(2, 1, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(c.stationary(), Err(Error::NonErgodic(_))));
    }

    #[test]
    fn dobrushin_coefficient() {
        assert!((two_state().variation(0) - 0.7).abs() < 1e-15);
        assert_eq!(two_state().variation(1), 0.0);
    }

    #[test]
    fn context_padding_and_shift() {
        let c = FiniteChain::new(3, 2, vec![1.0 / 3.0; 27]).unwrap();
        assert_eq!(c.context_of(&[Symbol(2)]), 2);
        assert_eq!(c.context_of(&[Symbol(1), Symbol(0), Symbol(2)]), 2);
        assert_eq!(c.next_context(c.context_of(&[Symbol(1), Symbol(2)]), 0), 6);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(two_state().window_law(30, 1_000_000), Err(Error::BudgetExceeded { .. })));
    }
}
