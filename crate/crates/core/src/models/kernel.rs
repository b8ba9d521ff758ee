//! Next-symbol distributions returned by left conditional kernels.

use serde::Serialize;

use crate::series::Symbol;

/// Cumulative mass at which unbounded (Poisson) kernels are truncated.
pub const POISSON_TRUNCATION_MASS: f64 = 1.0 - 1e-12;

/// Binary link `Υ(u) = 1 / (1 + e^{−2u})`, satisfying `Υ(u) + Υ(−u) = 1`.
#[inline]
pub fn upsilon(u: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * u).exp())
}

/// Distribution of the next symbol given a past.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NextDistribution {
    /// Probabilities indexed by symbol id.
    Finite { probs: Vec<f64> },
    /// Poisson law with the given mean, evaluated lazily. `truncation` is the
    /// first count at which the cumulative mass reaches
    /// [`POISSON_TRUNCATION_MASS`].
    Poisson { mean: f64, truncation: u32 },
}

impl NextDistribution {
    pub fn poisson(mean: f64) -> Self {
        NextDistribution::Poisson { mean, truncation: poisson_truncation(mean) }
    }

    pub fn prob(&self, a: Symbol) -> f64 {
        match self {
            NextDistribution::Finite { probs } => probs.get(a.id()).copied().unwrap_or(0.0),
            NextDistribution::Poisson { mean, .. } => poisson_pmf(*mean, a.0),
        }
    }

    /// Masses up to and including the truncation point (all masses for finite laws).
    pub fn masses(&self) -> Vec<f64> {
        match self {
            NextDistribution::Finite { probs } => probs.clone(),
            NextDistribution::Poisson { mean, truncation } => {
                PoissonMasses::new(*mean).take(*truncation as usize + 1).collect()
            }
        }
    }

    /// Inverse-CDF draw for a uniform `u ∈ [0, 1)`, scanning symbols in id order.
    pub fn sample(&self, u: f64) -> Symbol {
        match self {
            NextDistribution::Finite { probs } => Symbol(inverse_cdf(probs.iter().copied(), u)),
            NextDistribution::Poisson { mean, .. } => Symbol(poisson_inverse_cdf(*mean, u)),
        }
    }
}

/// Inverse CDF over masses listed in symbol order. If rounding leaves `u`
/// above the accumulated total, the last symbol with positive mass is returned.
pub fn inverse_cdf(masses: impl Iterator<Item = f64>, u: f64) -> u32 {
    let mut cum = 0.0;
    let mut last_positive = 0u32;
    for (i, p) in masses.enumerate() {
        if p > 0.0 {
            last_positive = i as u32;
        }
        cum += p;
        if u < cum {
            return i as u32;
        }
    }
    last_positive
}

/// Iterator over Poisson masses `e^{−v} v^a / a!`, `a = 0, 1, ...`.
#[derive(Debug, Clone)]
pub struct PoissonMasses {
    mean: f64,
    next: f64,
    a: u32,
}

impl PoissonMasses {
    pub fn new(mean: f64) -> Self {
        PoissonMasses { mean, next: (-mean).exp(), a: 0 }
    }
}

impl Iterator for PoissonMasses {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.next;
        self.a += 1;
        self.next = out * self.mean / self.a as f64;
        Some(out)
    }
}

pub fn poisson_pmf(mean: f64, a: u32) -> f64 {
    PoissonMasses::new(mean).nth(a as usize).unwrap_or(0.0)
}

/// First count where the Poisson CDF reaches [`POISSON_TRUNCATION_MASS`].
pub fn poisson_truncation(mean: f64) -> u32 {
    let mut cum = 0.0;
    for (a, p) in PoissonMasses::new(mean).enumerate() {
        cum += p;
        if cum >= POISSON_TRUNCATION_MASS || p == 0.0 && a as f64 > mean {
            return a as u32;
        }
    }
    unreachable!("Poisson iterator is infinite")
}

/// Accumulates the CDF until `u` is bracketed, stopping at the truncation point.
pub fn poisson_inverse_cdf(mean: f64, u: f64) -> u32 {
    let mut cum = 0.0;
    for (a, p) in PoissonMasses::new(mean).enumerate() {
        cum += p;
        if u < cum || cum >= POISSON_TRUNCATION_MASS || (p == 0.0 && a as f64 > mean) {
            return a as u32;
        }
    }
    unreachable!("Poisson iterator is infinite")
}
