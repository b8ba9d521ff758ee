//! Pathwise guessing for categorical time series.
//!
//! Given a sample `X_1..X_n`, a data set `D` and a guess set `G` of integer
//! offsets, the estimator counts every shifted occurrence of the pattern pair
//! `(X_D, X_G)` and guesses, for each observed data pattern `b`, the guess
//! pattern seen most often alongside it.
//!
//! The crate is organized as:
//! - [`series`]: symbols, patterns, samples and index-set geometry;
//! - [`models`]: process families, their kernels, exact laws and memory-decay constants;
//! - [`sampler`]: seeded, reproducible simulation;
//! - [`estimator`]: window counting and the argmax guess rule;
//! - [`analysis`]: excess risk, margin and gap, sample-size and concentration bounds,
//!   two-point lower bounds and Gibbs-potential calculus;
//! - [`harness`]: experiment configuration, orchestration and output files.

pub mod analysis;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod models;
pub mod sampler;
pub mod series;

pub use error::{Error, Result};
pub use estimator::{count_patterns, fit_guess_rule, CountTable, GuessRule};
pub use models::{exact_finite_law, ExactLaw, ProcessModel};
pub use sampler::{simulate, SimulationPlan};
pub use series::{window_count, Alphabet, IndexPair, Pattern, Sample, Symbol};

/// Tool version embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
