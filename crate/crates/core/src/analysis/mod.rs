//! Quantities around the estimator: risk, margin and gap, sample-size and
//! rate bounds, concentration of empirical pattern frequencies, two-point
//! minimax constructions, divergence inequalities and Gibbs-potential bounds.

pub mod bounds;
pub mod divergence;
pub mod dkw;
pub mod gibbs;
pub mod lecam;
pub mod risk;

pub use bounds::{bound_report, rate_regime_bound, sample_size_bound, BoundReport, Regime, SampleSizeBound};
pub use divergence::{kl_chi2, KlChi2};
pub use dkw::{dkw_bound, dkw_u, empirical_sup_deviation, DkwBound};
pub use gibbs::{gibbs_gamma, GibbsBound, GibbsPotential, InteractionShape, TailRule};
pub use lecam::{bayes_error_oracle, bretagnolle_huber_check, lecam_pair, BretagnolleHuber, LeCamPair, LeCamRegime};
pub use risk::{
    beta_gap, beta_upper_bound, excess_risk_exact, excess_risk_mc, margin_delta, MarginReport, RiskReport, RiskSummary,
};
