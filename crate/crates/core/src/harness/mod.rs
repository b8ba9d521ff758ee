//! Experiment configuration, seeded orchestration, file formats and the
//! command-line interface.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod io;

pub use cli::cli_main;
pub use config::{Analyses, ExperimentConfig, MarginFamily, Outputs};
pub use experiment::{run_experiment, threads_from_env, ExperimentResult, ExperimentRow, GibbsSummary, THREADS_ENV};
pub use io::{load_sample, read_sample, save_sample, write_sample};
