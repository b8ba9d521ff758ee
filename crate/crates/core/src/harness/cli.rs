//! The `pathguess` command line.
//!
//! Exit status is 0 on success, 1 on invalid input or usage and 2 on runtime
//! failure. Results go to `--out` (or standard output); diagnostics go to
//! standard error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{run_experiment, threads_from_env};
use super::io::{load_sample, save_sample, write_sample};
use crate::analysis::bounds::bound_report;
use crate::analysis::dkw::{dkw_bound, empirical_sup_deviation};
use crate::analysis::gibbs::{gibbs_gamma, GibbsPotential};
use crate::analysis::lecam::{bretagnolle_huber_check, lecam_pair, LeCamRegime, MAX_ORACLE_N};
use crate::analysis::risk::{excess_risk_exact, excess_risk_mc};
use crate::error::{Error, Result};
use crate::estimator::{count_patterns, fit_guess_rule, GuessRule};
use crate::models::{exact_finite_law, ProcessModel};
use crate::sampler::{simulate, SimulationPlan};
use crate::series::{Alphabet, IndexPair, Pattern};

#[derive(Debug, Parser)]
#[command(name = "pathguess", version, about = "Pathwise guessing for categorical time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a trajectory of a model.
    Simulate(SimulateArgs),
    /// Count pattern pairs in a sample.
    Count(SampleArgs),
    /// Fit the guess rule on a sample, or apply a fitted rule.
    Guess(GuessArgs),
    /// Excess risk of a rule (exact) or of fitted rules (Monte Carlo).
    Risk(RiskArgs),
    /// Margin, gap, memory decay and sample-size bound of a model.
    Bounds(BoundsArgs),
    /// Concentration bound for empirical pattern frequencies.
    Dkw(DkwArgs),
    /// Two-point lower-bound construction.
    Lecam(LeCamArgs),
    /// Memory-decay bound for the long-range Ising chain.
    Gibbs(GibbsArgs),
    /// Run an experiment configuration.
    Experiment(ExperimentArgs),
}

/// Comma-separated integer offsets. Negative lists are passed as
/// `--D=-2,-1`; an empty list as `--D=` or by omitting the flag.
#[derive(Debug, Clone, Default)]
struct Offsets(Vec<i64>);

fn parse_offsets(s: &str) -> std::result::Result<Offsets, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| format!("`{t}` is not an integer offset")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Offsets)
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Data offsets, comma separated (may be empty).
    #[arg(long = "D", value_parser = parse_offsets, default_value = "")]
    data: Offsets,
    /// Guess offsets, comma separated.
    #[arg(long = "G", value_parser = parse_offsets)]
    guess: Offsets,
}

impl PairArgs {
    fn pair(&self) -> Result<IndexPair> {
        IndexPair::new(&self.data.0, &self.guess.0)
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Model file (JSON with a `family` tag).
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Number of past symbols seen by long regression kernels.
    #[arg(long)]
    memory: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    sample: PathBuf,
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GuessArgs {
    /// Sample to fit on.
    #[arg(long, required_unless_present = "rule")]
    sample: Option<PathBuf>,
    /// Previously fitted rule to apply instead.
    #[arg(long, conflicts_with = "sample")]
    rule: Option<PathBuf>,
    #[arg(long = "D", value_parser = parse_offsets, default_value = "")]
    data: Offsets,
    #[arg(long = "G", value_parser = parse_offsets, required_unless_present = "rule")]
    guess: Option<Offsets>,
    /// Data pattern to guess for, e.g. `0,1`; prints the guess only.
    #[arg(long)]
    query: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RiskArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    pair: PairArgs,
    /// Fitted rule; its risk is evaluated exactly.
    #[arg(long, conflicts_with_all = ["sample", "n"])]
    rule: Option<PathBuf>,
    /// Sample to fit a rule on; its risk is evaluated exactly.
    #[arg(long, conflicts_with = "n")]
    sample: Option<PathBuf>,
    /// Monte Carlo over `replicates` simulated samples of this length.
    #[arg(long, requires = "seed")]
    n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DkwArgs {
    #[arg(long)]
    u: f64,
    #[arg(long)]
    n: usize,
    /// Diameter `max S − min S`.
    #[arg(long)]
    k: usize,
    /// `|S|`.
    #[arg(long)]
    s_size: usize,
    #[arg(long)]
    gamma: f64,
    /// Sample and model to measure the empirical deviation over `--S`.
    #[arg(long, requires_all = ["model", "s"])]
    sample: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long = "S", value_parser = parse_offsets)]
    s: Option<Offsets>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LeCamArgs {
    #[arg(long)]
    n: usize,
    /// Alphabet size; 0 for an unbounded alphabet.
    #[arg(long)]
    alphabet: usize,
    #[command(flatten)]
    pair: PairArgs,
    /// Use the margin family with this `δ_n` instead of the root-n family.
    #[arg(long)]
    delta_n: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GibbsArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 2)]
    alphabet: usize,
    #[arg(long, default_value_t = 2000)]
    k_max: usize,
    /// Also print every variation bound.
    #[arg(long)]
    full: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output; overrides the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON output; overrides the configuration.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Worker threads; defaults to PATHGUESS_THREADS or the available cores.
    #[arg(long)]
    threads: Option<usize>,
}

/// Runs the command line and returns the process exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("pathguess: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn load_model(path: &Path) -> Result<ProcessModel> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Pretty JSON with sorted keys.
fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    emit_text(&(serde_json::to_string_pretty(&serde_json::to_value(value)?)? + "\n"), out)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => {
            let mut plan = SimulationPlan::new(load_model(&a.model)?, a.n, a.seed)?;
            if let Some(b) = a.burn_in {
                plan = plan.with_burn_in(b);
            }
            if let Some(m) = a.memory {
                plan = plan.with_memory_truncation(m);
            }
            let sample = simulate(&plan)?;
            match a.out {
                Some(p) => save_sample(&p, &sample),
                None => write_sample(std::io::stdout().lock(), &sample),
            }
        }
        Command::Count(a) => {
            let table = count_patterns(&load_sample(&a.sample)?, &a.pair.pair()?);
            emit_json(&table, a.out.as_deref())
        }
        Command::Guess(a) => {
            let rule: GuessRule = match (&a.rule, &a.sample) {
                (Some(r), _) => serde_json::from_str(&std::fs::read_to_string(r)?)?,
                (None, Some(s)) => {
                    let guess = a.guess.clone().unwrap_or_default();
                    let pair = IndexPair::new(&a.data.0, &guess.0)?;
                    fit_guess_rule(&count_patterns(&load_sample(s)?, &pair))?
                }
                (None, None) => return Err(Error::InvalidArgument("need --sample or --rule".into())),
            };
            match &a.query {
                Some(q) => {
                    let b: Pattern = if q.trim().is_empty() { Pattern::empty() } else { q.parse()? };
                    emit_text(&format!("{}\n", rule.guess(&b)?), a.out.as_deref())
                }
                None => emit_json(&rule, a.out.as_deref()),
            }
        }
        Command::Risk(a) => {
            let model = load_model(&a.model)?;
            let pair = a.pair.pair()?;
            if let Some(n) = a.n {
                let seed = a.seed.ok_or_else(|| Error::InvalidArgument("--n needs --seed".into()))?;
                return emit_json(&excess_risk_mc(&model, &pair, n, a.replicates, seed)?, a.out.as_deref());
            }
            let rule: GuessRule = match (&a.rule, &a.sample) {
                (Some(r), _) => serde_json::from_str(&std::fs::read_to_string(r)?)?,
                (None, Some(s)) => fit_guess_rule(&count_patterns(&load_sample(s)?, &pair))?,
                (None, None) => return Err(Error::InvalidArgument("need one of --rule, --sample or --n".into())),
            };
            if rule.pair() != &pair {
                return Err(Error::InvalidArgument("the rule was fitted for a different index pair".into()));
            }
            let law = exact_finite_law(&model, &pair.union())?;
            emit_json(&excess_risk_exact(&rule, &law)?, a.out.as_deref())
        }
        Command::Bounds(a) => {
            let report = bound_report(&load_model(&a.model)?, &a.pair.pair()?, a.epsilon)?;
            emit_json(&report, a.out.as_deref())
        }
        Command::Dkw(a) => {
            #[derive(Serialize)]
            struct DkwOut {
                threshold: f64,
                tail: f64,
                empirical_deviation: Option<f64>,
                exceeds_threshold: Option<bool>,
            }
            let b = dkw_bound(a.u, a.n, a.k, a.s_size, a.gamma)?;
            let empirical = match (&a.sample, &a.model, &a.s) {
                (Some(sp), Some(mp), Some(s)) => {
                    let mut set = s.0.clone();
                    set.sort_unstable();
                    set.dedup();
                    let law = exact_finite_law(&load_model(mp)?, &set)?;
                    Some(empirical_sup_deviation(&load_sample(sp)?, &set, &law)?)
                }
                _ => None,
            };
            let out = DkwOut {
                threshold: b.threshold,
                tail: b.tail,
                empirical_deviation: empirical,
                exceeds_threshold: empirical.map(|d| d > b.threshold),
            };
            emit_json(&out, a.out.as_deref())
        }
        Command::Lecam(a) => {
            #[derive(Serialize)]
            struct LeCamOut {
                pair: crate::analysis::lecam::LeCamPair,
                bretagnolle_huber: Option<crate::analysis::lecam::BretagnolleHuber>,
            }
            let alphabet = if a.alphabet == 0 { Alphabet::Unbounded } else { Alphabet::Finite(a.alphabet) };
            let regime = match a.delta_n {
                Some(delta_n) => LeCamRegime::Margin { delta_n },
                None => LeCamRegime::RootN,
            };
            let pair = lecam_pair(a.n, alphabet, regime, &a.pair.pair()?)?;
            let bh = if pair.n <= MAX_ORACLE_N { Some(bretagnolle_huber_check(&pair)?) } else { None };
            emit_json(&LeCamOut { pair, bretagnolle_huber: bh }, a.out.as_deref())
        }
        Command::Gibbs(a) => {
            let mut bound = gibbs_gamma(&GibbsPotential::ising(a.alpha)?, a.alphabet, a.k_max)?;
            if !a.full {
                bound.var_bounds.truncate(bound.n_star + 1);
            }
            emit_json(&bound, a.out.as_deref())
        }
        Command::Experiment(a) => {
            let mut config = ExperimentConfig::load(&a.config)?;
            if a.out.is_some() {
                config.outputs.csv = a.out.clone();
            }
            if a.json.is_some() {
                config.outputs.json = a.json.clone();
            }
            let threads = match a.threads {
                Some(t) => t,
                None => threads_from_env()?,
            };
            let result = run_experiment(&config, threads)?;
            eprintln!(
                "pathguess: {} grid points, {} threads, {:.2} s",
                result.rows.len(),
                threads,
                result.wall_time.as_secs_f64()
            );
            if config.outputs.csv.is_none() && config.outputs.json.is_none() {
                emit_text(&result.to_csv()?, None)?;
            } else {
                result.write_outputs()?;
            }
            match result.rows.iter().find(|r| r.failed()) {
                Some(r) => Err(Error::Incomplete(format!("grid point n = {} failed with {}", r.n, r.status))),
                None => Ok(()),
            }
        }
    }
}
