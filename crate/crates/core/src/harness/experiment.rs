//! Seeded experiment runs and their CSV/JSON outputs.
//!
//! Grid point `n` uses the seed `derive_seed(seed, n)` and its replicate `r`
//! the seed `derive_seed(derive_seed(seed, n), r)`. Replicates run in
//! parallel; their values are reduced in replicate order, so results do not
//! depend on the thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::analysis::bounds::{minimax_root_n, rate_regime_bound, sample_size_bound, subcritical_bound, supercritical_bound};
use crate::analysis::dkw::{dkw_bound, empirical_sup_deviation};
use crate::analysis::gibbs::{gibbs_gamma, GibbsPotential};
use crate::analysis::lecam::{bretagnolle_huber_check, lecam_pair, LeCamRegime, MAX_ORACLE_N};
use crate::analysis::risk::{beta_from_table, excess_risk_value, margin_from_table, summarize};
use crate::error::{Error, Result};
use crate::estimator::{count_patterns, fit_guess_rule};
use crate::models::variation::DEFAULT_VARIATION_DEPTH;
use crate::models::exact_finite_law;
use crate::sampler::{derive_seed, simulate, SimulationPlan};
use crate::series::Alphabet;
use crate::VERSION;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "PATHGUESS_THREADS";

/// Thread count from [`THREADS_ENV`], defaulting to the available cores.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(Error::InvalidArgument(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// One CSV row. Columns of analyses that are switched off stay empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub replicates: usize,
    pub mean_risk: Option<f64>,
    pub se_risk: Option<f64>,
    pub q05: Option<f64>,
    pub q95: Option<f64>,
    pub bound_subcritical: Option<f64>,
    pub bound_supercritical: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub lower_bound: Option<f64>,
    pub regime: Option<&'static str>,
    pub seed: u64,
    pub config_hash: String,
    pub row_seed: u64,
    pub required_n: Option<u64>,
    pub guaranteed: Option<bool>,
    pub dkw_u: Option<f64>,
    pub dkw_threshold: Option<f64>,
    pub dkw_tail: Option<f64>,
    pub dkw_exceedance: Option<f64>,
    pub lecam_chi2_step: Option<f64>,
    pub lecam_kl_bound: Option<f64>,
    pub lecam_minimax_value: Option<f64>,
    pub bayes_error_oracle: Option<f64>,
    pub bh_printed_holds: Option<bool>,
    pub bh_conservative_holds: Option<bool>,
    pub gibbs_n_star: Option<usize>,
    pub gibbs_gamma_lower_bound: Option<f64>,
    /// `ok`, or `error: <message>` when this grid point failed.
    pub status: String,
}

impl ExperimentRow {
    fn empty(n: usize, replicates: usize, seed: u64, config_hash: &str, row_seed: u64) -> Self {
        ExperimentRow {
            n,
            replicates,
            mean_risk: None,
            se_risk: None,
            q05: None,
            q95: None,
            bound_subcritical: None,
            bound_supercritical: None,
            beta: None,
            delta: None,
            gamma: None,
            lower_bound: None,
            regime: None,
            seed,
            config_hash: config_hash.to_string(),
            row_seed,
            required_n: None,
            guaranteed: None,
            dkw_u: None,
            dkw_threshold: None,
            dkw_tail: None,
            dkw_exceedance: None,
            lecam_chi2_step: None,
            lecam_kl_bound: None,
            lecam_minimax_value: None,
            bayes_error_oracle: None,
            bh_printed_holds: None,
            bh_conservative_holds: None,
            gibbs_n_star: None,
            gibbs_gamma_lower_bound: None,
            status: "ok".into(),
        }
    }

    pub fn failed(&self) -> bool {
        self.status != "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GibbsSummary {
    pub alpha: f64,
    pub k_max: usize,
    pub n_star: usize,
    pub gamma_lower_bound: f64,
    pub rigorous_lower_bound: Option<f64>,
    pub tail_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    /// Output paths are left out of the record so that where a file is
    /// written does not change its bytes.
    #[serde(serialize_with = "config_without_outputs")]
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
    pub gibbs: Option<GibbsSummary>,
    /// Elapsed time; reported on standard error, never written to outputs.
    #[serde(skip)]
    pub wall_time: Duration,
}

fn config_without_outputs<S: serde::Serializer>(config: &ExperimentConfig, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut bare = config.clone();
    bare.outputs = Default::default();
    serde::Serialize::serialize(&bare, s)
}

impl ExperimentResult {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(ExperimentRow::failed)
    }

    /// CSV with a leading comment line carrying version, config hash and seed.
    pub fn to_csv(&self) -> Result<String> {
        let mut out = format!("# pathguess {} config_hash={} seed={}\n", self.version, self.config_hash, self.seed).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in &self.rows {
                w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::to_value(self)?)? + "\n")
    }

    /// Writes the outputs declared in the configuration.
    pub fn write_outputs(&self) -> Result<()> {
        if let Some(p) = &self.config.outputs.csv {
            std::fs::write(p, self.to_csv()?)?;
        }
        if let Some(p) = &self.config.outputs.json {
            std::fs::write(p, self.to_json()?)?;
        }
        Ok(())
    }
}

/// Runs every grid point on a pool of `threads` workers. A failing grid point
/// yields a row whose `status` records the error; the remaining points still
/// run.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let hash = config.hash()?;
    let gibbs = match &config.analyses.gibbs {
        Some(g) => {
            let bound = gibbs_gamma(&GibbsPotential::ising(g.alpha)?, 2, g.k_max)?;
            Some(GibbsSummary {
                alpha: g.alpha,
                k_max: g.k_max,
                n_star: bound.n_star,
                gamma_lower_bound: bound.gamma_lower_bound,
                rigorous_lower_bound: bound.rigorous_lower_bound,
                tail_sum: bound.tail_sum,
            })
        }
        None => None,
    };
    let rows = pool.install(|| {
        config
            .n_grid
            .iter()
            .map(|&n| {
                let row_seed = derive_seed(config.seed, n as u64);
                let mut row = ExperimentRow::empty(n, config.replicates, config.seed, &hash, row_seed);
                if let Some(g) = &gibbs {
                    row.gibbs_n_star = Some(g.n_star);
                    row.gibbs_gamma_lower_bound = Some(g.gamma_lower_bound);
                }
                if let Err(e) = fill_row(config, &mut row) {
                    row.status = format!("error: {e}");
                }
                row
            })
            .collect()
    });
    Ok(ExperimentResult {
        version: VERSION,
        config_hash: hash,
        seed: config.seed,
        config: config.clone(),
        rows,
        gibbs,
        wall_time: start.elapsed(),
    })
}

struct Replicate {
    risk: f64,
    exceeded: bool,
}

fn fill_row(config: &ExperimentConfig, row: &mut ExperimentRow) -> Result<()> {
    let n = row.n;
    let model = config.model_at(n)?;
    let pair = config.pair()?;
    let (k, l) = (pair.size(), pair.span());
    let union = pair.union();
    let law = exact_finite_law(&model, &union)?;
    let table = law.joint_table(&pair)?;
    let beta = beta_from_table(&table);
    let delta = margin_from_table(&table).delta;
    row.beta = Some(beta);
    row.delta = Some(delta);
    let gamma = model.gamma(DEFAULT_VARIATION_DEPTH).ok().map(|g| g.lower_bound).filter(|&g| g > 0.0);
    row.gamma = gamma;
    row.lower_bound = Some(minimax_root_n(n, k));
    row.bound_subcritical = (n >= 2).then(|| subcritical_bound(n, beta));
    if let Some(g) = gamma {
        row.bound_supercritical = Some(supercritical_bound(delta, n, g, k, beta));
        if n >= 2 {
            row.regime = Some(rate_regime_bound(delta, n, g, k, beta)?.0.as_str());
        }
    }

    if let Some(b) = &config.analyses.bounds {
        let g = gamma.ok_or_else(|| Error::Divergent("no positive lower bound on Γ for the sample-size bound".into()))?;
        let s = sample_size_bound(b.epsilon, delta, beta, g, k, l)?;
        row.required_n = Some(s.required_n);
        row.guaranteed = Some(s.guaranteed);
    }

    let dkw = match &config.analyses.dkw {
        Some(d) if n >= l => {
            let g = gamma.ok_or_else(|| Error::Divergent("no positive lower bound on Γ for the deviation bound".into()))?;
            let b = dkw_bound(d.u, n, l - 1, k, g)?;
            row.dkw_u = Some(d.u);
            row.dkw_threshold = Some(b.threshold);
            row.dkw_tail = Some(b.tail);
            Some(b.threshold)
        }
        _ => None,
    };

    if config.analyses.risk || dkw.is_some() {
        let plan = SimulationPlan::new(model.clone(), n, row.row_seed)?;
        let reps: Vec<Replicate> = (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let sample = simulate(&plan.clone().with_seed(derive_seed(row.row_seed, r as u64)))?;
                let risk = if config.analyses.risk {
                    excess_risk_value(&fit_guess_rule(&count_patterns(&sample, &pair))?, &table)?
                } else {
                    f64::NAN
                };
                let exceeded = match dkw {
                    Some(t) => empirical_sup_deviation(&sample, &union, &law)? > t,
                    None => false,
                };
                Ok(Replicate { risk, exceeded })
            })
            .collect::<Result<_>>()?;
        if config.analyses.risk {
            let s = summarize(&reps.iter().map(|r| r.risk).collect::<Vec<_>>());
            row.mean_risk = Some(s.mean);
            row.se_risk = Some(s.se);
            row.q05 = Some(s.q05);
            row.q95 = Some(s.q95);
        }
        if dkw.is_some() {
            row.dkw_exceedance = Some(reps.iter().filter(|r| r.exceeded).count() as f64 / reps.len() as f64);
        }
    }

    if let Some(lc) = &config.analyses.lecam {
        let alphabet = if lc.alphabet == 0 { Alphabet::Unbounded } else { Alphabet::Finite(lc.alphabet) };
        let p = lecam_pair(n.max(2), alphabet, LeCamRegime::RootN, &pair)?;
        row.lecam_chi2_step = Some(p.chi2_step);
        row.lecam_kl_bound = Some(p.kl_bound);
        row.lecam_minimax_value = Some(p.minimax_value);
        if p.n <= MAX_ORACLE_N {
            let bh = bretagnolle_huber_check(&p)?;
            row.bayes_error_oracle = Some(bh.average_error);
            row.bh_printed_holds = Some(bh.printed_holds);
            row.bh_conservative_holds = Some(bh.conservative_holds);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(extra: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(&format!(
            r#"{{"model": {{"family": "iid", "probs": [0.5, 0.3, 0.2]}},
                "D": [], "G": [1], "n_grid": [100, 1000], "replicates": 100, "seed": 7{extra}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn two_rows_and_identical_reruns() {
        let c = config("");
        let a = run_experiment(&c, 1).unwrap();
        assert_eq!(a.rows.len(), 2);
        assert!(!a.failed());
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with(&format!("# pathguess {VERSION} config_hash={} seed=7\n", a.config_hash)));
        let header = csv.lines().nth(1).unwrap();
        assert!(header.starts_with("n,replicates,mean_risk,se_risk,q05,q95,bound_subcritical,bound_supercritical,beta,delta,gamma,lower_bound,regime,seed,config_hash"));
        let b = run_experiment(&c, 4).unwrap();
        assert_eq!(csv, b.to_csv().unwrap());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn lecam_columns() {
        let c = ExperimentConfig::from_json(
            r#"{"model": {"family": "iid", "probs": [0.5, 0.5]}, "D": [1], "G": [2], "n_grid": [100],
                "replicates": 2, "seed": 1, "analyses": {"risk": false, "lecam": {"alphabet": 2}}}"#,
        )
        .unwrap();
        let r = run_experiment(&c, 2).unwrap();
        let row = &r.rows[0];
        assert!((row.lecam_chi2_step.unwrap() - 0.0025016).abs() < 1e-7);
        assert!((row.lecam_minimax_value.unwrap() - 0.0022992).abs() < 1e-7);
        assert!(row.bayes_error_oracle.unwrap() > 0.0);
        assert_eq!(row.mean_risk, None);
    }

    #[test]
    fn failing_grid_point_is_marked() {
        let c = config(r#", "analyses": {"dkw": {"u": 0.1}, "bounds": {"epsilon": 0.1}}"#);
        let mut c2 = c.clone();
        c2.model = Some(crate::models::ProcessModel::PoissonReg(crate::models::PoissonReg::new(vec![-0.5; 40], 1.0).unwrap()));
        let r = run_experiment(&c2, 1).unwrap();
        assert!(r.failed());
        assert!(r.rows.iter().all(|row| row.status.starts_with("error: ")));
        let ok = run_experiment(&c, 1).unwrap();
        assert!(!ok.failed());
        assert!(ok.rows[1].dkw_exceedance.is_some());
        assert_eq!(ok.rows[0].gamma, Some(1.0));
    }
}
