//! Replication studies: coverage and interval lengths, estimator comparison, LRT sweeps.
//!
//! Replication `r` simulates its chain from `derive_seed(master_seed, r, TAG_PATH)` and,
//! for the robust estimator, draws its noise from `derive_seed(master_seed, r, TAG_ROBUST)`.
//! Replications run on the rayon pool and are aggregated in replication order, so reports
//! are bit-identical for any number of workers.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{make_params, simulate_bernoulli_chain, simulate_uniform_chain, ModelParams};
use crate::error::{Error, Result};
use crate::estimation::{
    ci_half_width, indicator_point, mean_estimate, mle_ci, robust_estimate, Estimate, Parameter,
};
use crate::inference::{lrt, Decision, LrtResult};
use crate::rng::{derive_seed, TAG_GRID, TAG_PATH, TAG_ROBUST};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Mle,
    Mean,
    Robust,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [Estimator::Mle, Estimator::Mean, Estimator::Robust];

    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::Mle => "mle",
            Estimator::Mean => "mean",
            Estimator::Robust => "robust",
        }
    }
}

impl std::str::FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mle" => Ok(Estimator::Mle),
            "mean" => Ok(Estimator::Mean),
            "robust" => Ok(Estimator::Robust),
            other => Err(Error::Parse(format!("unknown estimator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyConfig {
    pub true_params: ModelParams,
    /// Number of steps; each path has `n + 1` states.
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub estimators: Vec<Estimator>,
}

impl StudyConfig {
    pub fn new(true_params: ModelParams, n: usize, reps: usize, alpha: f64, master_seed: u64) -> Result<Self> {
        if reps == 0 {
            return Err(Error::Domain("reps must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        Ok(StudyConfig { true_params, n, reps, alpha, master_seed, estimators: Estimator::ALL.to_vec() })
    }

    pub fn with_estimators(mut self, estimators: &[Estimator]) -> Self {
        self.estimators = estimators.to_vec();
        self
    }

    fn truth(&self, which: Parameter) -> f64 {
        match which {
            Parameter::A => self.true_params.a(),
            Parameter::P => self.true_params.p(),
        }
    }
}

/// One interval from one replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepRow {
    pub rep: usize,
    pub estimator: Estimator,
    pub parameter: Parameter,
    pub point: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub covered: bool,
    pub length: Option<f64>,
    pub degenerate: bool,
}

impl RepRow {
    fn from_estimate(rep: usize, estimator: Estimator, parameter: Parameter, est: Result<Estimate>, truth: f64) -> Self {
        match est {
            Ok(e) => RepRow {
                rep,
                estimator,
                parameter,
                point: Some(e.point),
                ci_lo: Some(e.ci_low),
                ci_hi: Some(e.ci_high),
                covered: e.covers(truth),
                length: Some(e.length()),
                degenerate: false,
            },
            Err(_) => RepRow {
                rep,
                estimator,
                parameter,
                point: None,
                ci_lo: None,
                ci_hi: None,
                covered: false,
                length: None,
                degenerate: true,
            },
        }
    }
}

/// Coverage and mean interval length of one estimator for one parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub estimator: Estimator,
    pub parameter: Parameter,
    pub coverage: f64,
    pub ciml: f64,
    pub degenerate_count: usize,
    pub reps_effective: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub config: StudyConfig,
    pub rows: Vec<SummaryRow>,
    #[serde(skip)]
    pub replications: Vec<RepRow>,
    pub runtime_secs: f64,
}

impl MCReport {
    pub fn row(&self, estimator: Estimator, parameter: Parameter) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.estimator == estimator && r.parameter == parameter)
    }
}

fn summarize(targets: &[(Estimator, Parameter)], reps: &[RepRow], total: usize) -> Vec<SummaryRow> {
    targets
        .iter()
        .map(|&(estimator, parameter)| {
            let mut covered = 0usize;
            let mut length = 0.0;
            let mut effective = 0usize;
            for r in reps.iter().filter(|r| r.estimator == estimator && r.parameter == parameter) {
                if let Some(l) = r.length {
                    effective += 1;
                    length += l;
                    covered += r.covered as usize;
                }
            }
            let (coverage, ciml) = if effective == 0 {
                (0.0, 0.0)
            } else {
                (covered as f64 / effective as f64, length / effective as f64)
            };
            SummaryRow {
                estimator,
                parameter,
                coverage,
                ciml,
                degenerate_count: total - effective,
                reps_effective: effective,
            }
        })
        .collect()
}

fn run_study<F>(config: &StudyConfig, targets: Vec<(Estimator, Parameter)>, per_rep: F) -> Result<MCReport>
where
    F: Fn(usize) -> Result<Vec<RepRow>> + Sync + Send,
{
    let start = Instant::now();
    let reps: Vec<Vec<RepRow>> = (0..config.reps).into_par_iter().map(&per_rep).collect::<Result<_>>()?;
    let replications: Vec<RepRow> = reps.into_iter().flatten().collect();
    let rows = summarize(&targets, &replications, config.reps);
    Ok(MCReport {
        config: config.clone(),
        rows,
        replications,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

fn replication_path(config: &StudyConfig, r: usize) -> Result<crate::chain::BinaryPath> {
    let seed = derive_seed(config.master_seed, r as u64, TAG_PATH);
    simulate_bernoulli_chain(&config.true_params, config.n, seed)
}

/// Coverage and mean length of the MLE intervals for `a` and `p`.
pub fn mc_mle_study(config: &StudyConfig) -> Result<MCReport> {
    let targets = vec![(Estimator::Mle, Parameter::A), (Estimator::Mle, Parameter::P)];
    run_study(config, targets, |r| {
        let path = replication_path(config, r)?;
        let counts = crate::chain::transition_counts(&path);
        let (ea, ep) = match mle_ci(&counts, config.alpha) {
            Ok((a, p)) => (Ok(a), Ok(p)),
            Err(e) => (Err(e.clone()), Err(e)),
        };
        Ok(vec![
            RepRow::from_estimate(r, Estimator::Mle, Parameter::A, ea, config.truth(Parameter::A)),
            RepRow::from_estimate(r, Estimator::Mle, Parameter::P, ep, config.truth(Parameter::P)),
        ])
    })
}

/// The configured estimators of `p`, all computed on the same path in each replication.
pub fn mc_estimator_comparison(config: &StudyConfig) -> Result<MCReport> {
    let targets: Vec<_> = config.estimators.iter().map(|&e| (e, Parameter::P)).collect();
    run_study(config, targets, |r| {
        let path = replication_path(config, r)?;
        let truth = config.truth(Parameter::P);
        let rows = config
            .estimators
            .iter()
            .map(|&est| {
                let e = match est {
                    Estimator::Mle => {
                        mle_ci(&crate::chain::transition_counts(&path), config.alpha).map(|(_, p)| p)
                    }
                    Estimator::Mean => mean_estimate(&path, config.alpha),
                    Estimator::Robust => {
                        let noise = derive_seed(config.master_seed, r as u64, TAG_ROBUST);
                        robust_estimate(&path, config.alpha, noise)
                    }
                };
                RepRow::from_estimate(r, est, Parameter::P, e, truth)
            })
            .collect();
        Ok(rows)
    })
}

/// One cell of an LRT sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    pub a: f64,
    pub p: f64,
    pub seed: u64,
    pub result: Option<LrtResult>,
    /// Name of the error when the test could not be computed.
    pub error: Option<String>,
}

/// One simulated chain and one LRT per `(a, p)` cell, cells in row-major order.
pub fn lrt_grid(a_values: &[f64], p_values: &[f64], n: usize, seed: u64, alpha: f64) -> Result<Vec<GridCell>> {
    let mut cells = Vec::with_capacity(a_values.len() * p_values.len());
    for &a in a_values {
        for &p in p_values {
            cells.push(make_params(a, p)?);
        }
    }
    cells
        .par_iter()
        .enumerate()
        .map(|(i, params)| {
            let cell_seed = derive_seed(seed, i as u64, TAG_GRID);
            let path = simulate_bernoulli_chain(params, n, cell_seed)?;
            let (result, error) = match lrt(&path, alpha) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.name().to_string())),
            };
            Ok(GridCell { a: params.a(), p: params.p(), seed: cell_seed, result, error })
        })
        .collect()
}

/// Rejection frequency of the LRT over independent replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RejectionSummary {
    pub reps: usize,
    pub rejections: usize,
    pub degenerate: usize,
    pub clamped: usize,
}

impl RejectionSummary {
    pub fn rate(&self) -> f64 {
        let effective = self.reps - self.degenerate;
        if effective == 0 {
            0.0
        } else {
            self.rejections as f64 / effective as f64
        }
    }
}

pub fn lrt_replications(params: &ModelParams, n: usize, reps: usize, master_seed: u64, alpha: f64) -> Result<RejectionSummary> {
    let results: Vec<Result<LrtResult>> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let path = simulate_bernoulli_chain(params, n, derive_seed(master_seed, r as u64, TAG_PATH))?;
            lrt(&path, alpha)
        })
        .collect();
    let mut s = RejectionSummary { reps, rejections: 0, degenerate: 0, clamped: 0 };
    for res in results {
        match res {
            Ok(t) => {
                s.rejections += (t.decision == Decision::Reject) as usize;
                s.clamped += t.clamped as usize;
            }
            Err(Error::NegativeStatistic(v)) => return Err(Error::NegativeStatistic(v)),
            Err(_) => s.degenerate += 1,
        }
    }
    Ok(s)
}

/// `√(n+1)(p̄ − p)` for each replication.
pub fn standardized_means(params: &ModelParams, n: usize, reps: usize, master_seed: u64) -> Result<Vec<f64>> {
    let scale = (n as f64 + 1.0).sqrt();
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let path = simulate_bernoulli_chain(params, n, derive_seed(master_seed, r as u64, TAG_PATH))?;
            Ok(scale * (path.mean() - params.p()))
        })
        .collect()
}

/// Indicator estimates of `a` from independent uniform-marginal chains.
pub fn indicator_replications(a: f64, n: usize, reps: usize, master_seed: u64) -> Result<Vec<f64>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let path = simulate_uniform_chain(a, n, derive_seed(master_seed, r as u64, TAG_PATH))?;
            Ok(indicator_point(&path))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryPoint {
    pub p: f64,
    /// Mean length of the MLE interval for `p` over the replications.
    pub ciml: f64,
    /// Closed-form interval length at the true parameters.
    pub closed_form: f64,
    pub coverage: f64,
    pub degenerate_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub a: f64,
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub points: Vec<SymmetryPoint>,
}

/// Interval lengths for `p` across a grid of `p` values at fixed `a`.
pub fn symmetry_report(a: f64, p_values: &[f64], n: usize, reps: usize, seed: u64, alpha: f64) -> Result<SymmetryReport> {
    let points = p_values
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let params = make_params(a, p)?;
            let cfg = StudyConfig::new(params, n, reps, alpha, derive_seed(seed, i as u64, TAG_GRID))?;
            let report = mc_mle_study(&cfg)?;
            let row = report
                .row(Estimator::Mle, Parameter::P)
                .cloned()
                .ok_or_else(|| Error::Eval("missing summary row".into()))?;
            Ok(SymmetryPoint {
                p,
                ciml: row.ciml,
                closed_form: 2.0 * ci_half_width(&params, n as u64, alpha, Parameter::P)?,
                coverage: row.coverage,
                degenerate_count: row.degenerate_count,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SymmetryReport { a, n, reps, alpha, points })
}
