//! Experiment orchestration: data generation per seed, parameter sweeps,
//! and aggregation of metrics across seeds and algorithm variants.
//!
//! Every trial is a pure function of the experiment configuration, the
//! trial seed and the variant. Signal, matrix and noise draw from separate
//! streams of the trial seed, so one seed's data is shared by all variants.

mod config;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, NoiseReference, SweepGrid};
pub use report::{Aggregate, RawRow, ResultTable};

use crate::error::{Error, Result};
use crate::metrics::{evaluate, MetricsReport};
use crate::model::{
    generate_piecewise_signal, measure, piecewise_levels, BinaryMeasurements, SensingEnsemble,
    SparseSignal,
};
use crate::solver::{solve, Algorithm, RecoveryReport, SolverConfig, Variant};

/// Step size and TV budget for one variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialParams {
    pub tau: f64,
    pub epsilon: f64,
}

/// Ground truth, sensing matrix and measurements of one seed.
#[derive(Debug, Clone)]
pub struct TrialData {
    pub seed: u64,
    /// Unit-norm ground truth.
    pub signal: SparseSignal,
    pub matrix: SensingEnsemble,
    pub measurements: BinaryMeasurements,
}

impl TrialData {
    pub fn generate(cfg: &ExperimentConfig, seed: u64) -> Result<Self> {
        let shape = cfg.signal_for(seed);
        let signal = generate_piecewise_signal(&shape)?;
        let matrix = cfg.matrix_for(seed)?;
        let measured = match cfg.noise_reference {
            NoiseReference::Raw => SparseSignal::new(piecewise_levels(&shape)?)?,
            NoiseReference::Unit => signal.clone(),
        };
        let measurements = measure(&matrix, &measured, cfg.sigma, seed)?;
        Ok(TrialData {
            seed,
            signal,
            matrix,
            measurements,
        })
    }
}

/// Solver settings for `variant` under `cfg` and `params`.
pub fn solver_config(cfg: &ExperimentConfig, variant: Variant, params: TrialParams) -> SolverConfig {
    let mut solver = SolverConfig::new(variant, cfg.signal.k);
    solver.tau = Some(params.tau);
    solver.epsilon = params.epsilon;
    solver.l = if variant.robust { cfg.l_assumed } else { 0 };
    solver.max_iters = cfg.max_iters;
    solver.rel_tol = cfg.rel_tol;
    solver.nonneg = cfg.nonneg;
    solver
}

/// Solves and scores one variant on prepared data.
pub fn run_on(
    cfg: &ExperimentConfig,
    data: &TrialData,
    variant: Variant,
    params: TrialParams,
) -> Result<(RecoveryReport, MetricsReport)> {
    let attempt = || -> Result<_> {
        let solver = solver_config(cfg, variant, params);
        let report = solve(&data.measurements, &data.matrix, &solver)?;
        let metrics = evaluate(data.signal.values(), report.x_hat.values(), &data.matrix)?;
        Ok((report, metrics))
    };
    attempt().map_err(|e| Error::Trial {
        seed: data.seed,
        variant: variant.name(),
        source: Box::new(e),
    })
}

/// Full pipeline for one seed and variant with the configuration's fixed
/// step size and TV budget.
pub fn run_trial(
    cfg: &ExperimentConfig,
    seed: u64,
    variant: Variant,
) -> Result<(RecoveryReport, MetricsReport)> {
    cfg.validate()?;
    let data = TrialData::generate(cfg, seed)?;
    run_on(cfg, &data, variant, cfg.fixed_params(variant))
}

/// Candidate parameter pairs in grid order (step scales outermost).
fn candidates(cfg: &ExperimentConfig, grid: &SweepGrid, variant: Variant) -> Vec<TrialParams> {
    let base = variant.penalty.default_step(cfg.m);
    let epsilons: Vec<f64> = match variant.algorithm {
        Algorithm::Biht => vec![cfg.epsilon],
        Algorithm::Bfcs => grid.epsilon.clone(),
    };
    grid.step_scale
        .iter()
        .flat_map(|&s| {
            epsilons.iter().map(move |&epsilon| TrialParams {
                tau: s * base,
                epsilon,
            })
        })
        .collect()
}

/// Picks the grid point with the lowest MSE on `data`. Failed trials count
/// as infinitely bad; ties go to the earliest grid point.
fn tune_on(
    cfg: &ExperimentConfig,
    grid: &SweepGrid,
    data: &TrialData,
    variant: Variant,
) -> Result<TrialParams> {
    let candidates = candidates(cfg, grid, variant);
    if candidates.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|&p| {
            run_on(cfg, data, variant, p)
                .map(|(_, m)| m.mse)
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s < scores[best] {
            best = i;
        }
    }
    Ok(candidates[best])
}

/// Grid-searches `(tau, epsilon)` for `variant` on the data of `seed`.
pub fn sweep_tune(cfg: &ExperimentConfig, variant: Variant, seed: u64) -> Result<TrialParams> {
    cfg.validate()?;
    let grid = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("no sweep grid configured".into()))?;
    let data = TrialData::generate(cfg, seed)?;
    tune_on(cfg, grid, &data, variant)
}

/// Parameters for every requested variant: swept on the tuning seed when a
/// grid is configured, otherwise the fixed values.
pub fn tune_all(cfg: &ExperimentConfig) -> Result<Vec<(Variant, TrialParams)>> {
    cfg.validate()?;
    match &cfg.sweep {
        None => Ok(cfg
            .algorithms
            .iter()
            .map(|&v| (v, cfg.fixed_params(v)))
            .collect()),
        Some(grid) => {
            let data = TrialData::generate(cfg, cfg.tuning_seed)?;
            cfg.algorithms
                .iter()
                .map(|&v| Ok((v, tune_on(cfg, grid, &data, v)?)))
                .collect()
        }
    }
}

/// Tunes (if configured), runs every variant on every evaluation seed and
/// aggregates. Trial failures are recorded in their raw row; the run
/// continues.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let tuned = tune_all(cfg)?;
    let mut rows = Vec::with_capacity(cfg.seeds.len() * tuned.len());
    for &seed in &cfg.seeds {
        let data = TrialData::generate(cfg, seed)?;
        let true_flips = data.measurements.flip_count();
        let seed_rows: Vec<RawRow> = tuned
            .par_iter()
            .map(|&(variant, params)| {
                let outcome = run_on(cfg, &data, variant, params);
                RawRow::new(seed, variant, params, true_flips, outcome)
            })
            .collect();
        rows.extend(seed_rows);
    }
    Ok(ResultTable::new(tuned, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::small();
        cfg.seeds = vec![1, 2];
        cfg
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = small();
        let v: Variant = "RoBFCS".parse().unwrap();
        let (r1, m1) = run_trial(&cfg, 4, v).unwrap();
        let (r2, m2) = run_trial(&cfg, 4, v).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn singleton_grid_returns_its_point() {
        let mut cfg = small();
        cfg.sweep = Some(SweepGrid {
            step_scale: vec![2.0],
            epsilon: vec![0.07],
        });
        let v: Variant = "BFCS-l2".parse().unwrap();
        let p = sweep_tune(&cfg, v, 9).unwrap();
        assert_eq!(p.tau, 2.0 / cfg.m as f64);
        assert_eq!(p.epsilon, 0.07);
    }

    #[test]
    fn empty_grid_is_a_config_error() {
        let mut cfg = small();
        cfg.sweep = Some(SweepGrid {
            step_scale: vec![],
            epsilon: vec![0.1],
        });
        assert!(matches!(
            sweep_tune(&cfg, "BIHT".parse().unwrap(), 9),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut cfg = small();
        cfg.sweep = None;
        cfg.algorithms = vec!["BIHT".parse().unwrap(), "BIHT-l2".parse().unwrap()];
        cfg.seeds = vec![3];
        // A huge ℓ2 step overshoots to NaN and fails the unit-norm check.
        cfg.tau = Some(1e300);
        let table = run_experiment(&cfg).unwrap();
        assert_eq!(table.raw.len(), 2);
        assert!(table.raw.iter().all(|r| r.error.is_some()));
    }
}
