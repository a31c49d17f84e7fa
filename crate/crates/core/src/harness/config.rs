use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SensingEnsemble, SignalModelConfig};
use crate::solver::{Variant, DEFAULT_EPSILON, DEFAULT_MAX_ITERS, DEFAULT_REL_TOL};

use super::TrialParams;

/// Which version of the ground truth the noisy measurements are taken of.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseReference {
    /// The signal before normalization; `sigma` is relative to its scale.
    #[default]
    Raw,
    /// The unit-norm signal.
    Unit,
}

/// Parameter grid searched by the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Multiples of the penalty's default step (`1` for ℓ1, `1/m` for ℓ2).
    pub step_scale: Vec<f64>,
    /// TV budgets tried for the fused variants.
    pub epsilon: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            step_scale: vec![0.5, 1.0, 2.0],
            epsilon: vec![0.005, 0.01, 0.02, 0.05, 0.1, 0.2],
        }
    }
}

/// Everything that determines an experiment's output.
///
/// The `seed` inside `signal` is ignored; each trial substitutes its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub signal: SignalModelConfig,
    /// Number of measurements.
    pub m: usize,
    /// Noise standard deviation.
    pub sigma: f64,
    pub noise_reference: NoiseReference,
    /// Flip budget handed to the robust variants.
    pub l_assumed: usize,
    /// Evaluation seeds.
    pub seeds: Vec<u64>,
    /// Seed whose data the sweep tunes on; must not be an evaluation seed.
    pub tuning_seed: u64,
    pub algorithms: Vec<Variant>,
    /// `None` runs every variant with `tau` / `epsilon` as given.
    pub sweep: Option<SweepGrid>,
    /// Fixed step size; `None` uses the penalty default.
    pub tau: Option<f64>,
    /// Fixed TV budget.
    pub epsilon: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub nonneg: bool,
    /// Directory for cached sensing matrices, keyed by seed and shape.
    pub matrix_cache: Option<PathBuf>,
    /// Directory receiving `table.csv`, `raw.csv` and `report.json`.
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            signal: SignalModelConfig::default(),
            m: 2000,
            sigma: 1.0,
            noise_reference: NoiseReference::Raw,
            l_assumed: 10,
            seeds: (0..11).collect(),
            tuning_seed: 1_000_003,
            algorithms: Variant::ALL.to_vec(),
            sweep: Some(SweepGrid::default()),
            tau: None,
            epsilon: DEFAULT_EPSILON,
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            nonneg: false,
            matrix_cache: None,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// A reduced problem (n = 400, m = 500, K = 32) for quick runs.
    pub fn small() -> Self {
        ExperimentConfig {
            signal: SignalModelConfig {
                n: 400,
                k: 32,
                d: 4,
                seed: 0,
            },
            m: 500,
            l_assumed: 4,
            seeds: vec![0, 1, 2],
            sweep: Some(SweepGrid {
                step_scale: vec![1.0],
                epsilon: vec![0.02, 0.1],
            }),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        self.signal.validate()?;
        if self.m == 0 {
            return fail("m must be positive".into());
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return fail(format!("sigma={} must be nonnegative", self.sigma));
        }
        if self.seeds.is_empty() {
            return fail("at least one evaluation seed is required".into());
        }
        if self.algorithms.is_empty() {
            return fail("at least one algorithm is required".into());
        }
        if self.l_assumed > self.m {
            return fail(format!("L={} exceeds m={}", self.l_assumed, self.m));
        }
        if let Some(grid) = &self.sweep {
            if grid.step_scale.is_empty() || grid.epsilon.is_empty() {
                return fail("sweep grids must be non-empty".into());
            }
            if self.seeds.contains(&self.tuning_seed) {
                return fail(format!(
                    "tuning seed {} is also an evaluation seed",
                    self.tuning_seed
                ));
            }
        }
        Ok(())
    }

    pub fn signal_for(&self, seed: u64) -> SignalModelConfig {
        SignalModelConfig {
            seed,
            ..self.signal
        }
    }

    /// Sensing matrix of `seed`, read from or written to the cache when one
    /// is configured.
    pub fn matrix_for(&self, seed: u64) -> Result<SensingEnsemble> {
        let (m, n) = (self.m, self.signal.n);
        let Some(dir) = &self.matrix_cache else {
            return SensingEnsemble::generate(m, n, seed);
        };
        let path = dir.join(format!("A_{m}x{n}_seed{seed}.obr"));
        if path.exists() {
            let a = SensingEnsemble::load(&path, seed)?;
            if a.rows() == m && a.cols() == n {
                return Ok(a);
            }
        }
        std::fs::create_dir_all(dir)?;
        let a = SensingEnsemble::generate(m, n, seed)?;
        a.save(&path)?;
        Ok(a)
    }

    pub fn fixed_params(&self, variant: Variant) -> TrialParams {
        TrialParams {
            tau: self.tau.unwrap_or_else(|| variant.penalty.default_step(self.m)),
            epsilon: self.epsilon,
        }
    }
}
