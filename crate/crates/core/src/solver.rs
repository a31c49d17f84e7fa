//! The projected-subgradient recovery loop.
//!
//! One loop covers the whole family. Each iteration takes a subgradient step
//! on the sign-consistency penalty, keeps the `K` largest entries, and for
//! the fused variants projects every nonzero run onto its normalized TV
//! budget. The robust variants then re-estimate which measurements were
//! flipped, allowing at most `L` flips.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::model::{norm2, BinaryMeasurements, SensingEnsemble, SparseSignal};
use crate::objective::{penalty_at, subgradient_at, PenaltyKind};
use crate::projections::{hard_threshold, project_nonneg, project_s_eps};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Hard thresholding only.
    Biht,
    /// Hard thresholding followed by the per-run TV projection.
    Bfcs,
}

/// Starting point of the iteration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Zero for the ℓ1 penalty; `Aᵀy` for ℓ2, whose subgradient vanishes at
    /// zero.
    #[default]
    Auto,
    Zero,
    /// `Aᵀy`.
    BackProjection,
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub algorithm: Algorithm,
    pub penalty: PenaltyKind,
    pub robust: bool,
    /// Sparsity level.
    pub k: usize,
    /// Normalized TV budget per nonzero run. Ignored by BIHT.
    pub epsilon: f64,
    /// Flip budget. Ignored unless `robust`.
    pub l: usize,
    /// Step size; `None` picks [`PenaltyKind::default_step`].
    pub tau: Option<f64>,
    pub max_iters: usize,
    /// Stop once `‖x_{t+1} − x_t‖ / ‖x_{t+1}‖ ≤ rel_tol`.
    pub rel_tol: f64,
    /// Clip iterates at zero after the other projections.
    pub nonneg: bool,
    pub init: Init,
}

pub const DEFAULT_MAX_ITERS: usize = 300;
pub const DEFAULT_REL_TOL: f64 = 1e-3;
pub const DEFAULT_EPSILON: f64 = 0.02;

impl SolverConfig {
    pub fn new(variant: Variant, k: usize) -> Self {
        SolverConfig {
            algorithm: variant.algorithm,
            penalty: variant.penalty,
            robust: variant.robust,
            k,
            epsilon: DEFAULT_EPSILON,
            l: 0,
            tau: None,
            max_iters: DEFAULT_MAX_ITERS,
            rel_tol: DEFAULT_REL_TOL,
            nonneg: false,
            init: Init::Auto,
        }
    }

    pub fn variant(&self) -> Variant {
        Variant {
            algorithm: self.algorithm,
            penalty: self.penalty,
            robust: self.robust,
        }
    }

    pub fn step(&self, m: usize) -> f64 {
        self.tau.unwrap_or_else(|| self.penalty.default_step(m))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.k == 0 {
            return fail("sparsity k must be at least 1".into());
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau.is_finite()) {
                return fail(format!("step size tau={tau} must be positive"));
            }
        }
        if !(self.rel_tol >= 0.0) {
            return fail(format!("rel_tol={} must be nonnegative", self.rel_tol));
        }
        if self.max_iters == 0 {
            return fail("max_iters must be at least 1".into());
        }
        if self.algorithm == Algorithm::Bfcs && !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return fail(format!("epsilon={} must be nonnegative", self.epsilon));
        }
        Ok(())
    }
}

/// One of the eight algorithm variants: {BIHT, BFCS} × {ℓ1, ℓ2} × {plain,
/// robust}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Variant {
    pub algorithm: Algorithm,
    pub penalty: PenaltyKind,
    pub robust: bool,
}

impl Variant {
    /// All variants in reporting order.
    pub const ALL: [Variant; 8] = {
        use Algorithm::*;
        use PenaltyKind::*;
        const fn v(algorithm: Algorithm, penalty: PenaltyKind, robust: bool) -> Variant {
            Variant {
                algorithm,
                penalty,
                robust,
            }
        }
        [
            v(Biht, OneSidedL1, false),
            v(Biht, OneSidedL2, false),
            v(Bfcs, OneSidedL1, false),
            v(Bfcs, OneSidedL2, false),
            v(Biht, OneSidedL1, true),
            v(Biht, OneSidedL2, true),
            v(Bfcs, OneSidedL1, true),
            v(Bfcs, OneSidedL2, true),
        ]
    };

    pub fn name(&self) -> String {
        self.to_string()
    }

    /// The same variant with the other penalty.
    pub fn with_penalty(self, penalty: PenaltyKind) -> Variant {
        Variant { penalty, ..self }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.robust {
            f.write_str("Ro")?;
        }
        f.write_str(match self.algorithm {
            Algorithm::Biht => "BIHT",
            Algorithm::Bfcs => "BFCS",
        })?;
        if self.penalty == PenaltyKind::OneSidedL2 {
            f.write_str("-l2")?;
        }
        Ok(())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown variant {s:?}; expected one of BIHT, BIHT-l2, BFCS, BFCS-l2, RoBIHT, RoBIHT-l2, RoBFCS, RoBFCS-l2"
                ))
            })
    }
}

impl Serialize for Variant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Estimated flip pattern `Λ ∈ {−1,+1}^m`; `−1` marks a measurement believed
/// to be flipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipVector {
    lambda: Vec<f64>,
}

impl FlipVector {
    pub fn none(m: usize) -> Self {
        FlipVector {
            lambda: vec![1.0; m],
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lambda
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Number of `−1` entries, `‖Λ₋‖₁`.
    pub fn flips(&self) -> usize {
        self.lambda.iter().filter(|&&s| s < 0.0).count()
    }

    /// Indices marked as flipped.
    pub fn flipped_indices(&self) -> Vec<usize> {
        (0..self.lambda.len())
            .filter(|&i| self.lambda[i] < 0.0)
            .collect()
    }
}

/// Minimizes `f(z ⊙ Λ)` over flip patterns with at most `l` flips.
///
/// Flipping `z_i < 0` removes its penalty; flipping `z_i ≥ 0` can only add
/// one. The minimizer therefore flips the (at most `l`) most negative
/// entries, lowest index first among equal values, and nothing else.
pub fn aop_flip_update(z: &[f64], l: usize) -> Result<FlipVector> {
    if l > z.len() {
        return Err(Error::Config(format!(
            "flip budget L={l} exceeds the number of measurements {}",
            z.len()
        )));
    }
    let mut lambda = FlipVector::none(z.len());
    if l == 0 {
        return Ok(lambda);
    }
    let mut negative: Vec<usize> = (0..z.len()).filter(|&i| z[i] < 0.0).collect();
    let order = |&a: &usize, &b: &usize| z[a].total_cmp(&z[b]).then(a.cmp(&b));
    if negative.len() > l {
        negative.select_nth_unstable_by(l - 1, order);
        negative.truncate(l);
    }
    for i in negative {
        lambda.lambda[i] = -1.0;
    }
    Ok(lambda)
}

/// Outcome of a [`solve`] run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    /// Final iterate rescaled to unit norm.
    pub x_hat: SparseSignal,
    /// Final iterate before normalization.
    pub x_last: Vec<f64>,
    pub lambda: FlipVector,
    pub iterations: usize,
    /// Penalty `f(y ⊙ Λ_t ⊙ A x_t)` at the start of each iteration.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    /// Step size actually used.
    pub tau: f64,
    pub config: SolverConfig,
}

/// Iteration state; caches `A x` of the current iterate.
struct State {
    x: Vec<f64>,
    ax: Vec<f64>,
    lambda: FlipVector,
}

fn check_inputs(
    y: &[f64],
    a: &SensingEnsemble,
    cfg: &SolverConfig,
) -> Result<()> {
    cfg.validate()?;
    check_len("measurements", a.rows(), y.len())?;
    if cfg.k > a.cols() {
        return Err(Error::Config(format!(
            "sparsity k={} exceeds signal length {}",
            cfg.k,
            a.cols()
        )));
    }
    if cfg.robust && cfg.l > a.rows() {
        return Err(Error::Config(format!(
            "flip budget L={} exceeds the number of measurements {}",
            cfg.l,
            a.rows()
        )));
    }
    Ok(())
}

/// Advances `state` by one iteration and returns the penalty at the
/// iterate it started from.
fn advance(state: &mut State, y: &[f64], a: &SensingEnsemble, cfg: &SolverConfig) -> Result<f64> {
    let tau = cfg.step(a.rows());
    let y_eff: Vec<f64> = y.iter().zip(state.lambda.as_slice()).map(|(p, q)| p * q).collect();
    let objective = penalty_at(&state.ax, &y_eff, cfg.penalty);
    let g = subgradient_at(&state.ax, a, &y_eff, cfg.penalty)?;
    let v: Vec<f64> = state.x.iter().zip(&g).map(|(x, g)| x - tau * g).collect();
    let mut next = hard_threshold(&v, cfg.k)?;
    if cfg.algorithm == Algorithm::Bfcs {
        next = project_s_eps(&next, cfg.epsilon)?;
    }
    if cfg.nonneg {
        next = project_nonneg(&next);
    }
    let ax = a.apply(&next)?;
    if cfg.robust {
        let z: Vec<f64> = y.iter().zip(&ax).map(|(p, q)| p * q).collect();
        state.lambda = aop_flip_update(&z, cfg.l)?;
    }
    state.x = next;
    state.ax = ax;
    Ok(objective)
}

/// A single iteration from `(x_t, Λ_t)`, returning `(x_{t+1}, Λ_{t+1})`.
pub fn solve_step(
    x: &[f64],
    lambda: &FlipVector,
    y: &BinaryMeasurements,
    a: &SensingEnsemble,
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, FlipVector)> {
    check_inputs(y.y(), a, cfg)?;
    check_len("iterate", a.cols(), x.len())?;
    check_len("flip vector", a.rows(), lambda.len())?;
    let mut state = State {
        x: x.to_vec(),
        ax: a.apply(x)?,
        lambda: lambda.clone(),
    };
    advance(&mut state, y.y(), a, cfg)?;
    Ok((state.x, state.lambda))
}

fn initial_point(y: &[f64], a: &SensingEnsemble, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let back_projection = || a.apply_transpose(y);
    match &cfg.init {
        Init::Zero => Ok(vec![0.0; a.cols()]),
        Init::BackProjection => back_projection(),
        Init::Auto => match cfg.penalty {
            PenaltyKind::OneSidedL1 => Ok(vec![0.0; a.cols()]),
            PenaltyKind::OneSidedL2 => back_projection(),
        },
        Init::Given(x0) => {
            check_len("initial point", a.cols(), x0.len())?;
            Ok(x0.clone())
        }
    }
}

/// Runs the recovery loop until the relative change drops to `rel_tol` or
/// `max_iters` is reached, then normalizes the last iterate.
///
/// Fails with [`Error::Degenerate`] if the last iterate is exactly zero.
pub fn solve(
    y: &BinaryMeasurements,
    a: &SensingEnsemble,
    cfg: &SolverConfig,
) -> Result<RecoveryReport> {
    check_inputs(y.y(), a, cfg)?;
    let x = initial_point(y.y(), a, cfg)?;
    let mut state = State {
        ax: a.apply(&x)?,
        x,
        lambda: FlipVector::none(a.rows()),
    };
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let previous = state.x.clone();
        trace.push(advance(&mut state, y.y(), a, cfg)?);
        iterations += 1;
        let change = norm2(
            &previous
                .iter()
                .zip(&state.x)
                .map(|(p, q)| q - p)
                .collect::<Vec<_>>(),
        );
        let size = norm2(&state.x);
        if size == 0.0 {
            if change == 0.0 {
                // Stuck at the origin: no later iteration can move.
                return Err(Error::Degenerate { iterations });
            }
            continue;
        }
        if change <= cfg.rel_tol * size {
            converged = true;
            break;
        }
    }
    let x_hat = SparseSignal::normalized(state.x.clone())
        .map_err(|_| Error::Degenerate { iterations })?;
    Ok(RecoveryReport {
        x_hat,
        x_last: state.x,
        lambda: state.lambda,
        iterations,
        objective_trace: trace,
        converged,
        tau: cfg.step(a.rows()),
        config: cfg.clone(),
    })
}
