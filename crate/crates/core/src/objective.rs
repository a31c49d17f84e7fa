//! One-sided sign-consistency penalties and their subgradients.
//!
//! With `z = y ⊙ A x`, a measurement is consistent when `z_i ≥ 0`. Only the
//! negative part `z₋ = min(z, 0)` is charged.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::model::{sign, SensingEnsemble};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    /// `2‖z₋‖₁`
    OneSidedL1,
    /// `½‖z₋‖₂²`
    OneSidedL2,
}

impl PenaltyKind {
    /// Step size used when none is given: `1` for ℓ1, `1/m` for ℓ2.
    pub fn default_step(self, m: usize) -> f64 {
        match self {
            PenaltyKind::OneSidedL1 => 1.0,
            PenaltyKind::OneSidedL2 => 1.0 / m as f64,
        }
    }
}

pub fn penalty_value(z: &[f64], kind: PenaltyKind) -> f64 {
    let negative = z.iter().map(|&v| v.min(0.0));
    match kind {
        PenaltyKind::OneSidedL1 => 2.0 * negative.map(f64::abs).sum::<f64>(),
        PenaltyKind::OneSidedL2 => 0.5 * negative.map(|v| v * v).sum::<f64>(),
    }
}

/// Penalty of `y_eff ⊙ ax` where `ax = A x` is already known.
pub(crate) fn penalty_at(ax: &[f64], y_eff: &[f64], kind: PenaltyKind) -> f64 {
    let z: Vec<f64> = ax.iter().zip(y_eff).map(|(a, y)| a * y).collect();
    penalty_value(&z, kind)
}

fn check_y(y_eff: &[f64]) -> Result<()> {
    match y_eff.iter().position(|&s| s != 1.0 && s != -1.0) {
        Some(index) => Err(Error::InvalidMeasurement {
            index,
            value: y_eff[index],
        }),
        None => Ok(()),
    }
}

/// A subgradient of `x ↦ f(y_eff ⊙ A x)`:
///
/// * ℓ1: `Aᵀ(sign(Ax) − y_eff)`
/// * ℓ2: `(YA)ᵀ (YAx)₋` with `Y = diag(y_eff)`
///
/// At points where some `(Ax)_i = 0` the ℓ1 result uses `sign(0) = +1` and
/// is one valid subgradient among several.
pub fn subgradient(
    x: &[f64],
    a: &SensingEnsemble,
    y_eff: &[f64],
    kind: PenaltyKind,
) -> Result<Vec<f64>> {
    let ax = a.apply(x)?;
    subgradient_at(&ax, a, y_eff, kind)
}

/// [`subgradient`] given the product `ax = A x`.
pub(crate) fn subgradient_at(
    ax: &[f64],
    a: &SensingEnsemble,
    y_eff: &[f64],
    kind: PenaltyKind,
) -> Result<Vec<f64>> {
    check_len("effective measurements", a.rows(), y_eff.len())?;
    check_len("A·x", a.rows(), ax.len())?;
    check_y(y_eff)?;
    let residual: Vec<f64> = match kind {
        PenaltyKind::OneSidedL1 => ax.iter().zip(y_eff).map(|(&p, &y)| sign(p) - y).collect(),
        PenaltyKind::OneSidedL2 => ax
            .iter()
            .zip(y_eff)
            .map(|(&p, &y)| y * (y * p).min(0.0))
            .collect(),
    };
    a.apply_transpose(&residual)
}
