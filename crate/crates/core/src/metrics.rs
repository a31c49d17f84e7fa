//! Accuracy of a unit-norm estimate against the unit-norm ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::model::{norm2, sign_vector, SensingEnsemble};

const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Mean absolute error `‖x − e‖₁ / n`.
    pub mae: f64,
    /// Mean squared error `‖x − e‖₂² / n`.
    pub mse: f64,
    /// Position error rate: fraction of indices where exactly one of `x`,
    /// `e` is nonzero.
    pub per: f64,
    /// Hamming error: fraction of measurements where `sign(Ax)` and
    /// `sign(Ae)` disagree.
    pub he: f64,
    /// Angle error `arccos⟨x, e⟩ / π`, in `[0, 1]`.
    pub ae: f64,
}

impl MetricsReport {
    /// Metric names in table order.
    pub const NAMES: [&'static str; 5] = ["MAE", "MSE", "PER", "HE", "AE"];

    pub fn values(&self) -> [f64; 5] {
        [self.mae, self.mse, self.per, self.he, self.ae]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES
            .iter()
            .position(|n| n.eq_ignore_ascii_case(name))
            .map(|i| self.values()[i])
    }
}

/// Support indicator `|sign(v)|`, with `sign(0) = 0`.
fn in_support(v: f64) -> bool {
    v != 0.0
}

fn check_unit(v: &[f64]) -> Result<()> {
    let norm = norm2(v);
    if (norm - 1.0).abs() > UNIT_TOL {
        Err(Error::NotUnitNorm { norm })
    } else {
        Ok(())
    }
}

/// Computes all five metrics.
pub fn evaluate(x: &[f64], e: &[f64], a: &SensingEnsemble) -> Result<MetricsReport> {
    check_len("estimate", x.len(), e.len())?;
    check_len("signal vs. sensing matrix", a.cols(), x.len())?;
    check_unit(x)?;
    check_unit(e)?;
    let n = x.len() as f64;
    let mae = x.iter().zip(e).map(|(p, q)| (p - q).abs()).sum::<f64>() / n;
    let mse = x.iter().zip(e).map(|(p, q)| (p - q) * (p - q)).sum::<f64>() / n;
    let per = x
        .iter()
        .zip(e)
        .filter(|(p, q)| in_support(**p) != in_support(**q))
        .count() as f64
        / n;
    // For unit vectors arccos⟨x, e⟩ = 2·atan2(‖x − e‖, ‖x + e‖); the latter
    // stays accurate near 0 and π where arccos loses half the digits.
    let diff: f64 = x.iter().zip(e).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let sum: f64 = x.iter().zip(e).map(|(p, q)| (p + q) * (p + q)).sum::<f64>().sqrt();
    let ae = (2.0 * diff.atan2(sum) / std::f64::consts::PI).clamp(0.0, 1.0);
    let sx = sign_vector(&a.apply(x)?);
    let se = sign_vector(&a.apply(e)?);
    let he = sx.iter().zip(&se).filter(|(p, q)| p != q).count() as f64 / a.rows() as f64;
    Ok(MetricsReport {
        mae,
        mse,
        per,
        he,
        ae,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SparseSignal;

    fn setup() -> (SensingEnsemble, Vec<f64>) {
        let a = SensingEnsemble::generate(64, 16, 8).unwrap();
        let mut raw = vec![0.0; 16];
        raw[2..6].copy_from_slice(&[1.0, 2.0, 2.0, 1.0]);
        raw[11] = -3.0;
        (a, SparseSignal::normalized(raw).unwrap().into_values())
    }

    #[test]
    fn identical_vectors_score_zero() {
        let (a, x) = setup();
        let m = evaluate(&x, &x, &a).unwrap();
        assert_eq!(m.values(), [0.0; 5]);
    }

    #[test]
    fn antipodal_estimate() {
        let (a, x) = setup();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let m = evaluate(&x, &neg, &a).unwrap();
        assert_eq!(m.ae, 1.0);
        assert!((m.mse - 4.0 / 16.0).abs() < 1e-15);
        assert_eq!(m.per, 0.0);
        assert_eq!(m.he, 1.0);
    }

    #[test]
    fn position_error_counts_support_mismatch() {
        let (a, x) = setup();
        let mut raw = x.clone();
        raw[11] = 0.0;
        raw[0] = 0.5;
        let e = SparseSignal::normalized(raw).unwrap().into_values();
        let m = evaluate(&x, &e, &a).unwrap();
        assert_eq!(m.per, 2.0 / 16.0);
        assert_eq!(m.get("per"), Some(m.per));
        assert_eq!(m.get("XYZ"), None);
    }

    #[test]
    fn rejects_non_unit_and_mismatched() {
        let (a, x) = setup();
        let doubled: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!(matches!(evaluate(&x, &doubled, &a), Err(Error::NotUnitNorm { .. })));
        assert!(evaluate(&x, &x[..8], &a).is_err());
    }
}
