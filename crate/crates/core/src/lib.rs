//! Recovery of sparse, piece-wise smooth signals from noisy 1-bit
//! compressive measurements `y = sign(A x + w)`.
//!
//! The crate implements binary iterative hard thresholding (BIHT), its
//! fused variant that additionally bounds the normalized total variation of
//! every nonzero run (BFCS), and robust versions of both that jointly
//! estimate which measurement signs were flipped by noise (RoBIHT, RoBFCS).
//! Each comes with a one-sided ℓ1 or ℓ2 sign-consistency penalty.
//!
//! ```
//! use onebit::model::{generate_piecewise_signal, measure, SensingEnsemble, SignalModelConfig};
//! use onebit::solver::{solve, SolverConfig};
//!
//! let cfg = SignalModelConfig { n: 400, k: 32, d: 4, seed: 1 };
//! let x = generate_piecewise_signal(&cfg).unwrap();
//! let a = SensingEnsemble::generate(600, 400, 1).unwrap();
//! let y = measure(&a, &x, 0.0, 1).unwrap();
//!
//! let mut solver = SolverConfig::new("BFCS".parse().unwrap(), 32);
//! solver.epsilon = 0.05;
//! let report = solve(&y, &a, &solver).unwrap();
//! let cos: f64 = report.x_hat.values().iter().zip(x.values()).map(|(p, q)| p * q).sum();
//! assert!(cos > 0.99);
//! ```

pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod projections;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
