//! Signals, sensing matrices and 1-bit measurements.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rng::{self, Stream};

/// Index of the sample preceding the first block of a piece-wise signal.
pub const BLOCK_OFFSET: usize = 50;

/// Pre-normalization levels of the four consecutive quarters of groups.
pub const LEVELS: [f64; 4] = [10.0, 15.0, -10.0, -15.0];

/// Spread of the Gaussian perturbation added to each level.
pub const LEVEL_JITTER: f64 = 0.1;

const UNIT_NORM_TOL: f64 = 1e-12;

/// Elementwise sign with `sign(0) = +1`.
pub fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Elementwise [`sign`]; never returns zero.
pub fn sign_vector(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(sign).collect()
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// A real signal of length `n`, optionally flagged as unit norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal {
    values: Vec<f64>,
    normalized: bool,
}

impl SparseSignal {
    /// Wraps `values` as-is.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("signal must have at least one entry".into()));
        }
        Ok(SparseSignal {
            values,
            normalized: false,
        })
    }

    /// Rescales `values` to unit ℓ2 norm.
    pub fn normalized(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("signal must have at least one entry".into()));
        }
        let norm = norm2(&values);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotUnitNorm { norm });
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(SparseSignal {
            values,
            normalized: true,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.values)
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    /// Checks the unit-norm flag against the stored values.
    pub fn validate(&self) -> Result<()> {
        if self.normalized && (self.norm() - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotUnitNorm { norm: self.norm() });
        }
        Ok(())
    }
}

/// Parameters of the piece-wise smooth test signal.
///
/// The signal has `d` nonzero groups of `k / d` samples each. Group `i`
/// (1-based) occupies indices `BLOCK_OFFSET + (i-1)·n/d + 1 ..= BLOCK_OFFSET +
/// (i-1)·n/d + k/d`; the groups are split into four consecutive quarters whose
/// values hover around 10, 15, −10 and −15.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalModelConfig {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub seed: u64,
}

impl Default for SignalModelConfig {
    fn default() -> Self {
        SignalModelConfig {
            n: 2000,
            k: 160,
            d: 8,
            seed: 0,
        }
    }
}

impl SignalModelConfig {
    /// Zero-based start index of group `g` (zero-based).
    fn block_start(&self, g: usize) -> usize {
        BLOCK_OFFSET + g * self.n / self.d
    }

    pub fn group_len(&self) -> usize {
        self.k / self.d
    }

    /// Zero-based half-open index ranges of the nonzero groups.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        (0..self.d)
            .map(|g| {
                let start = self.block_start(g);
                start..start + self.group_len()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.n == 0 || self.k == 0 || self.d == 0 {
            return fail(format!("n, k, d must be positive (n={}, k={}, d={})", self.n, self.k, self.d));
        }
        if self.d % 4 != 0 {
            return fail(format!("d={} must be a multiple of 4", self.d));
        }
        if self.k % self.d != 0 {
            return fail(format!("k={} must be divisible by d={}", self.k, self.d));
        }
        let blocks = self.blocks();
        for pair in blocks.windows(2) {
            if pair[0].end > pair[1].start {
                return fail(format!(
                    "groups overlap: group length {} exceeds spacing {}",
                    self.group_len(),
                    pair[1].start - pair[0].start
                ));
            }
        }
        let last = blocks.last().map(|b| b.end).unwrap_or(0);
        if last > self.n {
            return fail(format!("groups end at index {last}, beyond n={}", self.n));
        }
        Ok(())
    }
}

/// The piece-wise signal before normalization.
pub fn piecewise_levels(cfg: &SignalModelConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, Stream::Signal);
    let mut values = vec![0.0; cfg.n];
    let per_quarter = cfg.d / 4;
    for (g, block) in cfg.blocks().into_iter().enumerate() {
        let level = LEVELS[g / per_quarter];
        for v in &mut values[block] {
            let k: f64 = rng.sample(StandardNormal);
            *v = level + LEVEL_JITTER * k;
        }
    }
    Ok(values)
}

/// Unit-norm piece-wise smooth sparse signal.
pub fn generate_piecewise_signal(cfg: &SignalModelConfig) -> Result<SparseSignal> {
    SparseSignal::normalized(piecewise_levels(cfg)?)
}

const CACHE_MAGIC: &[u8; 4] = b"OBR1";
const CACHE_VERSION: u32 = 1;

/// Dense `m × n` sensing matrix stored row-major, with the seed it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingEnsemble {
    m: usize,
    n: usize,
    seed: u64,
    data: Vec<f64>,
}

impl SensingEnsemble {
    /// I.i.d. standard-normal entries drawn row by row from the matrix stream
    /// of `seed`.
    pub fn generate(m: usize, n: usize, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config(format!("sensing matrix must be non-empty (m={m}, n={n})")));
        }
        let mut rng = rng::stream(seed, Stream::Matrix);
        let data = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
        Ok(SensingEnsemble { m, n, seed, data })
    }

    /// Wraps an explicit row-major matrix.
    pub fn from_row_major(m: usize, n: usize, data: Vec<f64>, seed: u64) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Config(format!("sensing matrix must be non-empty (m={m}, n={n})")));
        }
        check_len("matrix data", m * n, data.len())?;
        Ok(SensingEnsemble { m, n, seed, data })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// `A x`. Sparse inputs only touch their support.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("A·x", self.n, x.len())?;
        let support: Vec<usize> = (0..self.n).filter(|&j| x[j] != 0.0).collect();
        let out = if support.len() * 4 < self.n {
            (0..self.m)
                .map(|i| {
                    let row = self.row(i);
                    support.iter().map(|&j| row[j] * x[j]).sum()
                })
                .collect()
        } else {
            self.data
                .par_chunks(self.n)
                .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect()
        };
        Ok(out)
    }

    /// `Aᵀ r`, accumulating rows in index order. Zero entries of `r` are
    /// skipped.
    pub fn apply_transpose(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_len("Aᵀ·r", self.m, r.len())?;
        let mut out = vec![0.0; self.n];
        for (i, &ri) in r.iter().enumerate() {
            if ri == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += ri * a;
            }
        }
        Ok(out)
    }

    /// Writes the matrix cache: `"OBR1"`, u32 version, u64 m, u64 n, then
    /// `m·n` row-major f64, all little-endian. The seed is not stored.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.m as u64).to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        for v in &self.data {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cache written by [`SensingEnsemble::save`], tagging it with
    /// `seed`.
    pub fn load(path: &Path, seed: u64) -> Result<Self> {
        let bad = |reason: String| Error::Cache {
            path: path.to_path_buf(),
            reason,
        };
        let mut r = BufReader::new(File::open(path)?);
        let mut header = [0u8; 24];
        r.read_exact(&mut header)
            .map_err(|e| bad(format!("short header: {e}")))?;
        if &header[0..4] != CACHE_MAGIC {
            return Err(bad("wrong magic".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let m = u64::from_le_bytes(header[8..16].try_into().unwrap()) as usize;
        let n = u64::from_le_bytes(header[16..24].try_into().unwrap()) as usize;
        let len = m
            .checked_mul(n)
            .ok_or_else(|| bad(format!("dimensions {m}×{n} overflow")))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != len * 8 {
            return Err(bad(format!("expected {} payload bytes, found {}", len * 8, bytes.len())));
        }
        let data = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_row_major(m, n, data, seed).map_err(|e| bad(e.to_string()))
    }
}

/// Observed signs `y ∈ {−1,+1}^m`, plus the ground-truth flip mask when the
/// measurements were simulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryMeasurements {
    y: Vec<f64>,
    true_flips: Option<Vec<f64>>,
    sigma: f64,
}

fn check_signs(v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config("measurement vector must be non-empty".into()));
    }
    match v.iter().position(|&s| s != 1.0 && s != -1.0) {
        Some(index) => Err(Error::InvalidMeasurement {
            index,
            value: v[index],
        }),
        None => Ok(()),
    }
}

impl BinaryMeasurements {
    /// Observed signs with unknown provenance. Every entry must be exactly
    /// `-1.0` or `+1.0`.
    pub fn new(y: Vec<f64>) -> Result<Self> {
        check_signs(&y)?;
        Ok(BinaryMeasurements {
            y,
            true_flips: None,
            sigma: 0.0,
        })
    }

    /// Re-checks the sign constraints, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        check_signs(&self.y)?;
        if let Some(flips) = &self.true_flips {
            check_len("true flip mask", self.y.len(), flips.len())?;
            check_signs(flips)?;
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::Config(format!("sigma={} must be nonnegative", self.sigma)));
        }
        Ok(())
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn true_flips(&self) -> Option<&[f64]> {
        self.true_flips.as_deref()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Number of measurements whose sign the noise changed, when known.
    pub fn flip_count(&self) -> Option<usize> {
        self.true_flips
            .as_ref()
            .map(|f| f.iter().filter(|&&s| s < 0.0).count())
    }
}

/// Simulates `y = sign(A x + w)` with `w ~ N(0, sigma² I)` drawn from the
/// noise stream of `seed`. With `sigma = 0` no noise is drawn.
pub fn measure(
    a: &SensingEnsemble,
    x: &SparseSignal,
    sigma: f64,
    seed: u64,
) -> Result<BinaryMeasurements> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Config(format!("sigma={sigma} must be finite and nonnegative")));
    }
    let clean = a.apply(x.values())?;
    let mut y = sign_vector(&clean);
    let mut flips = vec![1.0; clean.len()];
    if sigma > 0.0 {
        let mut rng = rng::stream(seed, Stream::Noise);
        for ((yi, fi), &ci) in y.iter_mut().zip(flips.iter_mut()).zip(&clean) {
            let w: f64 = rng.sample(StandardNormal);
            *yi = sign(ci + sigma * w);
            if *yi != sign(ci) {
                *fi = -1.0;
            }
        }
    }
    Ok(BinaryMeasurements {
        y,
        true_flips: Some(flips),
        sigma,
    })
}
