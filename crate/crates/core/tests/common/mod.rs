//! Reference computations that share no code with the library paths they
//! check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(rand_distr::StandardNormal)).collect()
}

/// Sum of squares, summed in ascending order so equal multisets give
/// bit-identical results.
pub fn sorted_square_sum(mut values: Vec<f64>) -> f64 {
    let mut squares: Vec<f64> = values.drain(..).map(|v| v * v).collect();
    squares.sort_by(f64::total_cmp);
    squares.iter().sum()
}

/// `‖v − u‖₂²` minimized over all `u` supported on exactly `k` indices,
/// by enumerating every support.
pub fn best_k_term_error(v: &[f64], k: usize) -> f64 {
    let n = v.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let dropped: Vec<f64> = (0..n).filter(|i| mask & (1 << i) == 0).map(|i| v[i]).collect();
        best = best.min(sorted_square_sum(dropped));
    }
    best
}

pub fn tv_direct(v: &[f64]) -> f64 {
    (1..v.len()).map(|i| (v[i] - v[i - 1]).abs()).sum()
}

/// Euclidean projection onto the ℓ1 ball of radius `r` (sort-based).
fn project_l1_ball(v: &[f64], r: f64) -> Vec<f64> {
    if v.iter().map(|x| x.abs()).sum::<f64>() <= r {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, m) in mags.iter().enumerate() {
        cumulative += m;
        let t = (cumulative - r) / (j + 1) as f64;
        if *m > t {
            theta = t;
        }
    }
    v.iter()
        .map(|x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}

/// Projection onto `{u : TV(u) ≤ r}` as a QP in difference coordinates.
///
/// Writing `u_i = c + Σ_{j<i} δ_j`, the constraint becomes `‖δ‖₁ ≤ r` and
/// the optimal offset `c` is the mean residual. Accelerated projected
/// gradient on `δ` with an ℓ1-ball projection.
pub fn tv_ball_qp(v: &[f64], r: f64) -> Vec<f64> {
    let n = v.len();
    if n < 2 {
        return v.to_vec();
    }
    let build = |delta: &[f64]| -> Vec<f64> {
        let mut u = vec![0.0; n];
        for i in 1..n {
            u[i] = u[i - 1] + delta[i - 1];
        }
        let shift = (0..n).map(|i| v[i] - u[i]).sum::<f64>() / n as f64;
        u.iter().map(|x| x + shift).collect()
    };
    let grad = |delta: &[f64]| -> Vec<f64> {
        let u = build(delta);
        let residual: Vec<f64> = (0..n).map(|i| u[i] - v[i]).collect();
        // ∂/∂δ_j = Σ_{i>j} residual_i
        (0..n - 1).map(|j| residual[j + 1..].iter().sum()).collect()
    };
    let lipschitz = (n * n) as f64;
    let mut delta = vec![0.0; n - 1];
    let mut momentum = delta.clone();
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let g = grad(&momentum);
        let step: Vec<f64> = momentum.iter().zip(&g).map(|(d, g)| d - g / lipschitz).collect();
        let next = project_l1_ball(&step, r);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        momentum = next
            .iter()
            .zip(&delta)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        delta = next;
        t = t_next;
        // Stop on the projected-gradient residual at δ itself; the momentum
        // step can stall for one iteration on the ball boundary.
        let g = grad(&delta);
        let plain: Vec<f64> = delta.iter().zip(&g).map(|(d, g)| d - g / lipschitz).collect();
        let residual: f64 = project_l1_ball(&plain, r)
            .iter()
            .zip(&delta)
            .map(|(a, b)| (a - b).abs())
            .sum();
        if residual < 1e-15 {
            break;
        }
    }
    build(&delta)
}

/// Maximal nonzero runs as zero-based half-open ranges.
pub fn runs(v: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..=v.len() {
        let nonzero = i < v.len() && v[i] != 0.0;
        match (start, nonzero) {
            (None, true) => start = Some(i),
            (Some(s), false) => {
                out.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    out
}

pub fn l1_penalty(z: &[f64]) -> f64 {
    2.0 * z.iter().map(|v| (-v).max(0.0)).sum::<f64>()
}

pub fn l2_penalty(z: &[f64]) -> f64 {
    0.5 * z.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>()
}

/// Minimum of `penalty(z ⊙ Λ)` over all `Λ` with at most `l` entries `−1`.
pub fn best_flip_objective(z: &[f64], l: usize, penalty: fn(&[f64]) -> f64) -> f64 {
    let m = z.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize > l {
            continue;
        }
        let flipped: Vec<f64> = (0..m)
            .map(|i| if mask & (1 << i) != 0 { -z[i] } else { z[i] })
            .collect();
        best = best.min(penalty(&flipped));
    }
    best
}

/// Central finite-difference gradient of `f` at `x` with step `h`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|j| {
            probe[j] = x[j] + h;
            let up = f(&probe);
            probe[j] = x[j] - h;
            let down = f(&probe);
            probe[j] = x[j];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Random vector with a few nonzero runs separated by zeros.
pub fn random_sparse(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    let mut i = rng.random_range(0..3);
    while i < n {
        let len = rng.random_range(1..8).min(n - i);
        let level: f64 = rng.random_range(-5.0..5.0);
        for x in &mut v[i..i + len] {
            *x = level + rng.random_range(-2.0..2.0);
        }
        i += len + rng.random_range(1..6);
    }
    v
}
