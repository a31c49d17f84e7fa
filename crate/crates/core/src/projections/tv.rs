//! One-dimensional total variation: the semi-norm, its proximal operator and
//! the projection onto a TV ball.

use crate::error::{Error, Result};

/// `Σ |v[i+1] − v[i]|`.
pub fn tv(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Solves `argmin_u ½‖u − v‖² + λ·TV(u)` exactly.
///
/// This is the direct taut-string method: a single forward pass tracks the
/// lower and upper bounds of the current constant segment together with the
/// running dual variable, and emits a segment whenever the dual leaves
/// `[−λ, λ]`. Linear time in the common case.
pub fn tv_prox(v: &[f64], lambda: f64) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    if n == 1 || lambda <= 0.0 {
        out.copy_from_slice(v);
        return out;
    }
    let last = n - 1;
    let (mut k, mut k0) = (0usize, 0usize);
    let (mut kminus, mut kplus) = (0usize, 0usize);
    // Dual variable bounds at the current position.
    let (mut umin, mut umax) = (lambda, -lambda);
    // Admissible range of the current segment's value.
    let (mut vmin, mut vmax) = (v[0] - lambda, v[0] + lambda);
    loop {
        while k == last {
            if umin < 0.0 {
                while k0 <= kminus {
                    out[k0] = vmin;
                    k0 += 1;
                }
                k = k0;
                kminus = k0;
                vmin = v[k0];
                umin = lambda;
                umax = vmin + umin - vmax;
            } else if umax > 0.0 {
                while k0 <= kplus {
                    out[k0] = vmax;
                    k0 += 1;
                }
                k = k0;
                kplus = k0;
                vmax = v[k0];
                umax = -lambda;
                umin = vmax + umax - vmin;
            } else {
                vmin += umin / (k - k0 + 1) as f64;
                while k0 <= k {
                    out[k0] = vmin;
                    k0 += 1;
                }
                return out;
            }
        }
        umin += v[k + 1] - vmin;
        if umin < -lambda {
            // Negative jump.
            while k0 <= kminus {
                out[k0] = vmin;
                k0 += 1;
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmin = v[k0];
            vmax = vmin + 2.0 * lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        umax += v[k + 1] - vmax;
        if umax > lambda {
            // Positive jump.
            while k0 <= kplus {
                out[k0] = vmax;
                k0 += 1;
            }
            k = k0;
            kminus = k0;
            kplus = k0;
            vmax = v[k0];
            vmin = vmax - 2.0 * lambda;
            umin = lambda;
            umax = -lambda;
            continue;
        }
        k += 1;
        if umin >= lambda {
            kminus = k;
            vmin += (umin - lambda) / (k - k0 + 1) as f64;
            umin = lambda;
        }
        if umax <= -lambda {
            kplus = k;
            vmax += (umax + lambda) / (k - k0 + 1) as f64;
            umax = -lambda;
        }
    }
}

const MAX_BISECTIONS: usize = 200;

/// Euclidean projection of `v` onto `{u : TV(u) ≤ radius}`.
///
/// The projection equals `tv_prox(v, λ*)` for the multiplier `λ*` at which
/// the prox output has TV exactly `radius`. `λ ↦ TV(tv_prox(v, λ))` is
/// nonincreasing, so `λ*` is found by bisection, keeping the upper end
/// feasible. Stops once `radius − TV ≤ max(1e−9, 1e−8·radius)`.
pub fn project_tv_ball(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::Config(format!(
            "TV radius {radius} must be finite and nonnegative"
        )));
    }
    if tv(v) <= radius {
        return Ok(v.to_vec());
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if radius == 0.0 {
        return Ok(vec![mean; v.len()]);
    }
    // Beyond the largest centred partial sum the prox is constant.
    let mut hi = v
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x - mean;
            Some(acc.abs())
        })
        .fold(0.0, f64::max);
    let mut lo = 0.0;
    let tol = f64::max(1e-9, 1e-8 * radius);
    let mut best = vec![mean; v.len()];
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let candidate = tv_prox(v, mid);
        let t = tv(&candidate);
        if t > radius {
            lo = mid;
        } else {
            hi = mid;
            best = candidate;
            if radius - t <= tol {
                break;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        assert_eq!(tv(&[2.0; 5]), 0.0);
        assert_eq!(tv(&[0.0, 1.0, 0.0]), 2.0);
        assert_eq!(tv(&[1.0, 2.0, 4.5, 7.0]), 6.0);
        assert_eq!(tv(&[3.0]), 0.0);
    }

    #[test]
    fn prox_of_two_points() {
        // Below the fusion threshold each point moves λ toward the other.
        assert_eq!(tv_prox(&[3.0, 1.0], 0.25), vec![2.75, 1.25]);
        // Past it they merge at the mean.
        assert_eq!(tv_prox(&[3.0, 1.0], 5.0), vec![2.0, 2.0]);
    }

    #[test]
    fn ball_two_point_closed_form() {
        let p = project_tv_ball(&[3.0, 1.0], 0.5).unwrap();
        assert!((p[0] - 2.25).abs() < 1e-9 && (p[1] - 1.75).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn feasible_input_is_unchanged() {
        let v = [1.0, 1.5, 1.25];
        assert_eq!(project_tv_ball(&v, 0.75).unwrap(), v.to_vec());
        assert_eq!(project_tv_ball(&v, 10.0).unwrap(), v.to_vec());
    }

    #[test]
    fn zero_radius_gives_mean() {
        assert_eq!(project_tv_ball(&[1.0, 5.0, 3.0], 0.0).unwrap(), vec![3.0; 3]);
    }

    #[test]
    fn negative_radius_rejected() {
        assert!(project_tv_ball(&[1.0, 2.0], -1.0).is_err());
        assert!(project_tv_ball(&[1.0, 2.0], f64::NAN).is_err());
    }
}
