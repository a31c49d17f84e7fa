//! Set projections composed by the recovery loops.
//!
//! * [`hard_threshold`]: best `K`-term approximation, the projection onto
//!   `K`-sparse vectors.
//! * [`project_tv_ball`]: Euclidean projection onto `{u : TV(u) ≤ r}`.
//! * [`project_s_eps`]: projection onto vectors whose every maximal nonzero
//!   run has normalized TV at most `ε`, applied run by run.
//! * [`project_nonneg`]: clipping at zero.

mod tv;

use std::cmp::Ordering;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use tv::{project_tv_ball, tv, tv_prox};

/// Keeps the `k` largest-magnitude entries of `v` and zeroes the rest.
///
/// Among equal magnitudes the lower index wins.
pub fn hard_threshold(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if k == 0 || k > v.len() {
        return Err(Error::Config(format!(
            "sparsity k={k} must be in 1..={}",
            v.len()
        )));
    }
    if k == v.len() {
        return Ok(v.to_vec());
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    let by_magnitude = |&a: &usize, &b: &usize| -> Ordering {
        v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b))
    };
    order.select_nth_unstable_by(k - 1, by_magnitude);
    let mut out = vec![0.0; v.len()];
    for &i in &order[..k] {
        out[i] = v[i];
    }
    Ok(out)
}

/// Elementwise `max(v, 0)`.
pub fn project_nonneg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| if x > 0.0 { x } else { 0.0 }).collect()
}

/// A maximal run of consecutive nonzero entries, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub start: usize,
    pub len: usize,
}

impl Group {
    pub fn range(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// The maximal nonzero runs of a vector, in increasing index order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPartition {
    groups: Vec<Group>,
}

impl GroupPartition {
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn count(&self) -> usize {
        self.groups.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Group> {
        self.groups.iter()
    }
}

/// Splits the support of `v` into maximal runs of nonzeros. Entries outside
/// the vector count as zero.
pub fn find_groups(v: &[f64]) -> GroupPartition {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < v.len() {
        if v[i] == 0.0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < v.len() && v[i] != 0.0 {
            i += 1;
        }
        groups.push(Group {
            start,
            len: i - start,
        });
    }
    GroupPartition { groups }
}

/// TV of a run divided by its number of differences; zero for singletons.
pub fn normalized_tv(run: &[f64]) -> f64 {
    if run.len() < 2 {
        0.0
    } else {
        tv(run) / (run.len() - 1) as f64
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon >= 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "TV budget epsilon={epsilon} must be finite and nonnegative"
        )))
    }
}

/// Projects each maximal nonzero run of `v` onto the TV ball of radius
/// `epsilon · (len − 1)` and leaves zeros in place.
///
/// The support of the output is contained in the support of `v`, so the
/// result stays `K`-sparse whenever `v` is. Runs of length one are returned
/// unchanged. With `epsilon = 0` each run collapses to its mean.
pub fn project_s_eps(v: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    check_epsilon(epsilon)?;
    let mut out = vec![0.0; v.len()];
    for g in find_groups(v).iter() {
        let r = g.range();
        if g.len == 1 {
            out[r.start] = v[r.start];
            continue;
        }
        let projected = project_tv_ball(&v[r.clone()], epsilon * (g.len - 1) as f64)?;
        out[r].copy_from_slice(&projected);
    }
    Ok(out)
}

/// Whether every maximal nonzero run of `v` has normalized TV within
/// `epsilon · (1 + rel) + abs`.
pub fn in_s_eps(v: &[f64], epsilon: f64, rel: f64, abs: f64) -> bool {
    find_groups(v)
        .iter()
        .all(|g| normalized_tv(&v[g.range()]) <= epsilon * (1.0 + rel) + abs)
}
