//! Nearest-core cluster assignment and set-distance evaluation.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::knn::KdTree;
use crate::mcores::ModalSetEstimate;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringResult<T> {
    /// Position of the assigned core in `cores`, per point.
    pub labels: Vec<usize>,
    pub cores: Vec<ModalSetEstimate<T>>,
}

/// Labels every point with the estimate holding its nearest member sample.
/// Equal distances go to the estimate listed first.
pub fn assign<T: Scalar>(
    dataset: &Dataset<T>,
    estimates: &[ModalSetEstimate<T>],
) -> Result<ClusteringResult<T>> {
    if estimates.is_empty() {
        return Err(Error::NoEstimates);
    }
    // Members laid out in estimate order so the tree's index tie-break picks the
    // earliest estimate.
    let mut owner = Vec::new();
    let mut rows = Vec::new();
    for (label, est) in estimates.iter().enumerate() {
        if est.members.is_empty() {
            return Err(Error::EmptySet);
        }
        for &m in &est.members {
            if m >= dataset.n() {
                return Err(Error::InvalidConfig(format!(
                    "estimate member {m} out of range for n={}",
                    dataset.n()
                )));
            }
            owner.push(label);
            rows.push(m);
        }
    }
    let cores = dataset.select(&rows)?;
    let tree = KdTree::new(&cores);
    let mut labels: Vec<usize> = (0..dataset.n())
        .into_par_iter()
        .map(|i| owner[tree.nearest_one(dataset.point(i)).0])
        .collect();
    for (&m, &label) in rows.iter().zip(&owner) {
        labels[m] = label;
    }
    Ok(ClusteringResult {
        labels,
        cores: estimates.to_vec(),
    })
}

/// Directed Hausdorff distance sup_{x∈from} min_{y∈to} ‖x − y‖.
pub fn directed_hausdorff<T: Scalar>(from: &Dataset<T>, to: &Dataset<T>) -> Result<T> {
    if from.d() != to.d() {
        return Err(Error::DimensionMismatch {
            expected: from.d(),
            actual: to.d(),
        });
    }
    let tree = KdTree::new(to);
    let worst = from
        .points()
        .map(|p| tree.nearest_one(p).1)
        .fold(T::zero(), T::max);
    Ok(worst.sqrt())
}

/// max of the two directed distances.
pub fn hausdorff<T: Scalar>(a: &Dataset<T>, b: &Dataset<T>) -> Result<T> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// Hausdorff distance for raw point lists; empty input is an error.
pub fn hausdorff_points<T: Scalar, P: AsRef<[T]>>(a: &[P], b: &[P]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    hausdorff(&Dataset::from_rows(a)?, &Dataset::from_rows(b)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Match<T> {
    pub estimate: usize,
    pub truth: usize,
    pub distance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport<T> {
    /// Sorted by distance.
    pub pairs: Vec<Match<T>>,
    pub unmatched_estimates: Vec<usize>,
    pub unmatched_truths: Vec<usize>,
}

impl<T: Scalar> MatchReport<T> {
    pub fn max_distance(&self) -> Option<T> {
        self.pairs.iter().map(|m| m.distance).reduce(T::max)
    }
}

/// Greedy one-to-one matching of estimates to true modal sets by increasing
/// Hausdorff distance. Estimates are taken as the coordinates of their members.
pub fn match_estimates_to_truth<T: Scalar>(
    estimates: &[ModalSetEstimate<T>],
    truth_sets: &[Dataset<T>],
    dataset: &Dataset<T>,
) -> Result<MatchReport<T>> {
    let estimate_sets = estimates
        .iter()
        .map(|e| dataset.select(&e.members))
        .collect::<Result<Vec<_>>>()?;

    let mut all: Vec<Match<T>> = estimate_sets
        .par_iter()
        .enumerate()
        .flat_map_iter(|(e, set)| {
            truth_sets.iter().enumerate().map(move |(t, truth)| {
                hausdorff(set, truth).map(|distance| Match {
                    estimate: e,
                    truth: t,
                    distance,
                })
            })
        })
        .collect::<Result<Vec<_>>>()?;
    all.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(Ordering::Equal)
            .then(a.estimate.cmp(&b.estimate))
            .then(a.truth.cmp(&b.truth))
    });

    let mut used_e = vec![false; estimates.len()];
    let mut used_t = vec![false; truth_sets.len()];
    let mut pairs = Vec::new();
    for m in all {
        if used_e[m.estimate] || used_t[m.truth] {
            continue;
        }
        used_e[m.estimate] = true;
        used_t[m.truth] = true;
        pairs.push(m);
    }
    Ok(MatchReport {
        pairs,
        unmatched_estimates: (0..estimates.len()).filter(|&e| !used_e[e]).collect(),
        unmatched_truths: (0..truth_sets.len()).filter(|&t| !used_t[t]).collect(),
    })
}
