//! Exact DBSCAN, used as a comparison baseline.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::knn::KdTree;
use crate::levelgraph::LevelGraph;
use crate::scalar::Scalar;

/// Label given to points that are neither core nor within `eps` of a core.
pub const NOISE: i64 = -1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DbscanConfig {
    pub eps: f64,
    /// Neighbors within `eps`, self included, needed for a core point.
    pub min_pts: usize,
}

impl DbscanConfig {
    pub fn new(eps: f64, min_pts: usize) -> Self {
        Self { eps, min_pts }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::InvalidConfig(format!("eps must be > 0, got {}", self.eps)));
        }
        if self.min_pts == 0 {
            return Err(Error::InvalidConfig("min_pts must be >= 1".into()));
        }
        Ok(())
    }
}

fn eps_neighborhoods<T: Scalar>(dataset: &Dataset<T>, eps: f64) -> Vec<Vec<usize>> {
    let eps = T::of(eps);
    let tree = KdTree::new(dataset);
    (0..dataset.n())
        .into_par_iter()
        .map(|i| tree.within_radius(dataset.point(i), eps))
        .collect()
}

/// Points with at least `min_pts` neighbors within `eps`, self included.
pub fn core_points<T: Scalar>(dataset: &Dataset<T>, config: &DbscanConfig) -> Result<Vec<bool>> {
    config.validate()?;
    Ok(eps_neighborhoods(dataset, config.eps)
        .iter()
        .map(|nb| nb.len() >= config.min_pts)
        .collect())
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Cluster labels `0..c`, or [`NOISE`].
///
/// Clusters are numbered by the lexicographically smallest coordinates among
/// their core points, and a border point joins the lowest-numbered cluster it
/// touches. Both rules depend only on the point set, not on the row order.
pub fn dbscan<T: Scalar>(dataset: &Dataset<T>, config: &DbscanConfig) -> Result<Vec<i64>> {
    config.validate()?;
    let n = dataset.n();
    let neighborhoods = eps_neighborhoods(dataset, config.eps);
    let core: Vec<bool> = neighborhoods.iter().map(|nb| nb.len() >= config.min_pts).collect();

    let mut graph = LevelGraph::new(n);
    for i in (0..n).filter(|&i| core[i]) {
        graph.add_node(i)?;
    }
    for i in (0..n).filter(|&i| core[i]) {
        for &j in neighborhoods[i].iter().filter(|&&j| core[j]) {
            graph.add_edge(i, j)?;
        }
    }

    // Smallest core point of every component, by coordinates then row.
    let mut roots: Vec<usize> = Vec::new();
    let mut smallest = vec![usize::MAX; n];
    for i in (0..n).filter(|&i| core[i]) {
        let root = graph.component_of(i)?;
        let cur = smallest[root];
        if cur == usize::MAX {
            roots.push(root);
            smallest[root] = i;
        } else if lex_cmp(dataset.point(i), dataset.point(cur)).then(i.cmp(&cur)).is_lt() {
            smallest[root] = i;
        }
    }
    roots.sort_by(|&a, &b| {
        let (pa, pb) = (smallest[a], smallest[b]);
        lex_cmp(dataset.point(pa), dataset.point(pb)).then(pa.cmp(&pb))
    });
    let mut cluster_of_root = vec![NOISE; n];
    for (id, &root) in roots.iter().enumerate() {
        cluster_of_root[root] = id as i64;
    }

    let mut labels = vec![NOISE; n];
    for i in 0..n {
        labels[i] = if core[i] {
            cluster_of_root[graph.component_of(i)?]
        } else {
            let mut best = NOISE;
            for &j in neighborhoods[i].iter().filter(|&&j| core[j]) {
                let c = cluster_of_root[graph.component_of(j)?];
                if best == NOISE || c < best {
                    best = c;
                }
            }
            best
        };
    }
    Ok(labels)
}

/// Core-point mask by direct pairwise counting.
pub fn core_points_brute_force<T: Scalar>(dataset: &Dataset<T>, config: &DbscanConfig) -> Vec<bool> {
    let eps = T::of(config.eps);
    let eps_sq = eps * eps;
    dataset
        .points()
        .map(|p| {
            dataset
                .points()
                .filter(|q| crate::scalar::squared_distance(p, q) <= eps_sq)
                .count()
                >= config.min_pts
        })
        .collect()
}
