//! M-cores: top-down sweep over the levels of the k-NN density estimate that
//! emits a cluster core whenever a point's lower-level component has not yet
//! produced one.
//!
//! For a point at level λ the lookup graph is the mutual k-NN graph on points
//! with f_k ≥ λ(1 − 9β) − ε₀ − ε̃, and the core keeps the component members
//! with f_k > λ(1 − β) − ε₀. Points are activated through a single pointer into
//! the processing order, so the whole descent costs O(nk α(n)) after the index
//! is built.

use log::warn;

use crate::dataset::Dataset;
use crate::density::{beta_k, knn_density, BetaConfig, DensityEstimate};
use crate::error::{Error, Result};
use crate::knn::{build_index, KnnIndex};
use crate::levelgraph::LevelGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McoresConfig {
    pub k: usize,
    pub beta: BetaConfig,
    /// Allowed density variation on a modal set (density units).
    pub eps0: f64,
    /// Extra lookdown for pruning spurious components (density units).
    pub eps_prune: f64,
}

impl McoresConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            beta: BetaConfig::practical(),
            eps0: 0.0,
            eps_prune: 0.0,
        }
    }

    pub fn with_beta(mut self, beta: BetaConfig) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_eps0(mut self, eps0: f64) -> Self {
        self.eps0 = eps0;
        self
    }

    pub fn with_eps_prune(mut self, eps_prune: f64) -> Self {
        self.eps_prune = eps_prune;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig(format!("k must be at least 2, got {}", self.k)));
        }
        for (name, v) in [("eps0", self.eps0), ("eps_prune", self.eps_prune)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        self.beta.validate()
    }
}

/// One estimated modal set.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalSetEstimate<T> {
    /// Creation order, 0 for the highest level.
    pub rank: usize,
    /// f_k of the founding point.
    pub creation_level: T,
    pub founder: usize,
    /// Sample indices, ascending.
    pub members: Vec<usize>,
}

impl<T: Scalar> ModalSetEstimate<T> {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Runs the level descent over a prebuilt index and density estimate.
pub fn estimate_modal_sets<T: Scalar>(
    dataset: &Dataset<T>,
    index: &KnnIndex<T>,
    density: &DensityEstimate<T>,
    config: &McoresConfig,
) -> Result<Vec<ModalSetEstimate<T>>> {
    config.validate()?;
    let n = dataset.n();
    if index.n() != n || density.n() != n || index.d() != dataset.d() {
        return Err(Error::InvalidConfig(format!(
            "dataset (n={n}, d={}), index (n={}, d={}) and density (n={}) disagree",
            dataset.d(),
            index.n(),
            index.d(),
            density.n()
        )));
    }
    if index.k() != config.k || density.k() != config.k {
        return Err(Error::InvalidConfig(format!(
            "config k={} but index k={} and density k={}",
            config.k,
            index.k(),
            density.k()
        )));
    }
    if let Some(i) = (0..n).find(|&i| index.radius(i) <= T::zero()) {
        return Err(Error::ZeroRadius { index: i });
    }

    let beta: T = beta_k(&config.beta, config.k, n, dataset.d())?;
    let lookdown = T::of(9.0) * beta;
    if lookdown >= T::one() {
        warn!(
            "9*beta_k = {lookdown} >= 1: lookup level clamps to 0, every point is active from the start"
        );
    }
    let eps0 = T::of(config.eps0);
    let slack = eps0 + T::of(config.eps_prune);

    let order = density.order();
    let values = density.values();
    let mut graph = LevelGraph::new(n);
    let mut next = 0usize;
    let mut threshold = T::infinity();
    let mut estimates = Vec::new();
    let mut batch = Vec::new();

    for &i in order {
        let level = values[i];
        let lookup = (level * (T::one() - lookdown) - slack).max(T::zero());
        threshold = threshold.min(lookup);

        let batch_start = next;
        while next < n && values[order[next]] >= threshold {
            graph.add_node(order[next])?;
            next += 1;
        }
        if next > batch_start {
            // Components after a batch do not depend on edge order, so walk
            // the rows in storage order.
            batch.clear();
            batch.extend_from_slice(&order[batch_start..next]);
            batch.sort_unstable();
            for &p in &batch {
                graph.add_mutual_edges(p, index)?;
            }
        }

        if !graph.component_seen(i)? {
            let floor = level - beta * level - eps0;
            let mut members: Vec<usize> = graph
                .component_members(i)?
                .into_iter()
                .filter(|&m| values[m] > floor)
                .collect();
            members.sort_unstable();
            estimates.push(ModalSetEstimate {
                rank: estimates.len(),
                creation_level: level,
                founder: i,
                members,
            });
        }
    }
    Ok(estimates)
}

/// Estimates created at level ≥ `fraction` · max f_k.
pub fn high_level_estimates<'a, T: Scalar>(
    estimates: &'a [ModalSetEstimate<T>],
    density: &DensityEstimate<T>,
    fraction: f64,
) -> Vec<&'a ModalSetEstimate<T>> {
    let cutoff = T::of(fraction) * density.max();
    estimates
        .iter()
        .filter(|e| e.creation_level >= cutoff)
        .collect()
}

/// Index, density and estimates of one end-to-end run.
#[derive(Debug, Clone)]
pub struct Fit<T> {
    pub index: KnnIndex<T>,
    pub density: DensityEstimate<T>,
    pub beta: T,
    pub estimates: Vec<ModalSetEstimate<T>>,
}

pub fn fit<T: Scalar>(dataset: &Dataset<T>, config: &McoresConfig) -> Result<Fit<T>> {
    config.validate()?;
    let index = build_index(dataset, config.k)?;
    let density = knn_density(&index)?;
    let beta = beta_k(&config.beta, config.k, dataset.n(), dataset.d())?;
    let estimates = estimate_modal_sets(dataset, &index, &density, config)?;
    Ok(Fit {
        index,
        density,
        beta,
        estimates,
    })
}
