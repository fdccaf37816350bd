//! Seeded synthetic datasets with known modal sets.
//!
//! Every generator returns the samples, the generating component of each sample
//! and the true modal sets as finite point sets.

use std::f64::consts::PI;

use log::warn;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::knn::KdTree;
use crate::levelgraph::LevelGraph;
use crate::scalar::{distance, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic<T> {
    pub data: Dataset<T>,
    /// Generating component per sample.
    pub labels: Vec<i64>,
    pub truth: Vec<Dataset<T>>,
}

fn gaussian_noise(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        0.0
    } else {
        sigma * rng.sample::<f64, _>(StandardNormal)
    }
}

fn to_dataset<T: Scalar>(coords: Vec<f64>, d: usize) -> Result<Dataset<T>> {
    Dataset::from_flat(coords.into_iter().map(T::of).collect(), d)
}

/// Circles in the plane of the first two coordinates, plus isotropic noise.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSpec {
    pub centers: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub counts: Vec<usize>,
    pub noise_sigma: f64,
    /// Points per discretized true ring.
    pub truth_resolution: usize,
}

impl RingSpec {
    /// Three unit rings on a triangle of side 3, 2000 samples each, σ = 0.02.
    pub fn three_rings() -> Self {
        let h = 3.0 * (3.0f64).sqrt() / 2.0;
        Self {
            centers: vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![1.5, h]],
            radii: vec![1.0; 3],
            counts: vec![2000; 3],
            noise_sigma: 0.02,
            truth_resolution: 2000,
        }
    }

    pub fn dim(&self) -> usize {
        self.centers.first().map_or(0, Vec::len)
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Largest gap between a point of ring `i` and its discretization.
    pub fn discretization_bound(&self, i: usize) -> f64 {
        2.0 * PI * self.radii[i] / self.truth_resolution as f64
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.centers.len();
        if m == 0 || self.radii.len() != m || self.counts.len() != m {
            return Err(Error::InvalidSpec(format!(
                "{} centers, {} radii, {} counts",
                m,
                self.radii.len(),
                self.counts.len()
            )));
        }
        let d = self.dim();
        if d < 2 || self.centers.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidSpec("ring centers need a common dimension >= 2".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidSpec("ring radii must be > 0".into()));
        }
        if self.counts.contains(&0) {
            return Err(Error::InvalidSpec("ring sample counts must be > 0".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidSpec("noise sigma must be >= 0".into()));
        }
        if self.truth_resolution < 3 {
            return Err(Error::InvalidSpec("truth resolution must be >= 3".into()));
        }
        let band = 6.0 * self.noise_sigma;
        for a in 0..m {
            for b in a + 1..m {
                let gap = distance(&self.centers[a], &self.centers[b]);
                let (ra, rb) = (self.radii[a], self.radii[b]);
                if gap <= ra + rb + band && gap >= (ra - rb).abs() - band {
                    warn!("rings {a} and {b} overlap after 3-sigma dilation");
                }
            }
        }
        Ok(())
    }
}

pub fn gen_rings<T: Scalar>(spec: &RingSpec, seed: u64) -> Result<Synthetic<T>> {
    spec.validate()?;
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(spec.total() * d);
    let mut labels = Vec::with_capacity(spec.total());
    for (ring, ((center, &radius), &count)) in
        spec.centers.iter().zip(&spec.radii).zip(&spec.counts).enumerate()
    {
        for _ in 0..count {
            let theta = rng.random_range(0.0..2.0 * PI);
            for (j, &c) in center.iter().enumerate() {
                let on_ring = match j {
                    0 => radius * theta.cos(),
                    1 => radius * theta.sin(),
                    _ => 0.0,
                };
                coords.push(c + on_ring + gaussian_noise(&mut rng, spec.noise_sigma));
            }
            labels.push(ring as i64);
        }
    }
    let truth = spec
        .centers
        .iter()
        .zip(&spec.radii)
        .map(|(center, &radius)| {
            let res = spec.truth_resolution;
            let mut pts = Vec::with_capacity(res * d);
            for t in 0..res {
                let theta = 2.0 * PI * t as f64 / res as f64;
                for (j, &c) in center.iter().enumerate() {
                    pts.push(match j {
                        0 => c + radius * theta.cos(),
                        1 => c + radius * theta.sin(),
                        _ => c,
                    });
                }
            }
            to_dataset(pts, d)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Synthetic {
        data: to_dataset(coords, d)?,
        labels,
        truth,
    })
}

/// Gaussian mixture with diagonal covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub means: Vec<Vec<f64>>,
    /// Per-component diagonal of the covariance matrix.
    pub variances: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub n: usize,
}

impl MixtureSpec {
    /// Equal-weight isotropic components with a shared standard deviation.
    pub fn isotropic(means: Vec<Vec<f64>>, sigma: f64, n: usize) -> Self {
        let m = means.len();
        let variances = means.iter().map(|mu| vec![sigma * sigma; mu.len()]).collect();
        Self {
            means,
            variances,
            weights: vec![1.0 / m as f64; m],
            n,
        }
    }

    /// Three unit-variance components in the plane, pairwise 10 apart.
    pub fn three_gaussians(n: usize) -> Self {
        let h = 10.0 * (3.0f64).sqrt() / 2.0;
        Self::isotropic(vec![vec![0.0, 0.0], vec![10.0, 0.0], vec![5.0, h]], 1.0, n)
    }

    /// Two unit-variance components at ±5 on the line.
    pub fn two_gaussians_1d(n: usize) -> Self {
        Self::isotropic(vec![vec![-5.0], vec![5.0]], 1.0, n)
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.means.len();
        let d = self.dim();
        if m == 0 || d == 0 || self.variances.len() != m || self.weights.len() != m {
            return Err(Error::InvalidSpec("mixture needs matching means, variances and weights".into()));
        }
        if self.means.iter().chain(&self.variances).any(|v| v.len() != d) {
            return Err(Error::InvalidSpec("mixture components disagree on dimension".into()));
        }
        if self.variances.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidSpec("variances must be >= 0".into()));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidSpec("weights must be > 0".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("weights sum to {total}, not 1")));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be > 0".into()));
        }
        Ok(())
    }
}

pub fn gen_gaussian_mixture<T: Scalar>(spec: &MixtureSpec, seed: u64) -> Result<Synthetic<T>> {
    spec.validate()?;
    let d = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = WeightedIndex::new(&spec.weights).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let mut coords = Vec::with_capacity(spec.n * d);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let c = pick.sample(&mut rng);
        for (mu, var) in spec.means[c].iter().zip(&spec.variances[c]) {
            coords.push(mu + gaussian_noise(&mut rng, var.sqrt()));
        }
        labels.push(c as i64);
    }
    let truth = spec
        .means
        .iter()
        .map(|mu| to_dataset(mu.clone(), d))
        .collect::<Result<Vec<_>>>()?;
    Ok(Synthetic {
        data: to_dataset(coords, d)?,
        labels,
        truth,
    })
}

/// Uniform point of a discretized compact set M plus isotropic Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldNoiseSpec {
    pub base: Vec<Vec<f64>>,
    pub sigma: f64,
    pub n: usize,
}

impl ManifoldNoiseSpec {
    /// Points of the segment from `a` to `b`, `count` of them, ends included.
    pub fn segment(a: &[f64], b: &[f64], count: usize) -> Vec<Vec<f64>> {
        (0..count)
            .map(|t| {
                let s = if count == 1 { 0.0 } else { t as f64 / (count - 1) as f64 };
                a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.base.first().map_or(0, Vec::len);
        if d == 0 || self.base.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidSpec("base set must be nonempty with a common dimension".into()));
        }
        if self.base.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec("base set has non-finite coordinates".into()));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidSpec("sigma must be > 0".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be > 0".into()));
        }
        Ok(())
    }
}

/// Splits a discretized set into pieces linked by gaps of at most twice its
/// discretization spacing (the largest nearest-neighbor distance). Returns the
/// component id of each point, ids in order of first appearance.
pub fn discretization_components(points: &Dataset<f64>) -> Vec<usize> {
    let n = points.n();
    let tree = KdTree::new(points);
    let spacing = if n < 2 {
        0.0
    } else {
        (0..n)
            .map(|i| tree.nearest(points.point(i), 1, Some(i))[0].1.sqrt())
            .fold(0.0, f64::max)
    };
    let mut graph = LevelGraph::new(n);
    for i in 0..n {
        graph.add_node(i).expect("fresh node");
    }
    for i in 0..n {
        for j in tree.within_radius(points.point(i), 2.0 * spacing) {
            graph.add_edge(i, j).expect("active nodes");
        }
    }
    let mut ids = std::collections::HashMap::new();
    (0..n)
        .map(|i| {
            let root = graph.component_of(i).expect("active node");
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect()
}

pub fn gen_manifold_noise<T: Scalar>(spec: &ManifoldNoiseSpec, seed: u64) -> Result<Synthetic<T>> {
    spec.validate()?;
    let d = spec.base[0].len();
    let base = Dataset::from_rows(&spec.base)?;
    let component = discretization_components(&base);
    let pieces = component.iter().max().map_or(0, |m| m + 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(spec.n * d);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let b = rng.random_range(0..base.n());
        for &c in base.point(b) {
            coords.push(c + gaussian_noise(&mut rng, spec.sigma));
        }
        labels.push(component[b] as i64);
    }
    let truth = (0..pieces)
        .map(|p| {
            let rows: Vec<usize> = (0..base.n()).filter(|&i| component[i] == p).collect();
            base.select(&rows).map(|s| s.cast())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Synthetic {
        data: to_dataset(coords, d)?,
        labels,
        truth,
    })
}
