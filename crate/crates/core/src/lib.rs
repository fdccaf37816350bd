//! Modal-set estimation with the M-cores level descent over a k-NN density
//! estimate, plus the supporting index, graph, metrics and data generators.
//!
//! The numeric types are generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` and `*32` aliases below fix the precision.

pub mod clustering;
pub mod dataset;
pub mod dbscan;
pub mod density;
pub mod error;
pub mod knn;
pub mod levelgraph;
pub mod mcores;
pub mod metrics;
pub mod scalar;
pub mod synthgen;

pub use clustering::{assign, hausdorff, match_estimates_to_truth, ClusteringResult, MatchReport};
pub use dataset::{load_csv, read_csv, validate, Dataset, LabeledDataset, Loaded, ValidationReport};
pub use dbscan::{dbscan, DbscanConfig};
pub use density::{beta_k, c_delta_n, default_k, knn_density, BetaConfig, BetaMode, DensityEstimate};
pub use error::{Error, ErrorCategory, Result};
pub use knn::{build_index, knn_brute_force, KdTree, KnnIndex};
pub use levelgraph::LevelGraph;
pub use mcores::{estimate_modal_sets, fit, high_level_estimates, Fit, McoresConfig, ModalSetEstimate};
pub use metrics::{adjusted_mutual_information, adjusted_rand_index, score, ScoreReport};
pub use scalar::Scalar;
pub use synthgen::{
    gen_gaussian_mixture, gen_manifold_noise, gen_rings, ManifoldNoiseSpec, MixtureSpec, RingSpec,
    Synthetic,
};

pub type Dataset64 = Dataset<f64>;
pub type KnnIndex64 = KnnIndex<f64>;
pub type DensityEstimate64 = DensityEstimate<f64>;
pub type ModalSetEstimate64 = ModalSetEstimate<f64>;
pub type ClusteringResult64 = ClusteringResult<f64>;
pub type Fit64 = Fit<f64>;

pub type Dataset32 = Dataset<f32>;
pub type KnnIndex32 = KnnIndex<f32>;
pub type DensityEstimate32 = DensityEstimate<f32>;
pub type ModalSetEstimate32 = ModalSetEstimate<f32>;
pub type ClusteringResult32 = ClusteringResult<f32>;
pub type Fit32 = Fit<f32>;
