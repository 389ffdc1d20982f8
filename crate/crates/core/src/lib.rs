//! Numerics for cluster-based sensor networks observing a spatially
//! correlated field.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! - [`correlation`]: the power-exponential model and its correlation radius.
//! - [`field`]: deployments, cluster covariances and synthetic observations.
//! - [`clustering`]: radius-driven non-overlapping clusters.
//! - [`estimation`]: MMSE tracing-point estimation and data accuracy.
//! - [`energy`]: first-order radio energy model and round-based lifetime runs.
//! - [`selection`]: probabilistic active-node selection trading accuracy for energy.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clustering;
pub mod correlation;
pub mod energy;
pub mod error;
pub mod estimation;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod selection;

pub use clustering::{form_clusters, neighborhoods, Cluster, Clustering};
pub use correlation::{corr_pe, correlation_radius, sample_correlation, ModelParams, SampleWindow};
pub use energy::{simulate_rounds, EnergyParams, RoundLog};
pub use error::{Error, Result};
pub use estimation::{
    accuracy_curve, data_accuracy, distortion, information_accuracy, AccuracyReport,
};
pub use field::{build_covariance, deploy_uniform, ClusterCovariance, Field, Node, NodeId};
pub use geometry::{Bounds, Point};
pub use selection::{select_nodes, SelectionPolicy, SelectionResult};
