//! MMSE estimation of a cluster's tracing point at its CH, the resulting
//! data accuracy, and the per-node-shrink-then-average baseline.

use alloc::vec::Vec;

use crate::clustering::Cluster;
use crate::correlation::ModelParams;
use crate::error::{Error, Result};
use crate::field::{build_covariance, ClusterCovariance, Field, NodeId};
use crate::geometry::Point;
use crate::linalg::{dot, Cholesky};

/// Accuracy figures for one node subset of a cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccuracyReport {
    /// `1 - distortion / σ_S²`.
    pub d_a: f64,
    /// Information accuracy of the averaging baseline.
    pub i_m: f64,
    /// Mean-square error of the MMSE estimate.
    pub distortion: f64,
    /// Number of nodes used.
    pub m: usize,
}

fn ridge_factor(cov: &ClusterCovariance) -> Result<Cholesky> {
    if cov.is_empty() {
        return Err(Error::ContractViolation(
            "estimation needs at least one node",
        ));
    }
    Cholesky::factor(&cov.b.with_diagonal_shift(cov.noise_ratio()))
}

fn check_len(x: &[f64], cov: &ClusterCovariance) -> Result<()> {
    if x.len() != cov.len() {
        return Err(Error::DimensionMismatch {
            expected: cov.len(),
            found: x.len(),
        });
    }
    Ok(())
}

/// `β = (B + q I)⁻¹ r` with `q = σ_N² / σ_S²`.
pub fn mmse_weights(cov: &ClusterCovariance) -> Result<Vec<f64>> {
    ridge_factor(cov)?.solve(&cov.r)
}

/// `Ŝ = βᵀ x`.
pub fn estimate_tracing_point(x: &[f64], cov: &ClusterCovariance) -> Result<f64> {
    check_len(x, cov)?;
    Ok(dot(&mmse_weights(cov)?, x))
}

/// Posterior mean of `(S, s_1, ..., s_M)` given the observations.
///
/// Member estimates use `B (B + qI)⁻¹ x = x - q (B + qI)⁻¹ x`, which is
/// exactly `x` when there is no noise.
pub fn mmse_full(x: &[f64], cov: &ClusterCovariance) -> Result<Vec<f64>> {
    check_len(x, cov)?;
    let y = ridge_factor(cov)?.solve(x)?;
    let q = cov.noise_ratio();
    let mut z = Vec::with_capacity(x.len() + 1);
    z.push(dot(&cov.r, &y));
    z.extend(x.iter().zip(&y).map(|(xi, yi)| xi - q * yi));
    Ok(z)
}

/// `D_A(M) = rᵀ β`.
pub fn data_accuracy(cov: &ClusterCovariance) -> Result<f64> {
    Ok(dot(&cov.r, &mmse_weights(cov)?))
}

/// `σ_S² (1 - rᵀ β)`.
pub fn distortion(cov: &ClusterCovariance) -> Result<f64> {
    Ok(cov.sigma_s2 * (1.0 - data_accuracy(cov)?))
}

/// Each node shrinks its own reading, `Ŝ_i = r_i / (1 + q) · x_i`, and the CH
/// averages the `M` estimates. With `w_i = r_i / (M (1 + q))` the normalized
/// error is `1 - 2 wᵀr + wᵀ(B + qI)w`, so the accuracy is `2 wᵀr - wᵀ(B + qI)w`.
pub fn information_accuracy(cov: &ClusterCovariance) -> f64 {
    let m = cov.len() as f64;
    let q = cov.noise_ratio();
    let w: Vec<f64> = cov.r.iter().map(|ri| ri / (m * (1.0 + q))).collect();
    let spread = cov.b.quadratic_form(&w) + q * dot(&w, &w);
    2.0 * dot(&w, &cov.r) - spread
}

pub fn accuracy_report(cov: &ClusterCovariance) -> Result<AccuracyReport> {
    let d_a = data_accuracy(cov)?;
    Ok(AccuracyReport {
        d_a,
        i_m: information_accuracy(cov),
        distortion: cov.sigma_s2 * (1.0 - d_a),
        m: cov.len(),
    })
}

/// Cluster nodes in activation order: the CH, then members by ascending
/// distance to the tracing point (ties by id).
pub fn activation_order(cluster: &Cluster, field: &Field) -> Result<Vec<(NodeId, Point)>> {
    let locate = |id: NodeId| {
        field
            .position(id)
            .ok_or(Error::ContractViolation("cluster node missing from field"))
    };
    let tp = cluster.tracing_point;
    let mut members = cluster
        .members
        .iter()
        .map(|&id| Ok((id, locate(id)?)))
        .collect::<Result<Vec<_>>>()?;
    members.sort_by(|a, b| {
        a.1.distance(&tp)
            .total_cmp(&b.1.distance(&tp))
            .then(a.0.cmp(&b.0))
    });
    let mut order = Vec::with_capacity(cluster.size());
    order.push((cluster.ch, locate(cluster.ch)?));
    order.extend(members);
    Ok(order)
}

/// Covariance of the whole cluster with nodes in [`activation_order`].
pub fn ordered_covariance(
    cluster: &Cluster,
    field: &Field,
    params: &ModelParams,
) -> Result<ClusterCovariance> {
    let positions: Vec<Point> = activation_order(cluster, field)?
        .into_iter()
        .map(|(_, p)| p)
        .collect();
    build_covariance(&positions, cluster.tracing_point, params)
}

/// Accuracy of the first `K` nodes in activation order, for `K = 1..=M`.
pub fn accuracy_curve(
    cluster: &Cluster,
    field: &Field,
    params: &ModelParams,
) -> Result<Vec<AccuracyReport>> {
    let full = ordered_covariance(cluster, field, params)?;
    let idx: Vec<usize> = (0..full.len()).collect();
    (1..=full.len())
        .map(|k| accuracy_report(&full.subset(&idx[..k])))
        .collect()
}
