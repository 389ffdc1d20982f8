//! Probabilistic active-node selection.
//!
//! The CH is always on and every other member is on independently with
//! probability `P`, so the number of active nodes `N` is `1 + Binomial(M - 1, P)`.
//! Accuracy and energy are averaged over that distribution; `P_min` is the
//! smallest grid probability reaching a fraction `χ_a` of the full-cluster
//! accuracy, `P_max` the largest keeping energy under a fraction `χ_e` of the
//! full-cluster cost, and the operating point is their midpoint.

use alloc::vec::Vec;

use crate::clustering::Cluster;
use crate::correlation::ModelParams;
use crate::energy::{e_cluster, EnergyParams};
use crate::error::{check, Error, Result};
use crate::estimation::{accuracy_curve, activation_order, data_accuracy, ordered_covariance};
use crate::field::{Field, NodeId};

/// Slack used when rounding decimal probabilities that should land on `.5`.
const ROUNDING_SLACK: f64 = 1e-9;
/// Largest cluster for which the exhaustive subset average is attempted.
pub const EXHAUSTIVE_MAX_NODES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionPolicy {
    /// Required fraction of the full-cluster accuracy, in `(0, 1)`.
    pub chi_a: f64,
    /// Allowed fraction of the full-cluster energy, in `(0, 1)`.
    pub chi_e: f64,
    /// Spacing of the probability grid; `1 / p_grid_step` must be an integer.
    pub p_grid_step: f64,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        SelectionPolicy {
            chi_a: 0.956,
            chi_e: 0.63,
            p_grid_step: 0.01,
        }
    }
}

impl SelectionPolicy {
    pub fn validate(&self) -> Result<()> {
        check(
            self.chi_a > 0.0 && self.chi_a < 1.0,
            "chi_a",
            self.chi_a,
            "in (0, 1)",
        )?;
        check(
            self.chi_e > 0.0 && self.chi_e < 1.0,
            "chi_e",
            self.chi_e,
            "in (0, 1)",
        )?;
        check(
            self.p_grid_step > 0.0 && self.p_grid_step <= 0.1,
            "p_grid_step",
            self.p_grid_step,
            "in (0, 0.1]",
        )?;
        let inv = 1.0 / self.p_grid_step;
        check(
            (inv - libm::round(inv)).abs() < 1e-9 * inv,
            "p_grid_step",
            self.p_grid_step,
            "a divisor of 1",
        )
    }

    /// Number of grid intervals on `[0, 1]`.
    pub fn grid_steps(&self) -> u32 {
        libm::round(1.0 / self.p_grid_step) as u32
    }

    fn grid(&self) -> impl DoubleEndedIterator<Item = f64> {
        let steps = self.grid_steps();
        (1..=steps).map(move |t| t as f64 / steps as f64)
    }
}

/// Exact `C(n, k)`; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c.checked_mul(n as u128 - k as u128 + i)? / i;
    }
    Some(c)
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).fold(1.0, |c, i| c * (n - k + i) as f64 / i as f64)
}

fn pmf_unchecked(m_total: usize, k: usize, p: f64) -> f64 {
    binomial_f64(m_total - 1, k - 1)
        * libm::pow(p, (k - 1) as f64)
        * libm::pow(1.0 - p, (m_total - k) as f64)
}

/// `P(N = K) = C(M-1, K-1) P^(K-1) (1-P)^(M-K)`.
pub fn active_pmf(m_total: usize, k: usize, p: f64) -> Result<f64> {
    check(m_total >= 1, "M", m_total as f64, ">= 1")?;
    check(k >= 1 && k <= m_total, "K", k as f64, "in 1..=M")?;
    check((0.0..=1.0).contains(&p), "P", p, "in [0, 1]")?;
    Ok(pmf_unchecked(m_total, k, p))
}

/// Expected number of active nodes and its half-up rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpectedActive {
    pub real: f64,
    pub rounded: usize,
}

pub fn round_half_up(x: f64) -> usize {
    libm::floor(x + 0.5 + ROUNDING_SLACK) as usize
}

/// `E[N] = 1 + (M - 1) P`.
pub fn expected_active(m_total: usize, p: f64) -> Result<ExpectedActive> {
    check(m_total >= 1, "M", m_total as f64, ">= 1")?;
    check((0.0..=1.0).contains(&p), "P", p, "in [0, 1]")?;
    let real = 1.0 + (m_total as f64 - 1.0) * p;
    Ok(ExpectedActive {
        real,
        rounded: round_half_up(real),
    })
}

/// Inverse of [`expected_active`]: `P = (m* - 1) / (M - 1)`.
pub fn activation_probability(m_total: usize, expected: f64) -> Result<f64> {
    check(m_total >= 2, "M", m_total as f64, ">= 2")?;
    Ok((expected - 1.0) / (m_total as f64 - 1.0))
}

/// `Σ_K values[K-1] · P(N = K)` for a cluster of `values.len()` nodes.
pub fn expectation_under_p(values: &[f64], p: f64) -> f64 {
    let m = values.len();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v * pmf_unchecked(m, i + 1, p))
        .sum()
}

/// `A(P)` given the per-size accuracies `A(N = K)`.
pub fn accuracy_under_p(accuracy_levels: &[f64], p: f64) -> f64 {
    expectation_under_p(accuracy_levels, p)
}

/// `E_cluster(P)` given the per-size costs `E_cluster(N = K)`.
pub fn energy_under_p(energy_levels: &[f64], p: f64) -> f64 {
    expectation_under_p(energy_levels, p)
}

/// `A(N = K)` for `K = 1..=M`, on the distance-ordered subsets.
pub fn accuracy_levels(cluster: &Cluster, field: &Field, params: &ModelParams) -> Result<Vec<f64>> {
    Ok(accuracy_curve(cluster, field, params)?
        .into_iter()
        .map(|r| r.d_a)
        .collect())
}

/// `A(N = K)` averaged over every `K`-subset that contains the CH.
///
/// Exponential in the cluster size; meant as a reference for the
/// distance-ordered levels on small clusters.
pub fn subset_average_accuracy_levels(
    cluster: &Cluster,
    field: &Field,
    params: &ModelParams,
) -> Result<Vec<f64>> {
    let m = cluster.size();
    check(
        m <= EXHAUSTIVE_MAX_NODES,
        "cluster size",
        m as f64,
        "<= EXHAUSTIVE_MAX_NODES",
    )?;
    let full = ordered_covariance(cluster, field, params)?;
    let mut sums = alloc::vec![0.0; m];
    let mut counts = alloc::vec![0usize; m];
    let mut idx = Vec::with_capacity(m);
    for mask in 0u32..(1 << (m - 1)) {
        idx.clear();
        idx.push(0);
        idx.extend((0..m - 1).filter(|b| mask & (1 << b) != 0).map(|b| b + 1));
        let k = idx.len();
        sums[k - 1] += data_accuracy(&full.subset(&idx))?;
        counts[k - 1] += 1;
    }
    Ok(sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect())
}

/// `E_cluster(N = K)` for `K = 1..=M`, using the CH's distance to the sink.
pub fn energy_levels(
    cluster: &Cluster,
    field: &Field,
    radius: f64,
    energy: &EnergyParams,
) -> Result<Vec<f64>> {
    let ch = field
        .position(cluster.ch)
        .ok_or(Error::ContractViolation("cluster head missing from field"))?;
    let d_bs = ch.distance(&field.sink());
    Ok((1..=cluster.size())
        .map(|k| e_cluster(k, radius, d_bs, energy))
        .collect())
}

/// Smallest grid probability with `A(P) >= χ_a · A(1)`.
pub fn find_p_min(accuracy_levels: &[f64], policy: &SelectionPolicy) -> Result<f64> {
    policy.validate()?;
    let target = policy.chi_a * accuracy_under_p(accuracy_levels, 1.0);
    Ok(policy
        .grid()
        .find(|&p| accuracy_under_p(accuracy_levels, p) >= target)
        .unwrap_or(1.0))
}

/// Outcome of the energy-side search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBound {
    pub p_max: f64,
    /// False when no grid probability met the energy ceiling and the smallest
    /// grid point was returned instead.
    pub satisfied: bool,
}

/// Largest grid probability with `E_cluster(P) <= χ_e · E_cluster(1)`.
///
/// A lone CH has no members to switch, so its bound is `P = 1`.
pub fn find_p_max(energy_levels: &[f64], policy: &SelectionPolicy) -> Result<EnergyBound> {
    policy.validate()?;
    if energy_levels.len() <= 1 {
        return Ok(EnergyBound {
            p_max: 1.0,
            satisfied: true,
        });
    }
    let ceiling = policy.chi_e * energy_under_p(energy_levels, 1.0);
    Ok(
        match policy
            .grid()
            .rev()
            .find(|&p| energy_under_p(energy_levels, p) <= ceiling)
        {
            Some(p_max) => EnergyBound {
                p_max,
                satisfied: true,
            },
            None => EnergyBound {
                p_max: policy.p_grid_step,
                satisfied: false,
            },
        },
    )
}

/// `(P_min + P_max) / 2`, evaluated on grid ticks when both ends sit on the
/// grid so that decimal midpoints such as 0.65 come out as the nearest double.
pub fn trade_off_probability(p_min: f64, p_max: f64, policy: &SelectionPolicy) -> f64 {
    let steps = policy.grid_steps() as f64;
    let on_grid = |p: f64| {
        let t = libm::round(p * steps);
        ((t / steps - p).abs() < 1e-9).then_some(t)
    };
    match (on_grid(p_min), on_grid(p_max)) {
        (Some(a), Some(b)) => (a + b) / (2.0 * steps),
        _ => (p_min + p_max) / 2.0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    pub cluster_id: usize,
    /// Cluster size including the CH.
    pub m: usize,
    pub p_min: f64,
    pub p_max: f64,
    /// Whether `p_max` actually met the energy ceiling.
    pub p_max_satisfied: bool,
    pub p_star: f64,
    pub m_star_real: f64,
    pub m_star: usize,
    /// CH first, then the chosen members nearest the tracing point.
    pub chosen_ids: Vec<NodeId>,
}

/// Everything a cluster needs for selection: its id, the correlation radius
/// it was formed with, and the model and radio parameters.
#[derive(Clone, Copy, Debug)]
pub struct SelectionContext<'a> {
    pub field: &'a Field,
    pub params: &'a ModelParams,
    pub energy: &'a EnergyParams,
    pub radius: f64,
    pub policy: &'a SelectionPolicy,
}

pub fn select_nodes(
    cluster_id: usize,
    cluster: &Cluster,
    ctx: &SelectionContext<'_>,
    p_override: Option<f64>,
) -> Result<SelectionResult> {
    ctx.policy.validate()?;
    let m = cluster.size();
    let p_min = find_p_min(
        &accuracy_levels(cluster, ctx.field, ctx.params)?,
        ctx.policy,
    )?;
    let bound = find_p_max(
        &energy_levels(cluster, ctx.field, ctx.radius, ctx.energy)?,
        ctx.policy,
    )?;
    let p_star = match p_override {
        Some(p) => {
            check((0.0..=1.0).contains(&p), "p_override", p, "in [0, 1]")?;
            p
        }
        None => trade_off_probability(p_min, bound.p_max, ctx.policy),
    };
    let expected = expected_active(m, p_star)?;
    let chosen_ids = activation_order(cluster, ctx.field)?
        .into_iter()
        .take(expected.rounded)
        .map(|(id, _)| id)
        .collect();
    Ok(SelectionResult {
        cluster_id,
        m,
        p_min,
        p_max: bound.p_max,
        p_max_satisfied: bound.satisfied,
        p_star,
        m_star_real: expected.real,
        m_star: expected.rounded,
        chosen_ids,
    })
}
