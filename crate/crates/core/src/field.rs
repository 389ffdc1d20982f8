//! Sensor deployment, per-cluster joint covariance, and synthetic observations.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::correlation::{corr_pe_unchecked, ModelParams};
use crate::error::{check, Error, Result};
use crate::geometry::{Bounds, Point};
use crate::linalg::{Cholesky, SymMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub position: Point,
    /// Joules at deployment.
    pub initial_energy: f64,
    /// Joules left; never above `initial_energy`.
    pub residual_energy: f64,
}

impl Node {
    pub fn new(id: NodeId, position: Point, initial_energy: f64) -> Self {
        Node {
            id,
            position,
            initial_energy,
            residual_energy: initial_energy,
        }
    }
}

/// A deployed sensor field together with its sink (base station).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    nodes: Vec<Node>,
    bounds: Bounds,
    seed: u64,
    sink: Point,
}

impl Field {
    /// Validates ids, energies and positions against the bounds.
    pub fn new(nodes: Vec<Node>, bounds: Bounds, seed: u64, sink: Point) -> Result<Self> {
        check(!nodes.is_empty(), "node count", 0.0, ">= 1")?;
        let mut ids: Vec<NodeId> = nodes.iter().map(|n| n.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::ContractViolation("duplicate node id"));
        }
        for n in &nodes {
            if !bounds.contains(&n.position) {
                return Err(Error::ContractViolation("node outside field bounds"));
            }
            check(
                n.initial_energy > 0.0,
                "initial_energy",
                n.initial_energy,
                "> 0",
            )?;
            check(
                n.residual_energy >= 0.0 && n.residual_energy <= n.initial_energy,
                "residual_energy",
                n.residual_energy,
                "in [0, initial_energy]",
            )?;
        }
        Ok(Field {
            nodes,
            bounds,
            seed,
            sink,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sink(&self) -> Point {
        self.sink
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn position(&self, id: NodeId) -> Option<Point> {
        self.node(id).map(|n| n.position)
    }
}

/// Places `n` nodes i.i.d. uniformly inside `bounds`, ids `0..n`.
pub fn deploy_uniform(
    n: usize,
    bounds: Bounds,
    sink: Point,
    seed: u64,
    initial_energy: f64,
) -> Result<Field> {
    check(n >= 1, "node count", n as f64, ">= 1")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .map(|i| {
            let x = rng.random_range(bounds.min.x..=bounds.max.x);
            let y = rng.random_range(bounds.min.y..=bounds.max.y);
            Node::new(NodeId(i as u32), Point::new(x, y), initial_energy)
        })
        .collect();
    Field::new(nodes, bounds, seed, sink)
}

/// Correlation structure of one cluster relative to its tracing point.
///
/// The joint covariance of `(S, s_1, ..., s_M)` is `σ_S² [[1, rᵀ], [r, B]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterCovariance {
    /// Correlation of each member's signal with the tracing point.
    pub r: Vec<f64>,
    /// Pairwise member correlations, unit diagonal.
    pub b: SymMatrix,
    pub sigma_s2: f64,
    pub sigma_n2: f64,
}

impl ClusterCovariance {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn noise_ratio(&self) -> f64 {
        self.sigma_n2 / self.sigma_s2
    }

    /// The full `(1 + M) x (1 + M)` covariance `C_z`.
    pub fn joint(&self) -> SymMatrix {
        SymMatrix::from_lower_fn(self.len() + 1, |i, j| {
            let rho = match (i, j) {
                (0, 0) => 1.0,
                (i, 0) => self.r[i - 1],
                (i, j) => self.b.get(i - 1, j - 1),
            };
            self.sigma_s2 * rho
        })
    }

    /// Covariance restricted to the members at `idx`, in that order.
    pub fn subset(&self, idx: &[usize]) -> ClusterCovariance {
        ClusterCovariance {
            r: idx.iter().map(|&i| self.r[i]).collect(),
            b: self.b.select(idx),
            sigma_s2: self.sigma_s2,
            sigma_n2: self.sigma_n2,
        }
    }
}

pub fn build_covariance(
    positions: &[Point],
    tracing_point: Point,
    params: &ModelParams,
) -> Result<ClusterCovariance> {
    params.validate()?;
    if positions.is_empty() {
        return Err(Error::ContractViolation(
            "covariance needs at least one node",
        ));
    }
    let r = positions
        .iter()
        .map(|p| corr_pe_unchecked(p.distance(&tracing_point), params))
        .collect();
    let b = SymMatrix::from_lower_fn(positions.len(), |i, j| {
        if i == j {
            1.0
        } else {
            corr_pe_unchecked(positions[i].distance(&positions[j]), params)
        }
    });
    Ok(ClusterCovariance {
        r,
        b,
        sigma_s2: params.sigma_s2,
        sigma_n2: params.sigma_n2,
    })
}

/// Noisy member readings together with the latent tracing-point value, one row per round.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationBatch {
    members: usize,
    /// Row-major `rounds x members`.
    x: Vec<f64>,
    s_true: Vec<f64>,
}

impl ObservationBatch {
    pub fn rounds(&self) -> usize {
        self.s_true.len()
    }

    pub fn members(&self) -> usize {
        self.members
    }

    pub fn observation(&self, round: usize) -> &[f64] {
        &self.x[round * self.members..(round + 1) * self.members]
    }

    pub fn truth(&self, round: usize) -> f64 {
        self.s_true[round]
    }

    pub fn truths(&self) -> &[f64] {
        &self.s_true
    }
}

const JITTER_START: f64 = 1e-12;
const JITTER_MAX: f64 = 1e-6;

/// Draws `(S, s_1..s_M) ~ N(0, C_z)` each round and observes `x_i = s_i + n_i`.
pub fn synthesize_observations(
    cov: &ClusterCovariance,
    rounds: usize,
    seed: u64,
) -> Result<ObservationBatch> {
    check(rounds >= 1, "rounds", rounds as f64, ">= 1")?;
    let (chol, _) = Cholesky::factor_with_jitter(
        &cov.joint(),
        JITTER_START * cov.sigma_s2,
        JITTER_MAX * cov.sigma_s2,
    )?;
    let m = cov.len();
    let noise_sd = libm::sqrt(cov.sigma_n2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut white = alloc::vec![0.0; m + 1];
    let mut x = Vec::with_capacity(rounds * m);
    let mut s_true = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        for w in white.iter_mut() {
            *w = StandardNormal.sample(&mut rng);
        }
        let z = chol.lower_mul(&white);
        s_true.push(z[0]);
        for s in &z[1..] {
            let n: f64 = StandardNormal.sample(&mut rng);
            x.push(s + noise_sd * n);
        }
    }
    Ok(ObservationBatch {
        members: m,
        x,
        s_true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(q: f64) -> ModelParams {
        ModelParams::new(70.0, 1.0, 0.7, 1.0, q).unwrap()
    }

    #[test]
    fn deployment_is_deterministic_and_in_bounds() {
        let b = Bounds::square(100.0).unwrap();
        let f1 = deploy_uniform(30, b, Point::new(50.0, 150.0), 7, 0.5).unwrap();
        let f2 = deploy_uniform(30, b, Point::new(50.0, 150.0), 7, 0.5).unwrap();
        assert_eq!(f1, f2);
        assert_eq!(f1.len(), 30);
        assert!(f1.nodes().iter().all(|n| b.contains(&n.position)));
        let single = deploy_uniform(1, b, Point::new(0.0, 0.0), 1, 0.5).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn deployment_rejects_bad_input() {
        let b = Bounds::square(100.0).unwrap();
        assert!(deploy_uniform(0, b, Point::default(), 1, 0.5).is_err());
        assert!(Bounds::square(0.0).is_err());
    }

    #[test]
    fn field_rejects_duplicate_ids() {
        let b = Bounds::square(10.0).unwrap();
        let nodes = vec![
            Node::new(NodeId(1), Point::new(1.0, 1.0), 0.5),
            Node::new(NodeId(1), Point::new(2.0, 1.0), 0.5),
        ];
        assert!(Field::new(nodes, b, 0, Point::default()).is_err());
    }

    #[test]
    fn covariance_of_node_at_tracing_point() {
        let c =
            build_covariance(&[Point::new(3.0, 4.0)], Point::new(3.0, 4.0), &params(0.1)).unwrap();
        assert_eq!(c.r, vec![1.0]);
        assert_eq!(c.b, SymMatrix::identity(1));
    }

    #[test]
    fn covariance_two_nodes_one_length_scale_apart() {
        let c = build_covariance(
            &[Point::new(0.0, 0.0), Point::new(70.0, 0.0)],
            Point::new(0.0, 0.0),
            &params(0.1),
        )
        .unwrap();
        assert_abs_diff_eq!(c.b.get(0, 1), 0.367_879_441_171_442_3, epsilon = 1e-12);
        assert_eq!(c.b.get(0, 1), c.b.get(1, 0));
    }

    #[test]
    fn noiseless_colocated_node_observes_truth() {
        let c =
            build_covariance(&[Point::new(5.0, 5.0)], Point::new(5.0, 5.0), &params(0.0)).unwrap();
        let batch = synthesize_observations(&c, 200, 3).unwrap();
        for t in 0..batch.rounds() {
            // jitter can perturb the factor by ~1e-6 relative at most
            assert_abs_diff_eq!(batch.observation(t)[0], batch.truth(t), epsilon = 1e-5);
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let pos = [
            Point::new(0.0, 0.0),
            Point::new(10.0, 5.0),
            Point::new(3.0, 12.0),
        ];
        let c = build_covariance(&pos, Point::new(1.0, 1.0), &params(0.1)).unwrap();
        assert_eq!(
            synthesize_observations(&c, 50, 9).unwrap(),
            synthesize_observations(&c, 50, 9).unwrap()
        );
        assert!(synthesize_observations(&c, 0, 9).is_err());
    }

    #[test]
    fn duplicate_positions_are_absorbed_by_jitter() {
        let pos = [Point::new(2.0, 2.0), Point::new(2.0, 2.0)];
        let c = build_covariance(&pos, Point::new(0.0, 0.0), &params(0.1)).unwrap();
        assert!(synthesize_observations(&c, 10, 1).is_ok());
    }

    #[test]
    fn empirical_covariance_matches_model() {
        let pos = [
            Point::new(0.0, 0.0),
            Point::new(12.0, 3.0),
            Point::new(-5.0, 9.0),
            Point::new(7.0, -8.0),
        ];
        let c = build_covariance(&pos, Point::new(1.0, 1.0), &params(0.1)).unwrap();
        let rounds = 100_000;
        let batch = synthesize_observations(&c, rounds, 2024).unwrap();
        let m = pos.len();
        let mut emp = vec![0.0; m * m];
        let mut mean = vec![0.0; m];
        for t in 0..rounds {
            let x = batch.observation(t);
            for i in 0..m {
                mean[i] += x[i];
                for j in 0..m {
                    emp[i * m + j] += x[i] * x[j];
                }
            }
        }
        let target = c.b.with_diagonal_shift(c.noise_ratio());
        let (mut diff, mut norm) = (0.0, 0.0);
        for i in 0..m {
            let sd = libm::sqrt(target.get(i, i));
            assert!((mean[i] / rounds as f64).abs() < 4.0 * sd / libm::sqrt(rounds as f64));
            for j in 0..m {
                let e = emp[i * m + j] / rounds as f64;
                diff += (e - target.get(i, j)).powi(2);
                norm += target.get(i, j).powi(2);
            }
        }
        assert!(libm::sqrt(diff / norm) < 0.05);
    }

    fn positions() -> impl Strategy<Value = Vec<Point>> {
        proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..12)
            .prop_map(|v| v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
    }

    proptest! {
        #[test]
        fn joint_covariance_is_psd(pos in positions(), tx in 0.0f64..100.0, ty in 0.0f64..100.0, theta2 in 0.1f64..=2.0) {
            let p = ModelParams::new(70.0, theta2, 0.7, 2.0, 0.1).unwrap();
            let c = build_covariance(&pos, Point::new(tx, ty), &p).unwrap();
            let joint = c.joint();
            let n = joint.dim();
            let m = nalgebra::DMatrix::from_row_slice(n, n, joint.as_slice());
            let min_eig = m.symmetric_eigen().eigenvalues.min();
            prop_assert!(min_eig >= -1e-8 * p.sigma_s2, "min eigenvalue {}", min_eig);
        }

        #[test]
        fn covariance_is_permutation_equivariant(pos in positions(), seed in any::<u64>()) {
            let mut perm: Vec<usize> = (0..pos.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..perm.len()).rev() {
                perm.swap(i, rand::Rng::random_range(&mut rng, 0..=i));
            }
            let tp = Point::new(50.0, 50.0);
            let c = build_covariance(&pos, tp, &params(0.1)).unwrap();
            let permuted: Vec<Point> = perm.iter().map(|&i| pos[i]).collect();
            let cp = build_covariance(&permuted, tp, &params(0.1)).unwrap();
            prop_assert_eq!(cp, c.subset(&perm));
        }

        #[test]
        fn b_is_symmetric_with_unit_diagonal(pos in positions()) {
            let c = build_covariance(&pos, Point::new(0.0, 0.0), &params(0.1)).unwrap();
            for i in 0..c.len() {
                prop_assert_eq!(c.b.get(i, i), 1.0);
                prop_assert!(c.r[i] > 0.0 && c.r[i] <= 1.0);
                for j in 0..c.len() {
                    prop_assert_eq!(c.b.get(i, j).to_bits(), c.b.get(j, i).to_bits());
                }
            }
        }
    }
}
