//! Non-overlapping clustering driven by the correlation radius.
//!
//! Each pass over the remaining node set picks the node with the most
//! neighbors within `R` (ties: smallest farthest-neighbor distance, then
//! smallest id), makes it a cluster head, and removes it together with its
//! neighbors. Nodes with no remaining neighbors end up as singleton clusters.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{check, Result};
use crate::field::{Field, NodeId};
use crate::geometry::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub ch: NodeId,
    /// Non-CH members, ascending by id.
    pub members: Vec<NodeId>,
    pub tracing_point: Point,
}

impl Cluster {
    /// Total node count including the CH.
    pub fn size(&self) -> usize {
        1 + self.members.len()
    }

    /// CH first, then members.
    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        core::iter::once(self.ch).chain(self.members.iter().copied())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.ch == id || self.members.contains(&id)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub clusters: Vec<Cluster>,
    /// Correlation radius the clustering was formed with, meters.
    pub radius: f64,
}

impl Clustering {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.clusters.iter().map(Cluster::size).sum()
    }
}

/// `G(i)` for every node: the other nodes within distance `r` (inclusive).
pub fn neighborhoods(field: &Field, r: f64) -> Result<BTreeMap<NodeId, BTreeSet<NodeId>>> {
    check(r >= 0.0, "radius", r, ">= 0")?;
    let nodes = field.nodes();
    Ok(nodes
        .iter()
        .map(|a| {
            let g = nodes
                .iter()
                .filter(|b| b.id != a.id && a.position.distance(&b.position) <= r)
                .map(|b| b.id)
                .collect();
            (a.id, g)
        })
        .collect())
}

struct Candidate {
    index: usize,
    neighbors: Vec<usize>,
    farthest: f64,
}

pub fn form_clusters(field: &Field, r: f64) -> Result<Clustering> {
    check(r >= 0.0, "radius", r, ">= 0")?;
    let nodes = field.nodes();
    let mut remaining: Vec<usize> = (0..nodes.len()).collect();
    let mut clusters = Vec::new();

    while !remaining.is_empty() {
        let mut best: Option<Candidate> = None;
        for &i in &remaining {
            let pi = nodes[i].position;
            let mut neighbors = Vec::new();
            let mut farthest = 0.0f64;
            for &j in &remaining {
                if j == i {
                    continue;
                }
                let d = pi.distance(&nodes[j].position);
                if d <= r {
                    neighbors.push(j);
                    farthest = farthest.max(d);
                }
            }
            let cand = Candidate {
                index: i,
                neighbors,
                farthest,
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    let key = |c: &Candidate| (c.neighbors.len(), c.farthest, nodes[c.index].id);
                    let (cn, cf, cid) = key(&cand);
                    let (bn, bf, bid) = key(b);
                    bn.cmp(&cn)
                        .then(cf.total_cmp(&bf))
                        .then(cid.cmp(&bid))
                        .is_lt()
                }
            };
            if better {
                best = Some(cand);
            }
        }
        let head = best.expect("remaining set is non-empty");
        let mut members: Vec<NodeId> = head.neighbors.iter().map(|&j| nodes[j].id).collect();
        members.sort_unstable();
        clusters.push(Cluster {
            ch: nodes[head.index].id,
            members,
            tracing_point: nodes[head.index].position,
        });
        remaining.retain(|&j| j != head.index && !head.neighbors.contains(&j));
    }

    Ok(Clustering {
        clusters,
        radius: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{deploy_uniform, Node};
    use crate::geometry::Bounds;
    use alloc::vec;
    use proptest::prelude::*;

    fn line_field(xs: &[f64]) -> Field {
        let nodes = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Node::new(NodeId(i as u32), Point::new(x, 0.0), 0.5))
            .collect();
        Field::new(
            nodes,
            Bounds::new(Point::new(-1.0, -1.0), Point::new(1000.0, 1.0)).unwrap(),
            0,
            Point::new(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn neighborhoods_respect_inclusive_radius() {
        let g = neighborhoods(&line_field(&[0.0, 10.0]), 25.0).unwrap();
        assert!(g[&NodeId(0)].contains(&NodeId(1)));
        assert!(g[&NodeId(1)].contains(&NodeId(0)));
        let g = neighborhoods(&line_field(&[0.0, 30.0]), 25.0).unwrap();
        assert!(g[&NodeId(0)].is_empty() && g[&NodeId(1)].is_empty());
        let g = neighborhoods(&line_field(&[0.0, 25.0]), 25.0).unwrap();
        assert!(g[&NodeId(0)].contains(&NodeId(1)));
    }

    #[test]
    fn isolated_nodes_become_singletons() {
        let c = form_clusters(&line_field(&[0.0, 50.0, 100.0]), 25.0).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.clusters.iter().all(|k| k.members.is_empty()));
    }

    #[test]
    fn hand_traced_example() {
        // A(0,0) B(10,0) C(20,0) D(100,0), R = 15
        let c = form_clusters(&line_field(&[0.0, 10.0, 20.0, 100.0]), 15.0).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.clusters[0].ch, NodeId(1));
        assert_eq!(c.clusters[0].members, vec![NodeId(0), NodeId(2)]);
        assert_eq!(c.clusters[0].tracing_point, Point::new(10.0, 0.0));
        assert_eq!(c.clusters[1].ch, NodeId(3));
        assert!(c.clusters[1].members.is_empty());
    }

    #[test]
    fn ties_prefer_tighter_then_smaller_id() {
        // only the pair (1, 2) is connected and both ends have d_max = 4
        let c = form_clusters(&line_field(&[0.0, 10.0, 14.0]), 5.0).unwrap();
        assert_eq!(c.clusters[0].ch, NodeId(1));
        assert_eq!(c.clusters[0].members, vec![NodeId(2)]);
        // 0-1 at distance 3, 2-3 at distance 2: equal |G|, node 2 is tighter.
        let c = form_clusters(&line_field(&[0.0, 3.0, 50.0, 52.0]), 5.0).unwrap();
        assert_eq!(c.clusters[0].ch, NodeId(2));
        assert_eq!(c.clusters[1].ch, NodeId(0));
    }

    #[test]
    fn zero_radius_gives_singletons() {
        let c = form_clusters(&line_field(&[0.0, 1.0, 2.0]), 0.0).unwrap();
        assert_eq!(c.len(), 3);
        assert!(form_clusters(&line_field(&[0.0]), -1.0).is_err());
    }

    fn check_partition(field: &Field, c: &Clustering) {
        let mut seen = BTreeSet::new();
        for k in &c.clusters {
            let ch = field.position(k.ch).unwrap();
            assert!(!k.members.contains(&k.ch));
            for id in k.node_ids() {
                assert!(seen.insert(id), "node {id} appears twice");
            }
            for &m in &k.members {
                assert!(field.position(m).unwrap().distance(&ch) <= c.radius);
            }
        }
        assert_eq!(seen.len(), field.len());
        assert_eq!(c.node_count(), field.len());
    }

    proptest! {
        #[test]
        fn clustering_is_a_deterministic_partition(seed in any::<u64>(), n in 1usize..60, r in 0.0f64..60.0) {
            let f = deploy_uniform(n, Bounds::square(100.0).unwrap(), Point::new(50.0, 150.0), seed, 0.5).unwrap();
            let c = form_clusters(&f, r).unwrap();
            check_partition(&f, &c);
            prop_assert_eq!(&c, &form_clusters(&f, r).unwrap());
        }
    }

    #[test]
    fn larger_radius_does_not_add_clusters() {
        for seed in 0..20u64 {
            let f = deploy_uniform(
                40,
                Bounds::square(100.0).unwrap(),
                Point::new(50.0, 150.0),
                seed,
                0.5,
            )
            .unwrap();
            let small = form_clusters(&f, 10.0).unwrap().len();
            let large = form_clusters(&f, 30.0).unwrap().len();
            assert!(large <= small, "seed {seed}: {large} > {small}");
        }
    }
}
