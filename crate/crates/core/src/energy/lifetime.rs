//! Round-based network lifetime simulation.
//!
//! Every round each alive active member sends one packet to its CH and each
//! alive CH receives, aggregates and forwards to the sink. Sleeping nodes
//! spend nothing. A node that cannot cover its round cost drains to zero and
//! is dead from then on.

use alloc::vec;
use alloc::vec::Vec;

use super::{e_ch, e_non_ch_actual, EnergyParams};
use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::field::{Field, NodeId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    /// Residual energy summed over every deployed node, J.
    pub total_energy: f64,
    /// Nodes with non-zero residual energy.
    pub alive_nodes: usize,
    /// Energy spent during this round, J.
    pub spent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundLog {
    /// Round 0 is the initial state.
    pub records: Vec<RoundRecord>,
    /// Residual energy of every node after the last simulated round.
    pub residual: Vec<(NodeId, f64)>,
    pub first_death_round: Option<u64>,
    /// First round after which no deployed node has energy left.
    pub depletion_round: Option<u64>,
}

impl RoundLog {
    pub fn last(&self) -> &RoundRecord {
        self.records.last().expect("log always holds round 0")
    }
}

struct Participant {
    node: usize,
    cost_per_packet: f64,
}

struct ActiveCluster {
    head: usize,
    sink_distance: f64,
    members: Vec<Participant>,
}

fn spend(energy: &mut f64, cost: f64) -> f64 {
    if *energy > cost {
        *energy -= cost;
        cost
    } else {
        let drained = *energy;
        *energy = 0.0;
        drained
    }
}

/// Runs up to `max_rounds` rounds with `active_sets[c]` switched on in
/// cluster `c`. The run stops early once no active node is left alive, since
/// nothing can change after that.
pub fn simulate_rounds(
    field: &Field,
    clustering: &Clustering,
    active_sets: &[Vec<NodeId>],
    p: &EnergyParams,
    max_rounds: u64,
) -> Result<RoundLog> {
    if active_sets.len() != clustering.len() {
        return Err(Error::DimensionMismatch {
            expected: clustering.len(),
            found: active_sets.len(),
        });
    }
    let nodes = field.nodes();
    let index_of = |id: NodeId| {
        nodes
            .iter()
            .position(|n| n.id == id)
            .ok_or(Error::ContractViolation("active node missing from field"))
    };

    let mut plan = Vec::with_capacity(clustering.len());
    for (cluster, active) in clustering.clusters.iter().zip(active_sets) {
        if !active.contains(&cluster.ch) {
            return Err(Error::ContractViolation("CH missing from its active set"));
        }
        let head = index_of(cluster.ch)?;
        let head_pos = nodes[head].position;
        let mut members = Vec::new();
        for &id in active.iter().filter(|&&id| id != cluster.ch) {
            if !cluster.members.contains(&id) {
                return Err(Error::ContractViolation("active node outside its cluster"));
            }
            let node = index_of(id)?;
            members.push(Participant {
                node,
                cost_per_packet: e_non_ch_actual(nodes[node].position.distance(&head_pos), p),
            });
        }
        plan.push(ActiveCluster {
            head,
            sink_distance: head_pos.distance(&field.sink()),
            members,
        });
    }

    let mut energy: Vec<f64> = nodes.iter().map(|n| n.residual_energy).collect();
    let snapshot = |round, energy: &[f64], spent| RoundRecord {
        round,
        total_energy: energy.iter().sum(),
        alive_nodes: energy.iter().filter(|&&e| e > 0.0).count(),
        spent,
    };
    let mut records = vec![snapshot(0, &energy, 0.0)];
    let mut first_death_round = None;
    let mut depletion_round = None;
    let any_active_alive = |energy: &[f64]| {
        plan.iter()
            .any(|c| energy[c.head] > 0.0 || c.members.iter().any(|m| energy[m.node] > 0.0))
    };

    for round in 1..=max_rounds {
        if !any_active_alive(&energy) {
            break;
        }
        let alive_before = energy.iter().filter(|&&e| e > 0.0).count();
        let mut spent = 0.0;
        for c in &plan {
            let mut senders = 0usize;
            for m in &c.members {
                if energy[m.node] > 0.0 {
                    spent += spend(&mut energy[m.node], m.cost_per_packet);
                    senders += 1;
                }
            }
            if energy[c.head] > 0.0 {
                let cost = e_ch(senders + 1, c.sink_distance, p);
                spent += spend(&mut energy[c.head], cost);
            }
        }
        let rec = snapshot(round, &energy, spent);
        if first_death_round.is_none() && rec.alive_nodes < alive_before {
            first_death_round = Some(round);
        }
        if depletion_round.is_none() && rec.alive_nodes == 0 {
            depletion_round = Some(round);
        }
        records.push(rec);
    }

    Ok(RoundLog {
        records,
        residual: nodes.iter().map(|n| n.id).zip(energy).collect(),
        first_death_round,
        depletion_round,
    })
}
