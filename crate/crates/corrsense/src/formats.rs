//! JSON and CSV artifacts.

use std::io::Write;
use std::path::Path;

use corrsense_core::{Bounds, Cluster, Clustering, Field, Node, NodeId, Point};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

/// Formats a float with six significant digits, `%g` style: fixed notation for
/// decimal exponents in `-4..6`, scientific otherwise, trailing zeros dropped.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{x:.*}", (5 - exp) as usize);
        trim_zeros(&fixed).to_string()
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn join_ids(ids: impl IntoIterator<Item = NodeId>) -> String {
    ids.into_iter()
        .map(|id| id.0.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsJson {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeJson {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    pub e0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub seed: u64,
    pub bounds: BoundsJson,
    pub sink: [f64; 2],
    pub nodes: Vec<NodeJson>,
}

impl From<&Field> for FieldJson {
    fn from(f: &Field) -> Self {
        let b = f.bounds();
        FieldJson {
            seed: f.seed(),
            bounds: BoundsJson {
                min: [b.min.x, b.min.y],
                max: [b.max.x, b.max.y],
            },
            sink: [f.sink().x, f.sink().y],
            nodes: f
                .nodes()
                .iter()
                .map(|n| NodeJson {
                    id: n.id.0,
                    x: n.position.x,
                    y: n.position.y,
                    e0: n.initial_energy,
                })
                .collect(),
        }
    }
}

impl FieldJson {
    pub fn into_field(self) -> corrsense_core::Result<Field> {
        let bounds = Bounds::new(
            Point::new(self.bounds.min[0], self.bounds.min[1]),
            Point::new(self.bounds.max[0], self.bounds.max[1]),
        )?;
        let nodes = self
            .nodes
            .into_iter()
            .map(|n| Node::new(NodeId(n.id), Point::new(n.x, n.y), n.e0))
            .collect();
        Field::new(
            nodes,
            bounds,
            self.seed,
            Point::new(self.sink[0], self.sink[1]),
        )
    }
}

pub fn read_field(path: &Path) -> Result<Field, AppError> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let invalid = |message: String| AppError::InvalidFile {
        path: path.to_path_buf(),
        message,
    };
    let json: FieldJson = serde_json::from_str(&text)
        .map_err(|e| invalid(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    json.into_field().map_err(|e| invalid(e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub ch: u32,
    pub members: Vec<u32>,
    pub tracing_point: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusteringJson {
    pub radius: f64,
    pub clusters: Vec<ClusterJson>,
}

impl From<&Clustering> for ClusteringJson {
    fn from(c: &Clustering) -> Self {
        ClusteringJson {
            radius: c.radius,
            clusters: c
                .clusters
                .iter()
                .map(|k| ClusterJson {
                    ch: k.ch.0,
                    members: k.members.iter().map(|m| m.0).collect(),
                    tracing_point: [k.tracing_point.x, k.tracing_point.y],
                })
                .collect(),
        }
    }
}

impl From<ClusteringJson> for Clustering {
    fn from(c: ClusteringJson) -> Self {
        Clustering {
            radius: c.radius,
            clusters: c
                .clusters
                .into_iter()
                .map(|k| Cluster {
                    ch: NodeId(k.ch),
                    members: k.members.into_iter().map(NodeId).collect(),
                    tracing_point: Point::new(k.tracing_point[0], k.tracing_point[1]),
                })
                .collect(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(value).expect("artifacts always serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| AppError::io(path, e))
}

/// A CSV table with a fixed header, written in one go.
pub struct Table {
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<(), AppError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush().map_err(|e| AppError::Csv(e.into()))
    }

    pub fn write(&self, path: &Path) -> Result<(), AppError> {
        let file = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
    }
}

pub const TABLE1_HEADER: &[&str] = &["cluster_id", "ch", "members", "M", "i_m", "d_a"];
pub const ACCURACY_HEADER: &[&str] = &["cluster_id", "M", "K", "d_a", "i_m", "distortion"];
pub const ACCURACY_VS_P_HEADER: &[&str] = &["cluster_id", "M", "p", "expected_active", "accuracy"];
pub const ENERGY_VS_P_HEADER: &[&str] = &["cluster_id", "M", "p", "expected_active", "energy_J"];
pub const SELECTION_HEADER: &[&str] = &[
    "cluster_id",
    "M",
    "p_min",
    "p_max",
    "p_star",
    "m_star",
    "chosen_ids",
];
pub const ROUND_LOG_HEADER: &[&str] = &["scenario", "round", "total_energy_J", "alive_nodes"];
