//! Flat JSON experiment configuration.
//!
//! Every key is optional; missing keys take the defaults below. Unknown keys
//! are rejected so typos surface as parse errors.
//!
//! | key | default |
//! |---|---|
//! | `experiment` | `"all"` |
//! | `output.dir` | `"out"` |
//! | `field.import` | none (deploy uniformly instead) |
//! | `field.n` | 30 |
//! | `field.width`, `field.height` | 100 m |
//! | `field.sink_x`, `field.sink_y` | 50 m, 175 m |
//! | `field.seed` | 1 |
//! | `model.theta1`, `model.theta2`, `model.alpha` | 70 m, 1, 0.7 |
//! | `model.sigma_s2`, `model.sigma_n2` | 1.0, 0.1 |
//! | `energy.e_elec`, `energy.eps_fs`, `energy.eps_mp` | 50 nJ/bit, 10 pJ/bit/m², 0.0013 pJ/bit/m⁴ |
//! | `energy.e_agg`, `energy.l_bits`, `energy.initial_j` | 5 nJ/bit, 4000 bits, 0.5 J |
//! | `selection.chi_a`, `selection.chi_e`, `selection.p_step` | 0.956, 0.63, 0.01 |
//! | `simulation.max_rounds` | 20000 |
//! | `clustering.tracing_points` | `{}`, map from cluster id to `[x, y]` |

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use corrsense_core::{Bounds, EnergyParams, ModelParams, Point, SelectionPolicy};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Table1,
    Fig1,
    Fig2,
    Fig3,
    Table2,
    Fig4,
    All,
}

impl Experiment {
    pub const SINGLE: [Experiment; 6] = [
        Experiment::Table1,
        Experiment::Fig1,
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Table2,
        Experiment::Fig4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Table1 => "table1",
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Table2 => "table2",
            Experiment::Fig4 => "fig4",
            Experiment::All => "all",
        }
    }

    /// The single experiments this one expands to.
    pub fn expand(self) -> Vec<Experiment> {
        match self {
            Experiment::All => Self::SINGLE.to_vec(),
            e => vec![e],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::SINGLE
            .into_iter()
            .chain([Experiment::All])
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(rename = "output.dir")]
    pub output_dir: PathBuf,

    #[serde(rename = "field.import", skip_serializing_if = "Option::is_none")]
    pub field_import: Option<PathBuf>,
    #[serde(rename = "field.n")]
    pub nodes: usize,
    #[serde(rename = "field.width")]
    pub width: f64,
    #[serde(rename = "field.height")]
    pub height: f64,
    #[serde(rename = "field.sink_x")]
    pub sink_x: f64,
    #[serde(rename = "field.sink_y")]
    pub sink_y: f64,
    #[serde(rename = "field.seed")]
    pub seed: u64,

    #[serde(rename = "model.theta1")]
    pub theta1: f64,
    #[serde(rename = "model.theta2")]
    pub theta2: f64,
    #[serde(rename = "model.alpha")]
    pub alpha: f64,
    #[serde(rename = "model.sigma_s2")]
    pub sigma_s2: f64,
    #[serde(rename = "model.sigma_n2")]
    pub sigma_n2: f64,

    #[serde(rename = "energy.e_elec")]
    pub e_elec: f64,
    #[serde(rename = "energy.eps_fs")]
    pub eps_fs: f64,
    #[serde(rename = "energy.eps_mp")]
    pub eps_mp: f64,
    #[serde(rename = "energy.e_agg")]
    pub e_agg: f64,
    #[serde(rename = "energy.l_bits")]
    pub l_bits: f64,
    #[serde(rename = "energy.initial_j")]
    pub initial_j: f64,

    #[serde(rename = "selection.chi_a")]
    pub chi_a: f64,
    #[serde(rename = "selection.chi_e")]
    pub chi_e: f64,
    #[serde(rename = "selection.p_step")]
    pub p_step: f64,

    #[serde(rename = "simulation.max_rounds")]
    pub max_rounds: u64,

    #[serde(rename = "clustering.tracing_points")]
    pub tracing_points: BTreeMap<usize, [f64; 2]>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let model = ModelParams::default();
        let energy = EnergyParams::default();
        let policy = SelectionPolicy::default();
        ExperimentConfig {
            experiment: Experiment::All,
            output_dir: PathBuf::from("out"),
            field_import: None,
            nodes: 30,
            width: 100.0,
            height: 100.0,
            sink_x: 50.0,
            sink_y: 175.0,
            seed: 1,
            theta1: model.theta1,
            theta2: model.theta2,
            alpha: model.alpha,
            sigma_s2: model.sigma_s2,
            sigma_n2: model.sigma_n2,
            e_elec: energy.e_elec,
            eps_fs: energy.eps_fs,
            eps_mp: energy.eps_mp,
            e_agg: energy.e_agg,
            l_bits: energy.l_bits,
            initial_j: 0.5,
            chi_a: policy.chi_a,
            chi_e: policy.chi_e,
            p_step: policy.p_grid_step,
            max_rounds: 20_000,
            tracing_points: BTreeMap::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let config: Self = serde_json::from_str(text).map_err(|e| AppError::ConfigSyntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<(), AppError> {
        self.bounds()?;
        self.model()?;
        self.energy()?;
        self.policy().validate().map_err(AppError::invalid_config)?;
        if self.field_import.is_none() && self.nodes == 0 {
            return Err(AppError::InvalidConfig("field.n must be positive".into()));
        }
        if !(self.initial_j.is_finite() && self.initial_j > 0.0) {
            return Err(AppError::InvalidConfig(
                "energy.initial_j must be positive".into(),
            ));
        }
        if self
            .tracing_points
            .values()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(AppError::InvalidConfig(
                "tracing points must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn bounds(&self) -> Result<Bounds, AppError> {
        Bounds::new(Point::new(0.0, 0.0), Point::new(self.width, self.height))
            .map_err(AppError::invalid_config)
    }

    pub fn sink(&self) -> Point {
        Point::new(self.sink_x, self.sink_y)
    }

    pub fn model(&self) -> Result<ModelParams, AppError> {
        ModelParams::new(
            self.theta1,
            self.theta2,
            self.alpha,
            self.sigma_s2,
            self.sigma_n2,
        )
        .map_err(AppError::invalid_config)
    }

    pub fn energy(&self) -> Result<EnergyParams, AppError> {
        EnergyParams::new(
            self.e_elec,
            self.eps_fs,
            self.eps_mp,
            self.e_agg,
            self.l_bits,
        )
        .map_err(AppError::invalid_config)
    }

    pub fn policy(&self) -> SelectionPolicy {
        SelectionPolicy {
            chi_a: self.chi_a,
            chi_e: self.chi_e,
            p_grid_step: self.p_step,
        }
    }
}
