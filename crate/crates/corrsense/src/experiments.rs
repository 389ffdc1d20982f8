//! Experiment driver: builds the deployment once and writes the requested
//! tables, figure data and a JSON summary.

use std::path::{Path, PathBuf};

use corrsense_core::estimation::{accuracy_report, ordered_covariance};
use corrsense_core::selection::{
    accuracy_levels, accuracy_under_p, energy_levels, energy_under_p, SelectionContext,
};
use corrsense_core::{
    accuracy_curve, correlation_radius, deploy_uniform, form_clusters, select_nodes,
    simulate_rounds, Clustering, EnergyParams, Field, ModelParams, NodeId, Point, RoundLog,
    SelectionPolicy, SelectionResult,
};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::AppError;
use crate::formats::{self, fmt_sig6, join_ids, write_json, ClusteringJson, FieldJson, Table};

/// Deployment, clustering and parameters shared by every experiment.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub field: Field,
    pub clustering: Clustering,
    pub params: ModelParams,
    pub energy: EnergyParams,
    pub policy: SelectionPolicy,
    pub radius: f64,
    pub max_rounds: u64,
}

impl Scenario {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self, AppError> {
        config.validate()?;
        let params = config.model()?;
        let energy = config.energy()?;
        let field = match &config.field_import {
            Some(path) => formats::read_field(path)?,
            None => deploy_uniform(
                config.nodes,
                config.bounds()?,
                config.sink(),
                config.seed,
                config.initial_j,
            )
            .map_err(AppError::invalid_config)?,
        };
        let radius = correlation_radius(&params).map_err(AppError::invalid_config)?;
        let mut clustering = form_clusters(&field, radius)?;
        let formed = clustering.len();
        for (&id, &[x, y]) in &config.tracing_points {
            let cluster = clustering.clusters.get_mut(id).ok_or_else(|| {
                AppError::InvalidConfig(format!(
                    "tracing point override for cluster {id}, but only {formed} clusters formed"
                ))
            })?;
            cluster.tracing_point = Point::new(x, y);
        }
        Ok(Scenario {
            field,
            clustering,
            params,
            energy,
            policy: config.policy(),
            radius,
            max_rounds: config.max_rounds,
        })
    }

    fn context(&self) -> SelectionContext<'_> {
        SelectionContext {
            field: &self.field,
            params: &self.params,
            energy: &self.energy,
            radius: self.radius,
            policy: &self.policy,
        }
    }

    pub fn selections(&self) -> Result<Vec<SelectionResult>, AppError> {
        let ctx = self.context();
        self.clustering
            .clusters
            .iter()
            .enumerate()
            .map(|(i, k)| select_nodes(i, k, &ctx, None).map_err(AppError::in_cluster(i)))
            .collect()
    }

    /// Lifetime runs with every node active and with the selected subsets.
    pub fn lifetimes(
        &self,
        selections: &[SelectionResult],
    ) -> Result<(RoundLog, RoundLog), AppError> {
        let everyone: Vec<Vec<NodeId>> = self
            .clustering
            .clusters
            .iter()
            .map(|k| k.node_ids().collect())
            .collect();
        let chosen: Vec<Vec<NodeId>> = selections.iter().map(|s| s.chosen_ids.clone()).collect();
        Ok((
            simulate_rounds(
                &self.field,
                &self.clustering,
                &everyone,
                &self.energy,
                self.max_rounds,
            )?,
            simulate_rounds(
                &self.field,
                &self.clustering,
                &chosen,
                &self.energy,
                self.max_rounds,
            )?,
        ))
    }

    fn probability_grid(&self) -> impl Iterator<Item = f64> {
        let steps = self.policy.grid_steps();
        (0..=steps).map(move |t| t as f64 / steps as f64)
    }

    pub fn table1(&self) -> Result<Table, AppError> {
        let mut t = Table::new(formats::TABLE1_HEADER);
        for (i, k) in self.clustering.clusters.iter().enumerate() {
            let report = accuracy_curve(k, &self.field, &self.params)
                .map_err(AppError::in_cluster(i))?
                .pop()
                .expect("clusters are never empty");
            t.push(vec![
                i.to_string(),
                k.ch.to_string(),
                join_ids(k.members.iter().copied()),
                k.size().to_string(),
                fmt_sig6(report.i_m),
                fmt_sig6(report.d_a),
            ]);
        }
        Ok(t)
    }

    pub fn fig1(&self) -> Result<Table, AppError> {
        let mut t = Table::new(formats::ACCURACY_HEADER);
        for (i, k) in self.clustering.clusters.iter().enumerate() {
            for r in
                accuracy_curve(k, &self.field, &self.params).map_err(AppError::in_cluster(i))?
            {
                t.push(vec![
                    i.to_string(),
                    k.size().to_string(),
                    r.m.to_string(),
                    fmt_sig6(r.d_a),
                    fmt_sig6(r.i_m),
                    fmt_sig6(r.distortion),
                ]);
            }
        }
        Ok(t)
    }

    pub fn fig2(&self) -> Result<Table, AppError> {
        let mut t = Table::new(formats::ACCURACY_VS_P_HEADER);
        for (i, k) in self.clustering.clusters.iter().enumerate() {
            let levels =
                accuracy_levels(k, &self.field, &self.params).map_err(AppError::in_cluster(i))?;
            for p in self.probability_grid() {
                t.push(vec![
                    i.to_string(),
                    k.size().to_string(),
                    fmt_sig6(p),
                    fmt_sig6(1.0 + (k.size() - 1) as f64 * p),
                    fmt_sig6(accuracy_under_p(&levels, p)),
                ]);
            }
        }
        Ok(t)
    }

    pub fn fig3(&self) -> Result<Table, AppError> {
        let mut t = Table::new(formats::ENERGY_VS_P_HEADER);
        for (i, k) in self.clustering.clusters.iter().enumerate() {
            let levels = energy_levels(k, &self.field, self.radius, &self.energy)?;
            for p in self.probability_grid() {
                t.push(vec![
                    i.to_string(),
                    k.size().to_string(),
                    fmt_sig6(p),
                    fmt_sig6(1.0 + (k.size() - 1) as f64 * p),
                    fmt_sig6(energy_under_p(&levels, p)),
                ]);
            }
        }
        Ok(t)
    }

    pub fn table2(&self, selections: &[SelectionResult]) -> Table {
        let mut t = Table::new(formats::SELECTION_HEADER);
        for s in selections {
            t.push(vec![
                s.cluster_id.to_string(),
                s.m.to_string(),
                fmt_sig6(s.p_min),
                fmt_sig6(s.p_max),
                fmt_sig6(s.p_star),
                s.m_star.to_string(),
                join_ids(s.chosen_ids.iter().copied()),
            ]);
        }
        t
    }

    pub fn fig4(&self, all_active: &RoundLog, selected: &RoundLog) -> Table {
        let mut t = Table::new(formats::ROUND_LOG_HEADER);
        for (name, log) in [("all_active", all_active), ("selected", selected)] {
            for r in &log.records {
                t.push(vec![
                    name.to_string(),
                    r.round.to_string(),
                    fmt_sig6(r.total_energy),
                    r.alive_nodes.to_string(),
                ]);
            }
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub cluster_id: usize,
    pub ch: u32,
    #[serde(rename = "M")]
    pub m: usize,
    pub d_a: f64,
    pub i_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectionSummary {
    pub cluster_id: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub p_max_satisfied: bool,
    pub p_star: f64,
    pub m_star: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LifetimeSummary {
    pub rounds_simulated: u64,
    /// `None` when some node still had energy after the last round.
    pub depletion_round: Option<u64>,
    pub first_death_round: Option<u64>,
    pub final_energy_j: f64,
}

impl From<&RoundLog> for LifetimeSummary {
    fn from(log: &RoundLog) -> Self {
        LifetimeSummary {
            rounds_simulated: log.last().round,
            depletion_round: log.depletion_round,
            first_death_round: log.first_death_round,
            final_energy_j: log.last().total_energy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub experiments: Vec<Experiment>,
    pub seed: u64,
    pub radius: f64,
    pub nodes_deployed: usize,
    pub cluster_count: usize,
    pub clusters: Vec<ClusterSummary>,
    pub total_selected: usize,
    pub selections: Vec<SelectionSummary>,
    pub lifetime_all_active: LifetimeSummary,
    pub lifetime_selected: LifetimeSummary,
    pub artifacts: Vec<PathBuf>,
}

/// Runs `config.experiment` and writes its artifacts into `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path) -> Result<Summary, AppError> {
    let scenario = Scenario::prepare(config)?;
    std::fs::create_dir_all(out).map_err(|e| AppError::io(out, e))?;

    let clusters = scenario
        .clustering
        .clusters
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let r = ordered_covariance(k, &scenario.field, &scenario.params)
                .and_then(|cov| accuracy_report(&cov))
                .map_err(AppError::in_cluster(i))?;
            Ok(ClusterSummary {
                cluster_id: i,
                ch: k.ch.0,
                m: k.size(),
                d_a: r.d_a,
                i_m: r.i_m,
            })
        })
        .collect::<Result<Vec<_>, AppError>>()?;
    let selections = scenario.selections()?;
    let (all_active, selected) = scenario.lifetimes(&selections)?;

    let experiments = config.experiment.expand();
    let mut artifacts = Vec::new();
    for &e in &experiments {
        let table = match e {
            Experiment::Table1 => scenario.table1()?,
            Experiment::Fig1 => scenario.fig1()?,
            Experiment::Fig2 => scenario.fig2()?,
            Experiment::Fig3 => scenario.fig3()?,
            Experiment::Table2 => scenario.table2(&selections),
            Experiment::Fig4 => scenario.fig4(&all_active, &selected),
            Experiment::All => unreachable!("expanded above"),
        };
        let name = PathBuf::from(format!("{e}.csv"));
        table.write(&out.join(&name))?;
        artifacts.push(name);
    }
    write_json(&out.join("field.json"), &FieldJson::from(&scenario.field))?;
    write_json(
        &out.join("clustering.json"),
        &ClusteringJson::from(&scenario.clustering),
    )?;
    artifacts.extend(["field.json", "clustering.json", "summary.json"].map(PathBuf::from));

    let summary = Summary {
        experiments,
        seed: scenario.field.seed(),
        radius: scenario.radius,
        nodes_deployed: scenario.field.len(),
        cluster_count: scenario.clustering.len(),
        clusters,
        total_selected: selections.iter().map(|s| s.m_star).sum(),
        selections: selections
            .iter()
            .map(|s| SelectionSummary {
                cluster_id: s.cluster_id,
                p_min: s.p_min,
                p_max: s.p_max,
                p_max_satisfied: s.p_max_satisfied,
                p_star: s.p_star,
                m_star: s.m_star,
            })
            .collect(),
        lifetime_all_active: (&all_active).into(),
        lifetime_selected: (&selected).into(),
        artifacts,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}
