//! Scenario machinery: weighted expert groups, full-pipeline reruns, and
//! rank-change / edge-overlap reports.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CausalGraph;
use crate::pipeline::{run_study, PipelineResult, RunConfig};
use crate::study::Study;

/// One alternative weighting of the expert groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// group label -> non-negative weight (percentages are fine; weights
    /// are normalized downstream)
    pub group_weights: BTreeMap<String, f64>,
}

#[derive(Debug, Deserialize)]
struct ScenariosFile {
    scenarios: Vec<Scenario>,
}

/// Load a scenarios file: `{"scenarios": [{"name": ..., "group_weights": {...}}]}`.
pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let file: ScenariosFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(file.scenarios)
}

/// Translate group weights into per-expert weights: each expert gets its
/// group's weight divided by the group size.
pub fn expert_weights(study: &Study, scenario: &Scenario) -> Result<Vec<f64>> {
    let mut group_sizes: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &study.experts {
        if let Some(g) = &e.group {
            *group_sizes.entry(g.as_str()).or_insert(0) += 1;
        }
    }
    for group in scenario.group_weights.keys() {
        if !group_sizes.contains_key(group.as_str()) {
            return Err(Error::UnknownGroup {
                scenario: scenario.name.clone(),
                group: group.clone(),
            });
        }
    }
    if scenario.group_weights.values().all(|&w| w == 0.0) {
        return Err(Error::InvalidScenario {
            scenario: scenario.name.clone(),
            reason: "all group weights are zero".into(),
        });
    }
    study
        .experts
        .iter()
        .map(|e| {
            let group = e.group.as_deref().ok_or_else(|| Error::InvalidScenario {
                scenario: scenario.name.clone(),
                reason: format!("expert {:?} has no group label", e.id),
            })?;
            let weight =
                scenario
                    .group_weights
                    .get(group)
                    .ok_or_else(|| Error::MissingGroupWeight {
                        scenario: scenario.name.clone(),
                        group: group.to_string(),
                        expert: e.id.clone(),
                    })?;
            if *weight < 0.0 {
                return Err(Error::InvalidScenario {
                    scenario: scenario.name.clone(),
                    reason: format!("negative weight for group {group:?}"),
                });
            }
            Ok(weight / group_sizes[group] as f64)
        })
        .collect()
}

/// Run the full pipeline under one scenario's weighting.
pub fn run_pipeline(
    study: &Study,
    scenario: &Scenario,
    config: &RunConfig,
) -> Result<PipelineResult> {
    let weights = expert_weights(study, scenario)?;
    run_study(study, Some(&weights), config)
}

/// Per-factor maximum rank change across scenarios, for both rank kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankDelta {
    pub factor_code: String,
    pub base_prominence_rank: usize,
    pub base_influence_rank: usize,
    pub max_prominence_delta: usize,
    pub max_influence_delta: usize,
}

/// Compare base-scenario ranks against each alternate; report the largest
/// absolute change per factor and rank kind.
pub fn rank_delta_table(
    base: &[crate::engine::ProminenceRecord],
    alternates: &[Vec<crate::engine::ProminenceRecord>],
) -> Result<Vec<RankDelta>> {
    for alt in alternates {
        if alt.len() != base.len()
            || !base
                .iter()
                .zip(alt.iter())
                .all(|(a, b)| a.factor_code == b.factor_code)
        {
            return Err(Error::FactorSetMismatch(
                "scenario prominence tables list different factors".into(),
            ));
        }
    }
    Ok(base
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let max_delta = |pick: fn(&crate::engine::ProminenceRecord) -> usize| {
                alternates
                    .iter()
                    .map(|alt| pick(&alt[i]).abs_diff(pick(rec)))
                    .max()
                    .unwrap_or(0)
            };
            RankDelta {
                factor_code: rec.factor_code.clone(),
                base_prominence_rank: rec.prominence_rank,
                base_influence_rank: rec.influence_rank,
                max_prominence_delta: max_delta(|r| r.prominence_rank),
                max_influence_delta: max_delta(|r| r.influence_rank),
            }
        })
        .collect())
}

/// Union of all edges across scenarios with 0/1 presence per scenario.
/// Row order: base-scenario edges first (lexicographic), then the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePresence {
    /// (from code, to code) per row
    pub edges: Vec<(String, String)>,
    /// presence[row][scenario], scenario 0 = base
    pub presence: Vec<Vec<u8>>,
}

pub fn edge_presence_matrix(graphs: &[&CausalGraph]) -> Result<EdgePresence> {
    let Some(first) = graphs.first() else {
        return Ok(EdgePresence {
            edges: vec![],
            presence: vec![],
        });
    };
    for g in graphs {
        if g.nodes != first.nodes {
            return Err(Error::NodeSetMismatch(
                "scenario graphs have different node sets".into(),
            ));
        }
    }
    let edge_set = |g: &CausalGraph| -> BTreeSet<(String, String)> {
        g.edges
            .iter()
            .map(|e| (g.nodes[e.from].clone(), g.nodes[e.to].clone()))
            .collect()
    };
    let sets: Vec<BTreeSet<(String, String)>> = graphs.iter().map(|g| edge_set(g)).collect();
    let base = &sets[0];
    let mut rows: Vec<(String, String)> = base.iter().cloned().collect();
    let mut others: BTreeSet<(String, String)> = BTreeSet::new();
    for s in &sets[1..] {
        for e in s {
            if !base.contains(e) {
                others.insert(e.clone());
            }
        }
    }
    rows.extend(others);
    let presence = rows
        .iter()
        .map(|e| sets.iter().map(|s| u8::from(s.contains(e))).collect())
        .collect();
    Ok(EdgePresence {
        edges: rows,
        presence,
    })
}

/// The assembled sensitivity study: base plus alternates.
#[derive(Debug)]
pub struct SensitivityReport {
    pub scenario_names: Vec<String>,
    pub base: PipelineResult,
    pub alternates: Vec<PipelineResult>,
    pub rank_deltas: Vec<RankDelta>,
    pub edge_presence: EdgePresence,
    /// theta per scenario, base first
    pub thetas: Vec<f64>,
}

/// Run the base pipeline plus every scenario and assemble the report.
pub fn run_sensitivity(
    study: &Study,
    scenarios: &[Scenario],
    config: &RunConfig,
) -> Result<SensitivityReport> {
    let base = run_study(study, None, config)?;
    let mut alternates = Vec::with_capacity(scenarios.len());
    for scenario in scenarios {
        alternates.push(run_pipeline(study, scenario, config)?);
    }
    let alternate_records: Vec<_> = alternates.iter().map(|r| r.records.clone()).collect();
    let rank_deltas = rank_delta_table(&base.records, &alternate_records)?;
    let mut graphs: Vec<&CausalGraph> = vec![&base.graph];
    graphs.extend(alternates.iter().map(|r| &r.graph));
    let edge_presence = edge_presence_matrix(&graphs)?;
    let mut thetas = vec![base.threshold.theta];
    thetas.extend(alternates.iter().map(|r| r.threshold.theta));
    let mut scenario_names = vec!["base".to_string()];
    scenario_names.extend(scenarios.iter().map(|s| s.name.clone()));
    Ok(SensitivityReport {
        scenario_names,
        base,
        alternates,
        rank_deltas,
        edge_presence,
        thetas,
    })
}
