//! End-to-end composition: expert matrices to prominence table and causal graph.

use serde::{Deserialize, Serialize};

use crate::defuzz::{defuzzify, CfcsVariant, CrispMatrix};
use crate::engine::{
    normalize_direct_matrix, prominence_table, row_column_sums, total_relation_matrix,
    ProminenceRecord,
};
use crate::error::Result;
use crate::graph::{
    compute_threshold, enumerate_loops, extract_edges, CausalGraph, ThresholdPolicy,
    ThresholdPolicyKind, DEFAULT_LOOP_CAP,
};
use crate::grey::weighted_average_grey;
use crate::study::Study;

/// Knobs for one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub threshold: ThresholdPolicyKind,
    pub cfcs: CfcsVariant,
    pub include_diagonal_in_row_stats: bool,
    pub precision: u8,
    pub loop_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            threshold: ThresholdPolicyKind::MeanPlusSigma,
            cfcs: CfcsVariant::PaperLiteral,
            include_diagonal_in_row_stats: true,
            precision: 4,
            loop_cap: DEFAULT_LOOP_CAP,
        }
    }
}

/// Everything one run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub codes: Vec<String>,
    /// Crisp matrix Z after defuzzification.
    pub crisp: CrispMatrix,
    /// Normalized direct matrix X.
    pub normalized: CrispMatrix,
    /// Total-relation matrix M.
    pub total_relation: CrispMatrix,
    pub records: Vec<ProminenceRecord>,
    pub threshold: ThresholdPolicy,
    pub graph: CausalGraph,
}

/// Run the full pipeline on a study with the given per-expert weights
/// (uniform when `None`).
pub fn run_study(
    study: &Study,
    expert_weights: Option<&[f64]>,
    config: &RunConfig,
) -> Result<PipelineResult> {
    let scale = study.effective_scale()?;
    let matrices = study.grey_matrices(&scale)?;
    let uniform = vec![1.0; matrices.len()];
    let weights = expert_weights.unwrap_or(&uniform);
    let average = weighted_average_grey(&matrices, weights)?;
    let crisp = defuzzify(&average, config.cfcs, config.include_diagonal_in_row_stats)?;
    finish_from_crisp(crisp, study.barrier_codes(), config)
}

/// Run the downstream stages given an already-crisp matrix Z.
pub fn finish_from_crisp(
    crisp: CrispMatrix,
    codes: Vec<String>,
    config: &RunConfig,
) -> Result<PipelineResult> {
    let normalized = normalize_direct_matrix(&crisp)?;
    let total_relation = total_relation_matrix(&normalized)?;
    let (r, c) = row_column_sums(&total_relation);
    let records = prominence_table(&r, &c, &codes)?;
    let threshold = compute_threshold(&total_relation, config.threshold)?;
    let mut graph = extract_edges(&total_relation, threshold.theta, &codes);
    graph.loops = enumerate_loops(&graph, config.loop_cap)?;
    Ok(PipelineResult {
        codes,
        crisp,
        normalized,
        total_relation,
        records,
        threshold,
        graph,
    })
}
