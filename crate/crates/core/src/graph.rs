//! Threshold selection, influence-edge extraction, elementary feedback-loop
//! enumeration, and DOT export for the causal loop diagram.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::defuzz::CrispMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_LOOP_CAP: usize = 10_000;

/// How the edge-selection threshold is derived from the total-relation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdPolicyKind {
    Mean,
    #[default]
    MeanPlusSigma,
    MeanPlus1_5Sigma,
    MeanPlus2Sigma,
    Fixed(f64),
}

impl ThresholdPolicyKind {
    fn sigma_multiplier(&self) -> Option<f64> {
        match self {
            ThresholdPolicyKind::Mean => Some(0.0),
            ThresholdPolicyKind::MeanPlusSigma => Some(1.0),
            ThresholdPolicyKind::MeanPlus1_5Sigma => Some(1.5),
            ThresholdPolicyKind::MeanPlus2Sigma => Some(2.0),
            ThresholdPolicyKind::Fixed(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            ThresholdPolicyKind::Mean => "mean".into(),
            ThresholdPolicyKind::MeanPlusSigma => "mean+sigma".into(),
            ThresholdPolicyKind::MeanPlus1_5Sigma => "mean+1.5sigma".into(),
            ThresholdPolicyKind::MeanPlus2Sigma => "mean+2sigma".into(),
            ThresholdPolicyKind::Fixed(v) => format!("fixed:{v}"),
        }
    }
}

/// A resolved threshold: the policy plus the statistics it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    pub kind: ThresholdPolicyKind,
    pub mu: f64,
    pub sigma: f64,
    pub theta: f64,
}

/// Mean and population standard deviation of the off-diagonal entries,
/// then theta per policy.
pub fn compute_threshold(m: &CrispMatrix, kind: ThresholdPolicyKind) -> Result<ThresholdPolicy> {
    let n = m.n();
    if n < 2 {
        return Err(Error::TooFewFactors);
    }
    let mut values = Vec::with_capacity(n * (n - 1));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values.push(m.get(i, j));
            }
        }
    }
    let count = values.len() as f64;
    let mu = values.iter().sum::<f64>() / count;
    let variance = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / count;
    let sigma = variance.sqrt();
    let theta = match kind.sigma_multiplier() {
        Some(k) => mu + k * sigma,
        None => match kind {
            ThresholdPolicyKind::Fixed(v) => {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidFixedThreshold(v));
                }
                v
            }
            _ => unreachable!(),
        },
    };
    Ok(ThresholdPolicy {
        kind,
        mu,
        sigma,
        theta,
    })
}

/// A directed above-threshold influence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Threshold-filtered influence graph plus its elementary feedback loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    /// Elementary cycles as node-index sequences, canonically rotated to
    /// start at their lexicographically smallest node code.
    pub loops: Vec<Vec<usize>>,
}

impl CausalGraph {
    pub fn from_code_edges(nodes: Vec<String>, edges: &[(&str, &str, f64)]) -> Result<Self> {
        let index = |code: &str| -> Result<usize> {
            nodes
                .iter()
                .position(|n| n == code)
                .ok_or_else(|| Error::NodeSetMismatch(format!("unknown node {code:?}")))
        };
        let edges = edges
            .iter()
            .map(|(from, to, weight)| {
                Ok(Edge {
                    from: index(from)?,
                    to: index(to)?,
                    weight: *weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CausalGraph {
            nodes,
            edges,
            loops: Vec::new(),
        })
    }

    pub fn loop_codes(&self) -> Vec<Vec<&str>> {
        self.loops
            .iter()
            .map(|cycle| cycle.iter().map(|&i| self.nodes[i].as_str()).collect())
            .collect()
    }
}

/// Keep every off-diagonal influence with m_ij >= theta (boundary inclusive).
pub fn extract_edges(m: &CrispMatrix, theta: f64, codes: &[String]) -> CausalGraph {
    let n = m.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && m.get(i, j) >= theta {
                edges.push(Edge {
                    from: i,
                    to: j,
                    weight: m.get(i, j),
                });
            }
        }
    }
    CausalGraph {
        nodes: codes.to_vec(),
        edges,
        loops: Vec::new(),
    }
}

/// Enumerate all elementary (simple directed) cycles, Johnson-style.
///
/// Each cycle is rotated to start at its lexicographically smallest node
/// code; the result is sorted by length, then by the code sequence.
/// Enumeration aborts with an error once `cap` cycles are found.
pub fn enumerate_loops(graph: &CausalGraph, cap: usize) -> Result<Vec<Vec<usize>>> {
    let n = graph.nodes.len();
    let mut adjacency = vec![Vec::new(); n];
    for e in &graph.edges {
        if e.from != e.to {
            adjacency[e.from].push(e.to);
        }
    }
    for targets in &mut adjacency {
        targets.sort_unstable();
        targets.dedup();
    }

    let mut cycles: Vec<Vec<usize>> = Vec::new();
    // Johnson's scheme: circuits rooted at s over the subgraph of nodes >= s
    for start in 0..n {
        let mut blocked = vec![false; n];
        let mut block_lists: Vec<HashSet<usize>> = vec![HashSet::new(); n];
        let mut stack = Vec::new();
        circuit(
            start,
            start,
            &adjacency,
            &mut blocked,
            &mut block_lists,
            &mut stack,
            &mut cycles,
            cap,
        )?;
    }

    for cycle in &mut cycles {
        canonical_rotation(cycle, &graph.nodes);
    }
    cycles.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let a_codes: Vec<&str> = a.iter().map(|&i| graph.nodes[i].as_str()).collect();
            let b_codes: Vec<&str> = b.iter().map(|&i| graph.nodes[i].as_str()).collect();
            a_codes.cmp(&b_codes)
        })
    });
    Ok(cycles)
}

#[allow(clippy::too_many_arguments)]
fn circuit(
    v: usize,
    start: usize,
    adjacency: &[Vec<usize>],
    blocked: &mut [bool],
    block_lists: &mut [HashSet<usize>],
    stack: &mut Vec<usize>,
    cycles: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<bool> {
    let mut found = false;
    stack.push(v);
    blocked[v] = true;
    for &w in &adjacency[v] {
        if w < start {
            continue;
        }
        if w == start {
            if cycles.len() >= cap {
                return Err(Error::LoopOverflow { cap });
            }
            cycles.push(stack.clone());
            found = true;
        } else if !blocked[w]
            && circuit(w, start, adjacency, blocked, block_lists, stack, cycles, cap)?
        {
            found = true;
        }
    }
    if found {
        unblock(v, blocked, block_lists);
    } else {
        for &w in &adjacency[v] {
            if w >= start {
                block_lists[w].insert(v);
            }
        }
    }
    stack.pop();
    Ok(found)
}

fn unblock(v: usize, blocked: &mut [bool], block_lists: &mut [HashSet<usize>]) {
    blocked[v] = false;
    let waiting: Vec<usize> = block_lists[v].drain().collect();
    for w in waiting {
        if blocked[w] {
            unblock(w, blocked, block_lists);
        }
    }
}

fn canonical_rotation(cycle: &mut [usize], codes: &[String]) {
    let pivot = cycle
        .iter()
        .enumerate()
        .min_by(|a, b| codes[*a.1].cmp(&codes[*b.1]))
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(pivot);
}

/// Render the graph as a Graphviz DOT digraph: sorted node lines, sorted
/// edge lines, edge labels at 4 decimals. LF endings, deterministic.
pub fn export_cld(graph: &CausalGraph) -> String {
    let mut out = String::from("digraph cld {\n");
    let mut nodes: Vec<&str> = graph.nodes.iter().map(String::as_str).collect();
    nodes.sort_unstable();
    for node in nodes {
        out.push_str(&format!("    \"{node}\";\n"));
    }
    let mut edges: Vec<(&str, &str, f64)> = graph
        .edges
        .iter()
        .map(|e| (graph.nodes[e.from].as_str(), graph.nodes[e.to].as_str(), e.weight))
        .collect();
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for (from, to, weight) in edges {
        out.push_str(&format!(
            "    \"{from}\" -> \"{to}\" [label=\"{weight:.4}\"];\n"
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: usize, entries: &[f64]) -> CrispMatrix {
        CrispMatrix::from_entries(n, entries.to_vec()).unwrap()
    }

    #[test]
    fn threshold_mean_plus_sigma() {
        let t = compute_threshold(
            &m(2, &[0.0, 0.1, 0.3, 0.0]),
            ThresholdPolicyKind::MeanPlusSigma,
        )
        .unwrap();
        assert!((t.mu - 0.2).abs() < 1e-15);
        assert!((t.sigma - 0.1).abs() < 1e-15);
        assert!((t.theta - 0.3).abs() < 1e-15);
    }

    #[test]
    fn threshold_fixed() {
        let t = compute_threshold(&m(2, &[0.0, 0.9, 0.9, 0.0]), ThresholdPolicyKind::Fixed(0.2))
            .unwrap();
        assert_eq!(t.theta, 0.2);
    }

    #[test]
    fn threshold_sigma_zero() {
        let t = compute_threshold(
            &m(2, &[0.0, 0.5, 0.5, 0.0]),
            ThresholdPolicyKind::MeanPlus2Sigma,
        )
        .unwrap();
        assert!((t.theta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn threshold_needs_two_factors() {
        assert!(matches!(
            compute_threshold(&m(1, &[0.0]), ThresholdPolicyKind::Mean),
            Err(Error::TooFewFactors)
        ));
    }

    #[test]
    fn edges_boundary_inclusive() {
        let codes: Vec<String> = vec!["A".into(), "B".into()];
        let g = extract_edges(&m(2, &[0.0, 0.3, 0.1, 0.0]), 0.3, &codes);
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].from, g.edges[0].to), (0, 1));
        assert_eq!(g.edges[0].weight, 0.3);
    }

    #[test]
    fn edges_empty_above_max() {
        let codes: Vec<String> = vec!["A".into(), "B".into()];
        let g = extract_edges(&m(2, &[0.0, 0.3, 0.1, 0.0]), 0.9, &codes);
        assert!(g.edges.is_empty());
    }

    #[test]
    fn mutual_pair_is_one_loop() {
        let g = CausalGraph::from_code_edges(
            vec!["A".into(), "B".into()],
            &[("A", "B", 1.0), ("B", "A", 1.0)],
        )
        .unwrap();
        let loops = enumerate_loops(&g, DEFAULT_LOOP_CAP).unwrap();
        assert_eq!(loops, vec![vec![0, 1]]);
    }

    #[test]
    fn dag_has_no_loops() {
        let g = CausalGraph::from_code_edges(
            vec!["A".into(), "B".into(), "C".into()],
            &[("A", "B", 1.0), ("B", "C", 1.0), ("A", "C", 1.0)],
        )
        .unwrap();
        assert!(enumerate_loops(&g, DEFAULT_LOOP_CAP).unwrap().is_empty());
    }

    #[test]
    fn loop_cap_overflows() {
        let g = CausalGraph::from_code_edges(
            vec!["A".into(), "B".into(), "C".into()],
            &[
                ("A", "B", 1.0),
                ("B", "A", 1.0),
                ("B", "C", 1.0),
                ("C", "B", 1.0),
                ("C", "A", 1.0),
                ("A", "C", 1.0),
            ],
        )
        .unwrap();
        assert!(matches!(
            enumerate_loops(&g, 2),
            Err(Error::LoopOverflow { cap: 2 })
        ));
    }

    #[test]
    fn dot_export_format() {
        let g = CausalGraph::from_code_edges(vec!["A".into(), "B".into()], &[("A", "B", 0.25)])
            .unwrap();
        let dot = export_cld(&g);
        assert!(dot.starts_with("digraph cld {\n"));
        assert!(dot.contains("\"A\" -> \"B\" [label=\"0.2500\"];"));
        assert!(dot.ends_with("}\n"));

        let empty = CausalGraph {
            nodes: vec!["A".into()],
            edges: vec![],
            loops: vec![],
        };
        let dot = export_cld(&empty);
        assert!(dot.contains("\"A\";"));
        assert!(!dot.contains("->"));
    }
}
