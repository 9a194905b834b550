//! Study loading (JSON document and CSV bundle) and output-file shapes.

use std::path::PathBuf;

use grey_dematel::graph::{export_cld, CausalGraph};
use grey_dematel::pipeline::{run_study, RunConfig};
use grey_dematel::study::{load_study, write_outputs};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[test]
fn load_json_document() {
    let study = load_study(&fixture("tiny.json")).unwrap();
    assert_eq!(study.factor_count(), 2);
    assert_eq!(study.expert_count(), 1);
    assert_eq!(study.assessments["E1"][0][1], "H");
}

#[test]
fn load_synthetic_panel() {
    let study = load_study(&fixture("synthetic18.json")).unwrap();
    assert_eq!(study.factor_count(), 10);
    assert_eq!(study.expert_count(), 18);
    let groups: std::collections::BTreeSet<_> =
        study.experts.iter().filter_map(|e| e.group.clone()).collect();
    assert_eq!(groups.len(), 3);
}

#[test]
fn load_csv_bundle() {
    let study = load_study(&fixture("bundle/manifest.json")).unwrap();
    assert_eq!(study.factor_count(), 2);
    assert_eq!(study.expert_count(), 2);
    assert_eq!(study.assessments["E1"][1][0], "L");
    assert_eq!(study.assessments["E2"][0][1], "VL");
}

#[test]
fn round_trip_through_json() {
    let study = load_study(&fixture("synthetic18.json")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("copy.json");
    std::fs::write(&path, serde_json::to_string_pretty(&study).unwrap()).unwrap();
    let back = load_study(&path).unwrap();
    assert_eq!(study, back);
}

#[test]
fn invalid_study_is_rejected_with_findings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name":"bad","barriers":[{"code":"A","name":"a"},{"code":"A","name":"b"}],
            "experts":[{"id":"E1"}],"assessments":{"E1":[["N","H"],["L","N"]]}}"#,
    )
    .unwrap();
    let err = load_study(&path).unwrap_err();
    assert!(err.to_string().contains("duplicate barrier code"));
}

#[test]
fn outputs_have_expected_shapes() {
    let study = load_study(&fixture("synthetic18.json")).unwrap();
    let config = RunConfig::default();
    let result = run_study(&study, None, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_outputs(&result, dir.path(), config.precision).unwrap();
    assert_eq!(manifest.len(), 8);

    let prom = std::fs::read_to_string(dir.path().join("prominence.csv")).unwrap();
    let lines: Vec<&str> = prom.lines().collect();
    assert_eq!(lines.len(), 11); // header + 10 factors
    assert_eq!(lines[0].split(',').count(), 8);

    let total = std::fs::read_to_string(dir.path().join("total_relation.csv")).unwrap();
    assert_eq!(total.lines().count(), 11);

    let ipm: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ipm.json")).unwrap())
            .unwrap();
    assert_eq!(ipm.as_array().unwrap().len(), 10);
}

#[test]
fn empty_edge_set_writes_header_only() {
    let study = load_study(&fixture("tiny.json")).unwrap();
    let config = RunConfig {
        threshold: grey_dematel::ThresholdPolicyKind::Fixed(100.0),
        ..RunConfig::default()
    };
    let result = run_study(&study, None, &config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&result, dir.path(), config.precision).unwrap();
    let edges = std::fs::read_to_string(dir.path().join("edges.csv")).unwrap();
    assert_eq!(edges, "from,to,weight\n");
}

#[test]
fn base_graph_dot_has_17_edge_statements() {
    let nodes: Vec<String> = ["RSP", "SIN", "OSA", "LCA", "PLE", "INF", "LOS", "ARC", "MNC", "ITRL"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let edges: Vec<(&str, &str, f64)> = [
        ("RSP", "LCA"), ("OSA", "LCA"), ("OSA", "ARC"), ("LCA", "RSP"),
        ("LCA", "ARC"), ("LCA", "ITRL"), ("INF", "LCA"), ("INF", "LOS"),
        ("LOS", "OSA"), ("LOS", "LCA"), ("LOS", "INF"), ("LOS", "ARC"),
        ("ARC", "OSA"), ("ARC", "LCA"), ("ARC", "LOS"), ("MNC", "SIN"),
        ("MNC", "LCA"),
    ]
    .iter()
    .map(|&(a, b)| (a, b, 0.1))
    .collect();
    let graph = CausalGraph::from_code_edges(nodes, &edges).unwrap();
    let dot = export_cld(&graph);
    assert_eq!(dot.matches(" -> ").count(), 17);
    assert_eq!(dot.matches(";\n").count(), 27); // 10 nodes + 17 edges
}
