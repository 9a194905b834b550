//! Study input schemas, validation, and all file output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::export_cld;
use crate::grey::{GreyMatrix, GreyNumber, LinguisticScale};
use crate::pipeline::PipelineResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Barrier {
    pub code: String,
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expert {
    pub id: String,
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

/// A validated study: factor set, expert panel, and per-expert linguistic
/// assessment matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub name: String,
    pub barriers: Vec<Barrier>,
    pub experts: Vec<Expert>,
    /// expert id -> n x n grid of linguistic codes
    pub assessments: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<(String, f64, f64)>>,
}

/// Manifest for the CSV bundle form: one matrix file per expert.
#[derive(Debug, Deserialize)]
struct BundleManifest {
    name: String,
    barriers: Vec<Barrier>,
    experts: Vec<BundleExpert>,
    #[serde(default)]
    scale: Option<Vec<(String, f64, f64)>>,
}

#[derive(Debug, Deserialize)]
struct BundleExpert {
    id: String,
    #[serde(default)]
    group: Option<String>,
    matrix: String,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

impl Study {
    pub fn factor_count(&self) -> usize {
        self.barriers.len()
    }

    pub fn expert_count(&self) -> usize {
        self.experts.len()
    }

    pub fn barrier_codes(&self) -> Vec<String> {
        self.barriers.iter().map(|b| b.code.clone()).collect()
    }

    /// The scale in effect: the study override, or the default six-level scale.
    pub fn effective_scale(&self) -> Result<LinguisticScale> {
        match &self.scale {
            None => Ok(LinguisticScale::default()),
            Some(levels) => LinguisticScale::new(
                levels
                    .iter()
                    .map(|(code, lower, upper)| {
                        GreyNumber::new(*lower, *upper).map(|g| (code.clone(), g))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }

    /// Every validation finding, in a stable order. Empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut findings = Vec::new();
        let n = self.barriers.len();
        if n == 0 {
            findings.push("study has no barriers".to_string());
        }
        for (i, b) in self.barriers.iter().enumerate() {
            if b.code.trim().is_empty() {
                findings.push(format!("barrier {} has an empty code", i + 1));
            }
            if self.barriers[..i].iter().any(|other| other.code == b.code) {
                findings.push(format!("duplicate barrier code {:?}", b.code));
            }
        }
        if self.experts.is_empty() {
            findings.push("study has no experts".to_string());
        }
        for (i, e) in self.experts.iter().enumerate() {
            if self.experts[..i].iter().any(|other| other.id == e.id) {
                findings.push(format!("duplicate expert id {:?}", e.id));
            }
        }
        let scale = match self.effective_scale() {
            Ok(scale) => scale,
            Err(err) => {
                findings.push(format!("invalid scale: {err}"));
                return findings;
            }
        };
        for e in &self.experts {
            let Some(grid) = self.assessments.get(&e.id) else {
                findings.push(format!("expert {:?} has no assessment", e.id));
                continue;
            };
            if grid.len() != n {
                findings.push(format!(
                    "expert {:?}: assessment has {} rows, expected {}",
                    e.id,
                    grid.len(),
                    n
                ));
                continue;
            }
            for (i, row) in grid.iter().enumerate() {
                if row.len() != n {
                    findings.push(format!(
                        "expert {:?}: row {} has {} entries, expected {} (non-square grid)",
                        e.id,
                        i + 1,
                        row.len(),
                        n
                    ));
                    continue;
                }
                for (j, code) in row.iter().enumerate() {
                    match scale.lookup(code) {
                        None => findings.push(format!(
                            "expert {:?}: unknown code {:?} at row {}, column {}",
                            e.id,
                            code,
                            i + 1,
                            j + 1
                        )),
                        Some(g) => {
                            if i == j && !g.is_zero() {
                                findings.push(format!(
                                    "expert {:?}: diagonal entry at ({}, {}) must be \"N\", found {:?}",
                                    e.id,
                                    i + 1,
                                    j + 1,
                                    code
                                ));
                            }
                        }
                    }
                }
            }
        }
        for id in self.assessments.keys() {
            if !self.experts.iter().any(|e| &e.id == id) {
                findings.push(format!("assessment present for unknown expert {id:?}"));
            }
        }
        findings
    }

    /// Convert every expert's assessment to a grey matrix, in expert order.
    pub fn grey_matrices(&self, scale: &LinguisticScale) -> Result<Vec<GreyMatrix>> {
        self.experts
            .iter()
            .map(|e| {
                let grid = self
                    .assessments
                    .get(&e.id)
                    .ok_or_else(|| Error::MissingAssessment {
                        expert: e.id.clone(),
                    })?;
                crate::grey::assessment_to_grey_matrix(grid, scale).map_err(|err| match err {
                    Error::UnknownCode { code, context } => Error::UnknownCode {
                        code,
                        context: format!("{context} (expert {:?})", e.id),
                    },
                    Error::NonZeroDiagonal { row, col, code, .. } => Error::NonZeroDiagonal {
                        row,
                        col,
                        code,
                        context: format!(" (expert {:?})", e.id),
                    },
                    Error::NonSquareGrid { row, found, expected, .. } => Error::NonSquareGrid {
                        row,
                        found,
                        expected,
                        context: format!(" (expert {:?})", e.id),
                    },
                    other => other,
                })
            })
            .collect()
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load and fully validate a study, either as a single JSON document or a
/// CSV bundle (JSON manifest whose experts point at per-expert matrix files).
pub fn load_study(path: &Path) -> Result<Study> {
    let study = load_study_unvalidated(path)?;
    let findings = study.validate();
    if findings.is_empty() {
        Ok(study)
    } else {
        Err(Error::InvalidStudy(findings.join("; ")))
    }
}

/// Parse a study file without running validation; used by `validate` to
/// report every finding instead of failing on the first.
pub fn load_study_unvalidated(path: &Path) -> Result<Study> {
    let text = read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    let is_bundle = value
        .get("experts")
        .and_then(|e| e.as_array())
        .map(|arr| arr.iter().any(|x| x.get("matrix").is_some()))
        .unwrap_or(false);
    let study = if is_bundle {
        let manifest: BundleManifest =
            serde_json::from_value(value).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        load_bundle(path, manifest)?
    } else {
        serde_json::from_value(value).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
    };
    Ok(study)
}

fn load_bundle(manifest_path: &Path, manifest: BundleManifest) -> Result<Study> {
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut assessments = BTreeMap::new();
    let mut experts = Vec::new();
    for e in manifest.experts {
        let matrix_path = dir.join(&e.matrix);
        let grid = load_matrix_csv(&matrix_path)?;
        assessments.insert(e.id.clone(), grid);
        experts.push(Expert {
            id: e.id,
            group: e.group,
            metadata: e.metadata,
        });
    }
    Ok(Study {
        name: manifest.name,
        barriers: manifest.barriers,
        experts,
        assessments,
        scale: manifest.scale,
    })
}

fn load_matrix_csv(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    let mut grid = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        grid.push(record.iter().map(|s| s.to_string()).collect());
    }
    Ok(grid)
}

/// Format a value at fixed decimals, normalizing negative zero.
pub fn fmt_fixed(v: f64, precision: u8) -> String {
    let s = format!("{:.*}", precision as usize, v);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn round_to(v: f64, precision: u8) -> f64 {
    let scale = 10f64.powi(precision as i32);
    let r = (v * scale).round() / scale;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write every output artifact for one pipeline run; returns the manifest
/// of written paths. Byte-deterministic for identical inputs.
pub fn write_outputs(
    result: &PipelineResult,
    out_dir: &Path,
    precision: u8,
) -> Result<Vec<PathBuf>> {
    if precision == 0 || precision > 12 {
        return Err(Error::InvalidPrecision(precision));
    }
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut manifest = Vec::new();
    let codes = &result.codes;
    let n = codes.len();

    // total_relation.csv: header row of codes, one labeled row per factor
    let mut total = String::new();
    total.push_str(&format!("factor,{}\n", codes.join(",")));
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| fmt_fixed(result.total_relation.get(i, j), precision))
            .collect();
        total.push_str(&format!("{},{}\n", codes[i], row.join(",")));
    }
    let path = out_dir.join("total_relation.csv");
    write_file(&path, &total)?;
    manifest.push(path);

    // prominence.csv
    let mut prom = String::from("factor,r,c,prominence,net_influence,prominence_rank,influence_rank,group\n");
    for rec in &result.records {
        prom.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            rec.factor_code,
            fmt_fixed(rec.r, precision),
            fmt_fixed(rec.c, precision),
            fmt_fixed(rec.prominence, precision),
            fmt_fixed(rec.net_influence, precision),
            rec.prominence_rank,
            rec.influence_rank,
            rec.group.label(),
        ));
    }
    let path = out_dir.join("prominence.csv");
    write_file(&path, &prom)?;
    manifest.push(path);

    let path = out_dir.join("prominence.md");
    write_file(&path, &prominence_markdown(result, precision))?;
    manifest.push(path);

    // ipm.json
    let points: Vec<serde_json::Value> = crate::engine::ipm_points(&result.records)
        .iter()
        .map(|p| {
            serde_json::json!({
                "code": p.code,
                "x": round_to(p.x, precision),
                "y": round_to(p.y, precision),
                "group": p.group,
            })
        })
        .collect();
    let path = out_dir.join("ipm.json");
    write_file(
        &path,
        &format!("{}\n", serde_json::to_string_pretty(&points).unwrap()),
    )?;
    manifest.push(path);

    // edges.csv
    let mut edges = String::from("from,to,weight\n");
    let mut sorted: Vec<_> = result.graph.edges.iter().collect();
    sorted.sort_by(|a, b| {
        (&codes[a.from], &codes[a.to]).cmp(&(&codes[b.from], &codes[b.to]))
    });
    for e in sorted {
        edges.push_str(&format!(
            "{},{},{}\n",
            codes[e.from],
            codes[e.to],
            fmt_fixed(e.weight, precision)
        ));
    }
    let path = out_dir.join("edges.csv");
    write_file(&path, &edges)?;
    manifest.push(path);

    // loops.json
    let loops: Vec<Vec<&str>> = result.graph.loop_codes();
    let path = out_dir.join("loops.json");
    write_file(
        &path,
        &format!("{}\n", serde_json::to_string_pretty(&loops).unwrap()),
    )?;
    manifest.push(path);

    let path = out_dir.join("cld.dot");
    write_file(&path, &export_cld(&result.graph))?;
    manifest.push(path);

    let path = out_dir.join("report.md");
    write_file(&path, &report_markdown(result, precision))?;
    manifest.push(path);

    Ok(manifest)
}

/// Write the three sensitivity CSVs (prominence ranks, influence ranks,
/// edge presence) mirroring the run's scenario order.
pub fn write_sensitivity_outputs(
    report: &crate::sensitivity::SensitivityReport,
    out_dir: &Path,
    precision: u8,
) -> Result<Vec<PathBuf>> {
    if precision == 0 || precision > 12 {
        return Err(Error::InvalidPrecision(precision));
    }
    fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let mut manifest = Vec::new();
    let names = report.scenario_names.join(",");

    let rank_csv = |pick: fn(&crate::engine::ProminenceRecord) -> usize,
                    delta: fn(&crate::sensitivity::RankDelta) -> usize| {
        let mut csv = format!("factor,{names},max_change\n");
        for (i, rec) in report.base.records.iter().enumerate() {
            let mut ranks = vec![pick(rec).to_string()];
            ranks.extend(
                report
                    .alternates
                    .iter()
                    .map(|alt| pick(&alt.records[i]).to_string()),
            );
            csv.push_str(&format!(
                "{},{},{}\n",
                rec.factor_code,
                ranks.join(","),
                delta(&report.rank_deltas[i])
            ));
        }
        csv
    };

    let path = out_dir.join("sensitivity_prominence.csv");
    write_file(
        &path,
        &rank_csv(|r| r.prominence_rank, |d| d.max_prominence_delta),
    )?;
    manifest.push(path);

    let path = out_dir.join("sensitivity_influence.csv");
    write_file(
        &path,
        &rank_csv(|r| r.influence_rank, |d| d.max_influence_delta),
    )?;
    manifest.push(path);

    // edge presence: theta row, edge-count row, 0/1 rows
    let mut csv = format!("row,{names}\n");
    let thetas: Vec<String> = report
        .thetas
        .iter()
        .map(|t| fmt_fixed(*t, precision))
        .collect();
    csv.push_str(&format!("theta,{}\n", thetas.join(",")));
    let counts: Vec<String> = report
        .edge_presence
        .presence
        .iter()
        .fold(vec![0usize; report.thetas.len()], |mut acc, row| {
            for (a, &p) in acc.iter_mut().zip(row) {
                *a += p as usize;
            }
            acc
        })
        .into_iter()
        .map(|c| c.to_string())
        .collect();
    csv.push_str(&format!("edge_count,{}\n", counts.join(",")));
    for ((from, to), row) in report
        .edge_presence
        .edges
        .iter()
        .zip(&report.edge_presence.presence)
    {
        let bits: Vec<String> = row.iter().map(|b| b.to_string()).collect();
        csv.push_str(&format!("{from}->{to},{}\n", bits.join(",")));
    }
    let path = out_dir.join("sensitivity_edges.csv");
    write_file(&path, &csv)?;
    manifest.push(path);

    Ok(manifest)
}

fn prominence_markdown(result: &PipelineResult, precision: u8) -> String {
    let mut md = String::from(
        "| Factor | R | C | R+C | R-C | Prominence rank | Influence rank | Cause/Effect |\n\
         |---|---|---|---|---|---|---|---|\n",
    );
    for rec in &result.records {
        md.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
            rec.factor_code,
            fmt_fixed(rec.r, precision),
            fmt_fixed(rec.c, precision),
            fmt_fixed(rec.prominence, precision),
            fmt_fixed(rec.net_influence, precision),
            rec.prominence_rank,
            rec.influence_rank,
            rec.group.label(),
        ));
    }
    md
}

fn report_markdown(result: &PipelineResult, precision: u8) -> String {
    let mut md = String::new();
    md.push_str("# Grey-DEMATEL run report\n\n");
    md.push_str(&format!(
        "- Factors: {}\n- Threshold policy: {}\n- mu = {}, sigma = {}, theta = {}\n- Edges: {}\n- Feedback loops: {}\n\n",
        result.codes.len(),
        result.threshold.kind.label(),
        fmt_fixed(result.threshold.mu, precision),
        fmt_fixed(result.threshold.sigma, precision),
        fmt_fixed(result.threshold.theta, precision),
        result.graph.edges.len(),
        result.graph.loops.len(),
    ));
    md.push_str("## Prominence and net influence\n\n");
    md.push_str(&prominence_markdown(result, precision));
    md.push_str("\n## Feedback loops\n\n");
    if result.graph.loops.is_empty() {
        md.push_str("none\n");
    } else {
        for (i, cycle) in result.graph.loop_codes().iter().enumerate() {
            md.push_str(&format!("- R{}: {}\n", i + 1, cycle.join(" -> ")));
        }
    }
    md
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_study() -> Study {
        let mut assessments = BTreeMap::new();
        assessments.insert(
            "E1".to_string(),
            vec![
                vec!["N".to_string(), "H".to_string()],
                vec!["L".to_string(), "N".to_string()],
            ],
        );
        Study {
            name: "tiny".into(),
            barriers: vec![
                Barrier {
                    code: "A".into(),
                    name: "Alpha".into(),
                    description: String::new(),
                },
                Barrier {
                    code: "B".into(),
                    name: "Beta".into(),
                    description: String::new(),
                },
            ],
            experts: vec![Expert {
                id: "E1".into(),
                group: None,
                metadata: BTreeMap::new(),
            }],
            assessments,
            scale: None,
        }
    }

    #[test]
    fn valid_study_passes() {
        let study = tiny_study();
        assert!(study.validate().is_empty());
        assert_eq!(study.factor_count(), 2);
        assert_eq!(study.expert_count(), 1);
    }

    #[test]
    fn non_square_assessment_named() {
        let mut study = tiny_study();
        study.assessments.get_mut("E1").unwrap()[0].push("M".into());
        let findings = study.validate();
        assert_eq!(findings.len(), 1);
        assert!(findings[0].contains("E1"));
        assert!(findings[0].contains("non-square"));
    }

    #[test]
    fn missing_assessment_named() {
        let mut study = tiny_study();
        study.assessments.clear();
        let findings = study.validate();
        assert!(findings.iter().any(|f| f.contains("no assessment")));
    }

    #[test]
    fn diagonal_violation_names_expert_and_cell() {
        let mut study = tiny_study();
        study.assessments.get_mut("E1").unwrap()[1][1] = "H".into();
        let findings = study.validate();
        assert!(findings[0].contains("E1"));
        assert!(findings[0].contains("(2, 2)"));
    }

    #[test]
    fn unknown_code_names_position() {
        let mut study = tiny_study();
        study.assessments.get_mut("E1").unwrap()[0][1] = "ZZ".into();
        let findings = study.validate();
        assert!(findings[0].contains("ZZ"));
        assert!(findings[0].contains("row 1, column 2"));
    }

    #[test]
    fn duplicate_barrier_code_caught() {
        let mut study = tiny_study();
        study.barriers[1].code = "A".into();
        let findings = study.validate();
        assert!(findings.iter().any(|f| f.contains("duplicate barrier code")));
    }

    #[test]
    fn json_round_trip() {
        let study = tiny_study();
        let json = serde_json::to_string(&study).unwrap();
        let back: Study = serde_json::from_str(&json).unwrap();
        assert_eq!(study, back);
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(fmt_fixed(0.25, 4), "0.2500");
        assert_eq!(fmt_fixed(-0.0, 4), "0.0000");
        assert_eq!(fmt_fixed(-1e-9, 4), "0.0000");
        assert_eq!(fmt_fixed(-0.5, 2), "-0.50");
    }
}
