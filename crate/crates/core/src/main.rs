use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use grey_dematel::defuzz::{CfcsVariant, CrispMatrix};
use grey_dematel::error::Error;
use grey_dematel::graph::{enumerate_loops, export_cld, extract_edges, ThresholdPolicyKind};
use grey_dematel::pipeline::{run_study, RunConfig};
use grey_dematel::sensitivity::{load_scenarios, run_sensitivity};
use grey_dematel::study::{fmt_fixed, load_study, write_outputs, write_sensitivity_outputs};

#[derive(Parser)]
#[command(
    name = "grey-dematel",
    about = "Grey-DEMATEL decision analysis: expert surveys to total-relation matrices, cause/effect groups, causal-loop diagrams, and sensitivity reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonFlags {
    /// Threshold policy: mean | mean+sigma | mean+1.5sigma | mean+2sigma | fixed:VALUE
    #[arg(long, default_value = "mean+sigma", value_parser = parse_threshold)]
    threshold: ThresholdPolicyKind,
    /// CFCS variant: paper | standard
    #[arg(long, default_value = "paper", value_parser = parse_cfcs)]
    cfcs: CfcsVariant,
    /// Decimal places in numeric output (1..=12)
    #[arg(long, default_value_t = 4)]
    precision: u8,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Exclude the diagonal from CFCS row statistics
    #[arg(long)]
    exclude_diagonal: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a study file and write all artifacts
    Run {
        study: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Run the base scenario plus every scenario in a scenarios file
    Sensitivity {
        study: PathBuf,
        scenarios: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Extract edges and feedback loops from a precomputed total-relation matrix CSV
    Loops {
        /// CSV with a header row of factor codes and one labeled row per factor
        matrix: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Validate a study file and list every finding
    Validate { study: PathBuf },
}

fn parse_threshold(s: &str) -> Result<ThresholdPolicyKind, String> {
    match s {
        "mean" => Ok(ThresholdPolicyKind::Mean),
        "mean+sigma" => Ok(ThresholdPolicyKind::MeanPlusSigma),
        "mean+1.5sigma" => Ok(ThresholdPolicyKind::MeanPlus1_5Sigma),
        "mean+2sigma" => Ok(ThresholdPolicyKind::MeanPlus2Sigma),
        other => {
            if let Some(value) = other.strip_prefix("fixed:") {
                let v: f64 = value
                    .parse()
                    .map_err(|_| format!("invalid fixed threshold {value:?}"))?;
                if !v.is_finite() || v < 0.0 {
                    return Err(format!("fixed threshold must be non-negative, got {v}"));
                }
                Ok(ThresholdPolicyKind::Fixed(v))
            } else {
                Err(format!("unknown threshold policy {other:?}"))
            }
        }
    }
}

fn parse_cfcs(s: &str) -> Result<CfcsVariant, String> {
    match s {
        "paper" => Ok(CfcsVariant::PaperLiteral),
        "standard" => Ok(CfcsVariant::StandardCfcs),
        other => Err(format!("unknown CFCS variant {other:?}")),
    }
}

fn config_from(flags: &CommonFlags) -> Result<RunConfig, Error> {
    if flags.precision == 0 || flags.precision > 12 {
        return Err(Error::InvalidPrecision(flags.precision));
    }
    Ok(RunConfig {
        threshold: flags.threshold,
        cfcs: flags.cfcs,
        include_diagonal_in_row_stats: !flags.exclude_diagonal,
        precision: flags.precision,
        ..RunConfig::default()
    })
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::SingularMatrix { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            match &err {
                Error::Io { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
                    eprintln!("error: file not found: {path}");
                }
                other => eprintln!("error: {other}"),
            }
            exit_code_for(&err)
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { study, flags } => {
            let config = config_from(&flags)?;
            let study = load_study(&study)?;
            let result = run_study(&study, None, &config)?;
            write_outputs(&result, &flags.out, config.precision)?;
            let p = config.precision;
            println!(
                "study {:?}: n={} K={} theta[{}]={} edges={} loops={}",
                study.name,
                study.factor_count(),
                study.expert_count(),
                result.threshold.kind.label(),
                fmt_fixed(result.threshold.theta, p),
                result.graph.edges.len(),
                result.graph.loops.len(),
            );
            Ok(())
        }
        Command::Sensitivity {
            study,
            scenarios,
            flags,
        } => {
            let config = config_from(&flags)?;
            let study = load_study(&study)?;
            let scenarios = load_scenarios(&scenarios)?;
            let report = run_sensitivity(&study, &scenarios, &config)?;
            write_sensitivity_outputs(&report, &flags.out, config.precision)?;
            let p = config.precision;
            for (name, theta) in report.scenario_names.iter().zip(&report.thetas) {
                println!("scenario {name}: theta={}", fmt_fixed(*theta, p));
            }
            Ok(())
        }
        Command::Loops { matrix, flags } => {
            let config = config_from(&flags)?;
            let (codes, m) = load_matrix(&matrix)?;
            let threshold = grey_dematel::graph::compute_threshold(&m, config.threshold)?;
            let mut graph = extract_edges(&m, threshold.theta, &codes);
            graph.loops = enumerate_loops(&graph, config.loop_cap)?;
            let p = config.precision;
            println!(
                "theta[{}]={} edges={} loops={}",
                threshold.kind.label(),
                fmt_fixed(threshold.theta, p),
                graph.edges.len(),
                graph.loops.len(),
            );
            for cycle in graph.loop_codes() {
                println!("loop: {}", cycle.join(" -> "));
            }
            print!("{}", export_cld(&graph));
            Ok(())
        }
        Command::Validate { study } => {
            let parsed = grey_dematel::study::load_study_unvalidated(&study)?;
            let findings = parsed.validate();
            if findings.is_empty() {
                println!("OK");
                Ok(())
            } else {
                for finding in &findings {
                    println!("{finding}");
                }
                Err(Error::InvalidStudy(format!(
                    "{} finding(s)",
                    findings.len()
                )))
            }
        }
    }
}

/// Total-relation matrix CSV: header `factor,<codes...>`, then one labeled
/// row of values per factor.
fn load_matrix(path: &PathBuf) -> Result<(Vec<String>, CrispMatrix), Error> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    let codes: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
        .iter()
        .skip(1)
        .map(|s| s.to_string())
        .collect();
    let n = codes.len();
    let mut entries = Vec::with_capacity(n * n);
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        for field in record.iter().skip(1) {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                message: format!("invalid number {field:?}"),
            })?;
            entries.push(v);
        }
    }
    let m = CrispMatrix::from_entries(n, entries)?;
    Ok((codes, m))
}
