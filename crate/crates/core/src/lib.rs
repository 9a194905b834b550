//! Grey-DEMATEL decision-analysis engine.
//!
//! Turns linguistic expert surveys into grey relation matrices, defuzzifies
//! them with the modified-CFCS procedure, computes the total-relation matrix
//! and prominence / net-influence scores, extracts a threshold-filtered
//! causal graph with its elementary feedback loops, and runs multi-scenario
//! sensitivity analyses over weighted expert groups.

pub mod defuzz;
pub mod engine;
pub mod error;
pub mod graph;
pub mod grey;
pub mod pipeline;
pub mod sensitivity;
pub mod study;

pub use defuzz::{CfcsVariant, CrispMatrix, RowNormalization};
pub use engine::{Group, IpmPoint, ProminenceRecord};
pub use error::Error;
pub use graph::{CausalGraph, Edge, ThresholdPolicy, ThresholdPolicyKind};
pub use grey::{GreyMatrix, GreyNumber, LinguisticScale};
pub use pipeline::{PipelineResult, RunConfig};
pub use sensitivity::{Scenario, SensitivityReport};
pub use study::Study;
