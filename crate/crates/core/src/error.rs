use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grey number: lower {lower} > upper {upper}")]
    InvalidGreyNumber { lower: f64, upper: f64 },

    #[error("grey number bounds must be finite (got [{lower}, {upper}])")]
    NonFiniteGreyNumber { lower: f64, upper: f64 },

    #[error("linguistic scale is malformed: {0}")]
    InvalidScale(String),

    #[error("unknown linguistic code {code:?}{context}")]
    UnknownCode { code: String, context: String },

    #[error("assessment grid is not square: row {row} has {found} entries, expected {expected}{context}")]
    NonSquareGrid {
        row: usize,
        found: usize,
        expected: usize,
        context: String,
    },

    #[error("diagonal entry at ({row}, {col}) must be \"N\", found {code:?}{context}")]
    NonZeroDiagonal {
        row: usize,
        col: usize,
        code: String,
        context: String,
    },

    #[error("matrix dimension mismatch: expected {expected}x{expected}, found {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weight list has {weights} entries for {matrices} matrices")]
    WeightCountMismatch { weights: usize, matrices: usize },

    #[error("negative weight {weight} at position {index}")]
    NegativeWeight { weight: f64, index: usize },

    #[error("weights sum to zero; at least one weight must be positive")]
    AllZeroWeights,

    #[error("no matrices to average")]
    EmptyMatrixList,

    #[error("degenerate study: every row sum of the crisp matrix is zero")]
    DegenerateStudy,

    #[error(
        "(I - X) is singular or near-singular (pivot {pivot:e} below tolerance); \
         the total-relation matrix does not exist for this study — the revised-DEMATEL \
         feasibility repair of Lee et al. (2013) is not implemented here"
    )]
    SingularMatrix { pivot: f64 },

    #[error("threshold statistics need at least 2 factors (no off-diagonal entries)")]
    TooFewFactors,

    #[error("fixed threshold must be a finite non-negative value, got {0}")]
    InvalidFixedThreshold(f64),

    #[error("cycle enumeration exceeded the cap of {cap} loops")]
    LoopOverflow { cap: usize },

    #[error("study validation failed: {0}")]
    InvalidStudy(String),

    #[error("expert {expert:?} has no assessment")]
    MissingAssessment { expert: String },

    #[error("assessment present for unknown expert {expert:?}")]
    ExtraAssessment { expert: String },

    #[error("duplicate barrier code {code:?}")]
    DuplicateBarrier { code: String },

    #[error("scenario {scenario:?} references unknown group {group:?}")]
    UnknownGroup { scenario: String, group: String },

    #[error("scenario {scenario:?} gives no weight to the group {group:?} of expert {expert:?}")]
    MissingGroupWeight {
        scenario: String,
        group: String,
        expert: String,
    },

    #[error("scenario {scenario:?} is invalid: {reason}")]
    InvalidScenario { scenario: String, reason: String },

    #[error("factor sets differ between scenarios: {0}")]
    FactorSetMismatch(String),

    #[error("node sets differ between causal graphs: {0}")]
    NodeSetMismatch(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("precision must be in 1..=12, got {0}")]
    InvalidPrecision(u8),
}

pub type Result<T> = std::result::Result<T, Error>;
