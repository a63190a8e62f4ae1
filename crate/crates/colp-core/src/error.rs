//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation lengths differ: {left} vs {right}")]
    PermutationLengthMismatch { left: usize, right: usize },

    #[error("{axis} level index {index} out of range (have {levels} levels)")]
    LevelOutOfRange {
        axis: &'static str,
        index: usize,
        levels: usize,
    },

    #[error("thresholds must be finite and strictly increasing above 0: {0}")]
    InvalidThresholds(String),

    #[error("parameter {0} is not finite")]
    NonFiniteParameter(&'static str),

    #[error("sample is empty")]
    EmptySample,

    #[error("x and y lengths differ: {x_len} vs {y_len}")]
    SampleLengthMismatch { x_len: usize, y_len: usize },

    #[error("label set size {labels} does not match declared level count {levels}")]
    LabelCountMismatch { labels: usize, levels: usize },

    #[error("need at least {need} observations to identify {levels} response levels, got {got}")]
    TooFewObservations {
        need: usize,
        got: usize,
        levels: usize,
    },

    #[error("exhaustive search over {levels} levels exceeds the gate of {gate} levels")]
    ExhaustiveGateExceeded { levels: usize, gate: usize },

    #[error("causal comparison needs more than 2 levels per variable, got S={s_levels}, L={l_levels}")]
    DimensionGate { s_levels: usize, l_levels: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("marginal counts are all zero")]
    AllZeroCounts,

    #[error("threshold calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("discretization into {bins} bins needs at least {bins} distinct values, got {distinct}")]
    TooFewDistinctValues { bins: usize, distinct: usize },

    #[error("quantile cut points {lo} and {hi} coincide; bins would collapse")]
    CollapsedQuantiles { lo: usize, hi: usize },

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("column {column:?} has {got} distinct observed levels; causal discovery needs at least 3")]
    TooFewLevels { column: String, got: usize },

    #[error("column {column:?} looks continuous ({distinct} distinct numeric values); discretize it into quantile bins first")]
    ColumnLooksContinuous { column: String, distinct: usize },

    #[error("column {column:?} is not numeric (row {row}: {value:?})")]
    NonNumericColumn {
        column: String,
        row: usize,
        value: String,
    },

    #[error("no data rows in {0}")]
    EmptyInput(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
