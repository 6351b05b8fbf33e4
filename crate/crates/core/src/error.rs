use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("table has no data rows")]
    EmptyTable,

    #[error("no quasi-identifier columns declared")]
    NoQuasiIdentifiers,

    #[error("row {row} has {found} cells, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("coordinate {0} lies outside [0, 1]")]
    OutsideUnitCube(f64),

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("points have inconsistent dimensions ({expected} vs {found})")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("epsilon must be a nonnegative finite number, got {0}")]
    InvalidEpsilon(f64),

    #[error("k must be at least 1")]
    InvalidK,

    #[error("dimension cap must be at least 1")]
    InvalidDimCap,

    #[error("vertex set must be nonempty and strictly increasing: {0:?}")]
    InvalidSimplex(Vec<usize>),

    #[error("row index {index} out of range for {n} rows")]
    UnknownRow { index: usize, n: usize },

    #[error(
        "filtration would hold {simplices} simplices (budget {budget}); lower the dimension cap"
    )]
    FiltrationTooLarge { simplices: u128, budget: u128 },

    #[error("filtration entry {entry} is missing face {face:?}")]
    MissingFace { entry: usize, face: Vec<usize> },

    #[error("filtration is out of order at entry {0}")]
    UnsortedFiltration(usize),

    #[error("malformed filtration line {line}: {reason}")]
    FiltrationParse { line: usize, reason: String },

    #[error("k = {k} exceeds row count ({n})")]
    Infeasible { k: usize, n: usize },

    #[error("grid must be nonempty, finite, nonnegative and strictly increasing")]
    InvalidGrid,

    #[error("classes do not partition the {n} table rows")]
    NotAPartition { n: usize },

    #[error("invalid generalization tree `{attribute}`: {}", format_violations(.violations))]
    InvalidTree {
        attribute: String,
        violations: Vec<crate::categorical::TreeViolation>,
    },

    #[error("`{value}` is not a leaf of the `{attribute}` tree")]
    UnknownValue { attribute: String, value: String },

    #[error("level {level} exceeds height {height} of the `{attribute}` tree")]
    LevelOutOfRange {
        attribute: String,
        level: usize,
        height: usize,
    },

    #[error("expected {expected} values per row, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("at least one generalization tree is required")]
    NoTrees,

    #[error("path is not monotone at step {0}")]
    NonMonotonePath(usize),
}

fn format_violations(violations: &[crate::categorical::TreeViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
