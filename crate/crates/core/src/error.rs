use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field degree m={0} out of range (1..=16)")]
    FieldDegree(u32),

    #[error("zero polynomial has no lcm")]
    ZeroPolynomialLcm,

    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("design distance too large: BCH(m={m}, design distance {design_distance}) has no message bits")]
    DesignDistanceTooLarge { m: u32, design_distance: usize },

    #[error("puncturing collapses codewords (generator rank drops below {k})")]
    PuncturingCollapses { k: usize },

    #[error("generator matrix has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },

    #[error("enumeration of {count} codewords exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("code too small for K classes: {codewords} codewords < K={classes}")]
    CodeTooSmall { codewords: u128, classes: usize },

    #[error("dimension below message length: n={n} < k={k}")]
    DimensionBelowMessageLength { n: usize, k: usize },

    #[error("degenerate prototype: row {row} has zero or non-finite norm")]
    DegeneratePrototype { row: usize },

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("component mapping mismatch: {0}")]
    ComponentMismatch(String),

    #[error("{scheme} cannot realize n={n}; realizable dimensions near n: {hints:?}{note}")]
    Unrealizable {
        scheme: String,
        n: usize,
        hints: Vec<usize>,
        note: String,
    },

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that mean the requested object cannot be built
    /// (as opposed to malformed input or a dimension the scheme never hits).
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::DesignDistanceTooLarge { .. }
                | Error::PuncturingCollapses { .. }
                | Error::RankDeficient { .. }
                | Error::EnumerationCap { .. }
                | Error::CodeTooSmall { .. }
                | Error::DimensionBelowMessageLength { .. }
                | Error::Infeasible(_)
                | Error::NonFiniteLoss { .. }
        )
    }
}
