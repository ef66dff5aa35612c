use thiserror::Error;

/// Everything that can go wrong between raw decision matrices and a ranking.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("frame of discernment must contain at least one element")]
    EmptyFrame,
    #[error("duplicate frame element `{0}`")]
    DuplicateElement(String),
    #[error("element `{0}` is not part of the frame of discernment")]
    UnknownElement(String),
    #[error("proposition refers to frame index {index} but the frame has {size} elements")]
    OutsideFrame { index: usize, size: usize },
    #[error("the two mass functions are defined on different frames")]
    FrameMismatch,
    #[error("focal element must be a nonempty subset of the frame")]
    EmptyFocalElement,
    #[error("mass {mass} is outside [0, 1]")]
    MassOutOfRange { mass: f64 },
    #[error("masses sum to {sum}, expected 1 within {tolerance}")]
    MassSum { sum: f64, tolerance: f64 },
    #[error("total conflict between the two mass functions (K = 1)")]
    TotalConflict,
    #[error("degenerate evidence: belief plus plausibility sums to zero over the propositions")]
    DegenerateEvidence,
    #[error("proposition list must not be empty")]
    NoPropositions,

    #[error("{what}: expected length {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("not a probability vector: {0}")]
    InvalidDistribution(String),
    #[error("KL divergence undefined: b[{index}] = 0 while a[{index}] > 0")]
    DivergenceUndefined { index: usize },

    #[error("decision matrix `{expert}`: {reason}")]
    InvalidMatrix { expert: String, reason: String },
    #[error("decision matrix `{expert}`: attribute `{attribute}` has zero Euclidean norm")]
    DegenerateAttribute { expert: String, attribute: String },
    #[error("degenerate domain: all values equal {value} (attribute `{attribute}`, expert `{expert}`)")]
    DegenerateDomain {
        expert: String,
        attribute: String,
        value: f64,
    },
    #[error("value {value} lies outside the partition domain [{lower}, {upper}]")]
    OutOfDomain { value: f64, lower: f64, upper: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("MAGDM requires ≥ 2 experts, got {0}")]
    TooFewExperts(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("degenerate cell (alternative {alternative}, attribute {attribute}): belief sums to zero across experts")]
    DegenerateCell { alternative: usize, attribute: usize },
    #[error("degenerate WPBl: (Bel + Pl) sums to zero for expert {expert} at index {index}")]
    DegenerateWpbl { expert: usize, index: usize },
    #[error("expert {expert} has zero average divergence; its support is unbounded")]
    ZeroAverageDivergence { expert: usize },
    #[error("degenerate ranking: the ideal solution is the zero vector")]
    DegenerateRanking,

    #[error("class {0} has no training samples")]
    EmptyClass(usize),
    #[error("confusion matrix is empty")]
    EmptyConfusion,
    #[error("source `{source_id}`, dimension {dim}: {reason}")]
    DegenerateFeature {
        source_id: String,
        dim: usize,
        reason: String,
    },
}

impl Error {
    /// True for failures caused by degenerate numbers in otherwise well-formed
    /// input (constant columns, zero sums, total conflict).
    pub fn is_numeric_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::TotalConflict
                | Error::DegenerateEvidence
                | Error::DivergenceUndefined { .. }
                | Error::DegenerateAttribute { .. }
                | Error::DegenerateDomain { .. }
                | Error::OutOfDomain { .. }
                | Error::DegenerateCell { .. }
                | Error::DegenerateWpbl { .. }
                | Error::ZeroAverageDivergence { .. }
                | Error::DegenerateRanking
                | Error::DegenerateFeature { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
