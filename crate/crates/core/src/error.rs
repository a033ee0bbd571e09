use thiserror::Error;

/// Errors shared across the crate.
///
/// Every fallible operation reports through this enum so callers can map
/// failures onto process exit codes uniformly.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two values were built over different ground sets.
    #[error("ground mismatch: {context}")]
    GroundMismatch { context: String },

    /// An operation requiring a reflexive transitive relation was handed
    /// something else. The witness names the violation.
    #[error("relation is not a preorder: {witness}")]
    RelationNotPreorder { witness: String },

    /// Instance exceeds a hard size bound.
    #[error("instance too large: {size} points exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    /// A cost matrix fails the zero-diagonal or triangle conditions required
    /// by the one-variable dual.
    #[error("cost conditions violated: {detail}")]
    CostConditionsViolated { detail: String },

    /// A potential does not satisfy the one-variable cost constraint.
    #[error("potential is infeasible: {detail}")]
    InfeasiblePotential { detail: String },

    /// A potential value lies outside the required [0, 1] range.
    #[error("potential value out of range: {detail}")]
    RangeViolation { detail: String },

    /// The ground set carries no coordinate labels but the operation needs them.
    #[error("ground set has no labels")]
    MissingLabels,

    /// The two measures share support mass where disjoint supports are required.
    #[error("measure supports overlap at point {point}")]
    OverlappingSupports { point: String },

    /// Grid resolution must be a positive integer.
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    /// Shift offset outside [1, n].
    #[error("invalid shift {shift}: must lie in [1, {resolution}]")]
    InvalidShift { shift: u32, resolution: u32 },

    /// Catch-all for malformed operation parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A named construction invariant failed.
    #[error("validation failed: {invariant}")]
    Validation { invariant: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(invariant: impl Into<String>) -> Self {
        Error::Validation {
            invariant: invariant.into(),
        }
    }

    pub fn ground_mismatch(context: impl Into<String>) -> Self {
        Error::GroundMismatch {
            context: context.into(),
        }
    }
}
