use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("map is not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("map is not completely positive (Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid Holevo form: {0}")]
    InvalidHolevo(String),

    #[error("invalid rank-one form: {0}")]
    InvalidRankOne(String),

    #[error("subspace is not contained in the ambient subspace (residual {residual:.3e})")]
    ContainmentViolation { residual: f64 },

    #[error("target subspace is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("target subspace is not traceless (|tr| = {residual:.3e})")]
    NotTraceless { residual: f64 },

    #[error("subspace dimension {dim} exceeds the maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },

    #[error("probability {0} outside the open interval (0, 1)")]
    InvalidProbability(f64),

    #[error("range of the channel is not contained in the diagonal algebra (off-diagonal residual {residual:.3e})")]
    RangeNotDiagonal { residual: f64 },

    #[error("input is not an orthogonal projection (residual {residual:.3e})")]
    NotProjection { residual: f64 },

    #[error("channel has no rank-one Kraus representation")]
    NoRankOneForm,

    #[error("partition validation failed: {0}")]
    PartitionInvalid(String),

    #[error("projections Phi^dagger(P_k) have unequal ranks {0:?}")]
    RankMismatch(Vec<usize>),

    #[error("projection {index} is not in the multiplicative domain of the dual map")]
    NotInMultiplicativeDomain { index: usize },

    #[error("invalid integer partition: {0}")]
    InvalidPartition(String),

    #[error("no verified constant-diagonal unitary found (best residual {residual:.3e})")]
    ConstructionUnverified { residual: f64 },

    #[error("operator set is not closed as a *-algebra (residual {residual:.3e})")]
    AlgebraNotClosed { residual: f64 },

    #[error("privacy violated: element {index} has residual {residual:.3e}")]
    PrivacyViolation { index: usize, residual: f64 },

    #[error("invalid mixed-unitary decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
