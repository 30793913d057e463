use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure a metriq operation can report.
///
/// All variants are domain errors: the inputs were well-formed numbers but
/// violate a mathematical precondition (Hermiticity, positivity, the unbroken
/// PT regime, ...).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (anti-Hermitian part has norm {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is singular")]
    Singular,

    #[error("vector is supernormalized (squared norm {norm_sq})")]
    Supernormalized { norm_sq: f64 },

    #[error("metric operator exceeds the identity (operator norm {norm})")]
    MetricExceedsIdentity { norm: f64 },

    #[error("metric is not normalized (operator norm {norm}, expected 1)")]
    NotNormalized { norm: f64 },

    #[error("PT symmetry is broken: need s > r sin(phi), got s = {s}, r sin(phi) = {r_sin_phi}")]
    BrokenPtRegime { s: f64, r_sin_phi: f64 },

    #[error("Hamiltonian parameters must satisfy r >= 0, s > 0 and r sin(phi) >= 0")]
    NegativeParameters,

    #[error("invalid density operator: {0}")]
    InvalidDensityOperator(String),

    #[error("tomography design is singular (Gram rank {rank}, need {needed})")]
    SingularDesign { rank: usize, needed: usize },

    #[error("metric has degenerate eigenvalues (gap {gap:.3e}); the threshold needs a non-trivial metric")]
    DegenerateMetric { gap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
