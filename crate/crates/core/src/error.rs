//! Crate error type.

use thiserror::Error;

/// Everything that can go wrong in the toolkit, with enough payload to
/// reconstruct the offending call.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("fiber spectrum: empty side_lengths")]
    EmptySideLengths,

    #[error("fiber spectrum: cutoff {cutoff} excludes every positive eigenvalue (smallest is {smallest})")]
    NoGapBelowCutoff { cutoff: f64, smallest: f64 },

    #[error("fiber spectrum: no positive eigenvalue (spectral gap missing)")]
    MissingSpectralGap,

    #[error("fiber spectrum: invalid input: {0}")]
    InvalidSpectrum(String),

    #[error("mode ({k},{mu_ordinal}) not present in the fiber spectrum")]
    UnknownMode { k: i32, mu_ordinal: usize },

    #[error("radial grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: need at least {need} nodes, got {got}")]
    GridTooCoarse { need: usize, got: usize },

    #[error("mode (k={k}, μ={mu}): log-growth obstruction: rhs radial mass {mass:.3e} nonzero but boundedness at infinity demanded")]
    LogGrowthObstruction { k: i32, mu: f64, mass: f64 },

    #[error("mode (k={k}, μ={mu}): {message}")]
    ModeSolve { k: i32, mu: f64, message: String },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("range [{lo}, {hi}] outside grid [{grid_lo}, {grid_hi}]")]
    RangeOutsideGrid {
        lo: f64,
        hi: f64,
        grid_lo: f64,
        grid_hi: f64,
    },

    #[error("Kähler condition violated at {count} sample(s); first at flat index {first}")]
    KahlerViolation { count: usize, first: usize },

    #[error("decay fit: {0}")]
    DecayFit(String),

    #[error("energy contraction factor must lie in (0,1), got {0}")]
    ContractionOutOfRange(f64),

    #[error("bootstrap: insufficient decay, beta_in = {0} must be positive")]
    InsufficientDecay(f64),

    #[error("constraint parameters: {0}")]
    InvalidConstraintParams(String),

    #[error("cutoff profile: {0}")]
    InvalidCutoff(String),

    #[error("gluing supports misordered: {0}")]
    MisorderedSupports(String),

    #[error("sigma average: angular node count {n_theta} not divisible by order {order}")]
    GridNotRotationClosed { n_theta: usize, order: usize },

    #[error("eigensolve failed: {0}")]
    Eigensolve(String),

    #[error("serialization: {0}")]
    Serde(String),

    #[error("io: {0}")]
    Io(String),

    #[error("{0}")]
    Invalid(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable code for the CLI error record.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySideLengths => "empty_side_lengths",
            Error::NoGapBelowCutoff { .. } => "no_gap_below_cutoff",
            Error::MissingSpectralGap => "missing_spectral_gap",
            Error::InvalidSpectrum(_) => "invalid_spectrum",
            Error::UnknownMode { .. } => "unknown_mode",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::LogGrowthObstruction { .. } => "log_growth_obstruction",
            Error::ModeSolve { .. } => "mode_solve",
            Error::FieldMismatch(_) => "field_mismatch",
            Error::RangeOutsideGrid { .. } => "range_outside_grid",
            Error::KahlerViolation { .. } => "kahler_violation",
            Error::DecayFit(_) => "decay_fit",
            Error::ContractionOutOfRange(_) => "contraction_out_of_range",
            Error::InsufficientDecay(_) => "insufficient_decay",
            Error::InvalidConstraintParams(_) => "invalid_constraint_params",
            Error::InvalidCutoff(_) => "invalid_cutoff",
            Error::MisorderedSupports(_) => "misordered_supports",
            Error::GridNotRotationClosed { .. } => "grid_not_rotation_closed",
            Error::Eigensolve(_) => "eigensolve",
            Error::Serde(_) => "serialization",
            Error::Io(_) => "io",
            Error::Invalid(_) => "invalid",
        }
    }

    /// Module the error belongs to, for the CLI error record.
    pub fn module(&self) -> &'static str {
        match self {
            Error::EmptySideLengths
            | Error::NoGapBelowCutoff { .. }
            | Error::MissingSpectralGap
            | Error::InvalidSpectrum(_)
            | Error::UnknownMode { .. } => "fiber_spectrum",
            Error::InvalidGrid(_)
            | Error::GridTooCoarse { .. }
            | Error::LogGrowthObstruction { .. }
            | Error::ModeSolve { .. }
            | Error::FieldMismatch(_)
            | Error::RangeOutsideGrid { .. }
            | Error::Eigensolve(_) => "spectral_laplace",
            Error::KahlerViolation { .. }
            | Error::DecayFit(_)
            | Error::ContractionOutOfRange(_)
            | Error::InsufficientDecay(_) => "decay_bootstrap",
            Error::InvalidConstraintParams(_)
            | Error::InvalidCutoff(_)
            | Error::MisorderedSupports(_)
            | Error::GridNotRotationClosed { .. } => "ansatz_toolkit",
            Error::Serde(_) | Error::Io(_) | Error::Invalid(_) => "cli",
        }
    }
}
