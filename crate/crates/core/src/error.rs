use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("transform is incompatible with the grid: {0}")]
    IncompatibleGrid(String),

    #[error("translation offset {value} is not a whole number of cells on axis {axis}")]
    NonIntegerOffset { axis: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("all axes must be periodic for split-step propagation")]
    NonPeriodicGrid,

    #[error("operation is only implemented for one-dimensional grids")]
    NotOneDimensional,

    #[error("zero pivot in tridiagonal solve at row {row}")]
    SolverBreakdown { row: usize },

    #[error("inverse iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("shift {shift} is an eigenvalue of the discrete Hamiltonian to working precision")]
    ShiftIsEigenvalue { shift: num_complex::Complex64 },

    #[error("field overflow at step {step}: max|psi| = {max_abs:e}; completed window M = {}", .window.half_steps())]
    FieldOverflow {
        step: i64,
        max_abs: f64,
        window: Box<crate::propagator::Trajectory>,
    },

    #[error("solver failure at step {step}: {source}")]
    Step {
        step: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("trajectory has no snapshot for {0}")]
    MissingSnapshot(String),

    #[error("pairing kind {0} requires a spatial transform")]
    MissingTransform(&'static str),

    #[error("time index {m} outside the valid range {min}..={max}")]
    IndexOutOfRange { m: i64, min: i64, max: i64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
