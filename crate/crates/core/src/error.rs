use thiserror::Error;

/// Coarse classification used by the command-line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input, bad parameters, shape mismatches.
    InvalidInput,
    /// The density is not admissible (positivity, floor, integrable inverse).
    Admissibility,
    /// The computation ran but a numerical check failed.
    Numerical,
    /// A requested accuracy cannot be reached within the allowed order.
    Unreachable,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {size} is not a power of two >= {min}")]
    InvalidGrid { size: usize, min: usize },

    #[error("band [{k_min}, {k_max}] aliases on a grid of size {grid} (need size >= {required})")]
    Aliasing {
        k_min: i64,
        k_max: i64,
        grid: usize,
        required: usize,
    },

    #[error("requested {requested} coefficients but the grid only resolves {grid}")]
    Resolution { requested: usize, grid: usize },

    #[error("grid functions live on different grids ({left} vs {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("weight is not real at node {node} (imaginary part {imag:e})")]
    NonRealWeight { node: usize, imag: f64 },

    #[error("weight {value:e} at node {node} is below the floor {floor:e}")]
    WeightFloor { node: usize, value: f64, floor: f64 },

    #[error("truncation degree {degree} too small: weight residual {residual:e} exceeds {tol:e}")]
    TruncationTooSmall {
        degree: usize,
        residual: f64,
        tol: f64,
    },

    #[error("coefficient matrices at k = {k} and k = -{k} are not conjugate transposes (deviation {deviation:e})")]
    NotHermitian { k: i64, deviation: f64 },

    #[error("{quantity} = {value:e} at grid node {node} is below the admissibility floor {floor:e}")]
    NotPositive {
        quantity: &'static str,
        node: usize,
        value: f64,
        floor: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal consistency check {relation} failed (margin {margin:e}, slack {slack:e})")]
    InternalConsistency {
        relation: &'static str,
        margin: f64,
        slack: f64,
    },

    #[error("truncation order {requested} exceeds the stored band {band} of phi; increase the phi band")]
    BandExhausted { requested: usize, band: usize },

    #[error("principal part has band [{k_min}, {k_max}], expected it inside [-{n}, -1]")]
    BandMismatch { k_min: i64, k_max: i64, n: usize },

    #[error("completion kernel has real dimension {dimension}, expected 2 (smallest singular values {singular_values:?})")]
    DegenerateKernel {
        dimension: usize,
        singular_values: Vec<f64>,
    },

    #[error("every kernel vector has a vanishing constant term; cannot normalize alpha(0) > 0")]
    NormalizationImpossible,

    #[error("unitarity residual {residual:e} exceeds tolerance {tol:e}")]
    PrecisionFailure { residual: f64, tol: f64 },

    #[error("assembled factor failed verification: {}", failed.join(", "))]
    AssemblyVerification { failed: Vec<String> },

    #[error("target {target:e} unreachable: bound at order {n_max} is {best:e}")]
    UnreachableTarget { target: f64, best: f64, n_max: usize },

    #[error("constant term of the factor is singular")]
    SingularLeading,

    #[error("factor is not normalized at the origin: {0}")]
    NotNormalized(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidGrid { .. }
            | Error::Aliasing { .. }
            | Error::Resolution { .. }
            | Error::GridMismatch { .. }
            | Error::NotHermitian { .. }
            | Error::InvalidInput(_)
            | Error::BandExhausted { .. }
            | Error::BandMismatch { .. }
            | Error::SingularLeading
            | Error::NotNormalized(_) => ErrorKind::InvalidInput,
            Error::NonRealWeight { .. } | Error::WeightFloor { .. } | Error::NotPositive { .. } => {
                ErrorKind::Admissibility
            }
            Error::TruncationTooSmall { .. }
            | Error::InternalConsistency { .. }
            | Error::DegenerateKernel { .. }
            | Error::NormalizationImpossible
            | Error::PrecisionFailure { .. }
            | Error::AssemblyVerification { .. } => ErrorKind::Numerical,
            Error::UnreachableTarget { .. } => ErrorKind::Unreachable,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
