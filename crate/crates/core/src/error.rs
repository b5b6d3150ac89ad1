use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dense dimension {dim} exceeds the configured cap {cap}; use the antisymmetric-subspace path")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("incompatible operator spaces: {0}")]
    IncompatibleSpaces(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("operator is not Hermitian (deviation {deviation:.3e} in operator norm)")]
    NotHermitian { deviation: f64 },

    #[error("not a density operator: {0}")]
    NotDensity(String),

    #[error("orbitals are not orthonormal (Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("pair potential does not commute with the transposition (deviation {deviation:.3e})")]
    NotTranspositionSymmetric { deviation: f64 },

    #[error("invalid particle count: N = {n} with single-particle dimension {d}")]
    InvalidParticleCount { d: usize, n: usize },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("time step must be positive, got {0}")]
    InvalidTimeStep(f64),

    #[error("trajectory has {0} samples, at least 3 are required")]
    TooFewSamples(usize),

    #[error("time grids do not match: {0}")]
    GridMismatch(String),

    #[error("scaled time T = {0} is not below 1; the a-priori bound does not apply")]
    BoundInapplicable(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
