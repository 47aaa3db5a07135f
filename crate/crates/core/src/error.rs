//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cell decomposition has no faces")]
    EmptyDecomposition,

    #[error("edge ({0}, {1}) is incident to more than two faces")]
    EdgeTooManyFaces(usize, usize),

    #[error("inconsistent face orientation at edge ({0}, {1})")]
    InconsistentOrientation(usize, usize),

    #[error("graph is not bipartite: coloring conflict at vertex {0}")]
    NotBipartite(usize),

    #[error("face {face} is not color-alternating")]
    NotAlternating { face: usize },

    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),

    #[error("vertex {0} has no position")]
    MissingPosition(usize),

    #[error("face {face} is not a parallelogram: opposite sides differ by {defect:.3e}")]
    NotParallelogram { face: usize, defect: f64 },

    #[error("face {0} is degenerate: its two edge labels coincide")]
    DegenerateFace(usize),

    #[error("labels {0} and {1} are parallel: slope set is degenerate")]
    ParallelSlopes(usize, usize),

    #[error("edge label {re}+{im}i does not belong to the slope set")]
    UnknownSlope { re: f64, im: f64 },

    #[error("labeling is not quasicrystallic: lattice lift is inconsistent at vertex {0}")]
    InconsistentLift(usize),

    #[error("empty point set has no hull")]
    EmptyHull,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {0:?} lies outside sector {1}")]
    OutsideSector(Vec<i64>, i64),

    #[error("evaluation at a pole of the discrete exponential (axis {0})")]
    ExponentialPole(usize),

    #[error("exponent gamma = {0} must lie strictly inside (0, 1)")]
    GammaOutOfRange(f64),

    #[error("degenerate elementary step: vanishing denominator at {0:?}")]
    DegenerateStep(Vec<i64>),

    #[error("function is not discrete holomorphic: residual {residual:.3e} exceeds {tol:.3e}")]
    NotHolomorphic { residual: f64, tol: f64 },

    #[error("extension cannot reach point {0:?}: insufficient known neighbors")]
    ExtensionStuck(Vec<i64>),

    #[error("contour radius factor {0} would let loops overlap two poles")]
    OverlappingLoops(f64),

    #[error("weight is missing on edge ({0}, {1})")]
    MissingWeight(usize, usize),

    #[error("function is undefined at vertex {0}")]
    MissingValue(usize),

    #[error(
        "propagation mismatch at vertex {vertex}: defect {defect:.3e} (input does not solve the system)"
    )]
    PropagationMismatch { vertex: usize, defect: f64 },

    #[error("face {face} closure defect {defect:.3e} exceeds tolerance (input does not solve the system)")]
    ClosureDefect { face: usize, defect: f64 },

    #[error("base vertex {0} must be black")]
    BaseNotBlack(usize),

    #[error("kite condition violated on face {face}: defect {defect:.3e}")]
    NotKite { face: usize, defect: f64 },

    #[error("zero value at vertex {0} where a nonvanishing function is required")]
    ZeroValue(usize),

    #[error("unsupported schema version {got}, this build reads version {expected}")]
    UnsupportedVersion { got: u32, expected: u32 },

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error("missing payload '{0}' in document")]
    MissingPayload(String),

    #[error("multigrid offsets from seed {0} stay non-generic after re-jittering")]
    NonGenericOffsets(u64),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
