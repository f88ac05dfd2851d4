use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: max |A_ij - A_ji| = {deviation:e} exceeds tolerance {tol:e}")]
    NotSymmetric { deviation: f64, tol: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix data length {len} does not match {rows} x {cols}")]
    BadShape { rows: usize, cols: usize, len: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    EigenConvergence { sweeps: usize, off: f64 },

    #[error("linear system is singular or not positive definite (pivot {pivot}); raise the ridge parameter")]
    SingularSystem { pivot: usize },

    #[error("solve residual {residual:e} exceeds 1e-8 relative; system is numerically singular, raise the ridge parameter")]
    SolveResidual { residual: f64 },

    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error("empty dataset")]
    EmptyDataset,

    #[error("unknown surface tag: {0}")]
    UnknownSurface(String),

    #[error("class {class} has {size} samples, needs more than {need}")]
    ClassTooSmall { class: usize, size: usize, need: usize },

    #[error("train fraction must lie strictly inside (0, 1), got {0}")]
    BadFraction(f64),

    #[error("split leaves class {class} without a training sample")]
    ClassWithoutTrain { class: usize },

    #[error("vertex {vertex} has zero degree in the {graph} graph")]
    ZeroDegree { vertex: usize, graph: &'static str },

    #[error("heat scale is degenerate (median neighbor distance is zero); remove duplicate points or pass an explicit scale")]
    DegenerateHeatScale,

    #[error("within-class graph of class {class} is disconnected")]
    DisconnectedClass { class: usize },

    #[error("restricting to categories isolates vertex {vertex} in the between-class graph (its category has a single class)")]
    CategoryIsolatesVertex { vertex: usize },

    #[error("degenerate Fisher embedding: within-class trace fell below 1e-12")]
    DegenerateFisher,

    #[error("exact covering search is limited to 12 points, got {0}")]
    ExactCoveringTooLarge(usize),

    #[error("invalid parameter: {0}")]
    BadParam(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
