use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series centers differ: {0} vs {1}")]
    CenterMismatch(String, String),
    #[error("division by a series with no nonzero coefficient")]
    DivisionByZeroSeries,
    #[error("inner series constant term {inner} does not match outer center {outer}")]
    IncompatibleSubstitution { inner: String, outer: String },
    #[error("order {order} outside [{ord_min}, {trunc}]")]
    OrderOutOfRange { order: i32, ord_min: i32, trunc: i32 },

    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("continuation diverged at lambda = {lambda}: residual {residual:e}")]
    ContinuationDiverged { lambda: f64, residual: f64 },
    #[error("degenerate spectrum: eps[{0}] and eps[{1}] collide")]
    DegenerateSpectrum(usize, usize),
    #[error("point {0} is a pole of R")]
    PoleOfR(String),
    #[error("polynomial root finding failed: {0}")]
    RootFindingFailed(String),
    #[error("point {0} is too close to a ramification point")]
    NearRamification(String),
    #[error("ramification point {0} is not simple")]
    NonSimpleRamification(usize),
    #[error("series order {requested} unavailable (stored {stored})")]
    OrderUnavailable { requested: usize, stored: usize },
    #[error("point {0} too close to beta")]
    PointTooCloseToBeta(String),

    #[error("point too close to a pole: {0}")]
    NearPole(String),
    #[error("diagonal singularity at {0}")]
    DiagonalSingularity(String),

    #[error("arguments hit a singular set: {0}")]
    NearSingularSet(String),
    #[error("recursion depth exceeded ({0} points)")]
    RecursionDepthExceeded(usize),
    #[error("series truncation {trunc} insufficient for pole order {pole}")]
    TruncationInsufficient { trunc: i32, pole: i32 },
    #[error("unsupported genus {0}")]
    UnsupportedGenus(usize),
    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("non-finite value produced in {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
