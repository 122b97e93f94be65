use thiserror::Error;

use crate::geometry::Point;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({}, {}) is not in the domain", .0[0], .0[1])]
    PointOutsideDomain(Point),

    #[error("point ({}, {}) is not a chord endpoint reachable in the requested direction", .0[0], .0[1])]
    NotDirectionalBoundary(Point),

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("invalid Cantor ratio {0}: expected 0 < rho <= 1/3")]
    InvalidRatio(f64),

    #[error("invalid Cantor level {0}: expected 1 <= L <= 24")]
    InvalidLevel(u32),

    #[error("gaps ({0}, {1}) and ({2}, {3}) overlap or touch")]
    OverlappingGaps(f64, f64, f64, f64),

    #[error("gap ({0}, {1}) is not strictly inside ]{2}, {3}[")]
    GapOutsideRange(f64, f64, f64, f64),

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrand is not finite on the chord grid (unresolved singularity)")]
    UnresolvedSingularity,

    #[error("chord integral does not converge near ({}, {})", .0[0], .0[1])]
    DivergentChordIntegral(Point),

    #[error("paired boundary integrand is not integrable")]
    NonIntegrablePairing,

    #[error("no boundary point is reachable from two of the sampled directions")]
    InsufficientOverlap,

    #[error("function is not in H1_tr: traces disagree at {0} isolated point(s)")]
    NotInH1tr(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
