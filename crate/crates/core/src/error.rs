use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curve needs at least {min} markers, got {got}")]
    TooFewMarkers { min: usize, got: usize },
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },
    #[error("curve is not positively oriented (signed area {area})")]
    NotPositivelyOriented { area: f64 },
    #[error("curve is not simple: segments {first} and {second} intersect")]
    SelfIntersection { first: usize, second: usize },
    #[error("curve has zero length")]
    DegenerateCurve,
    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("point lies on the boundary (distance {distance:e})")]
    BoundaryAmbiguity { distance: f64 },
    #[error("evaluation point too close to the curve: distance {distance:e}, minimum {min:e}")]
    TooClose { distance: f64, min: f64 },
    #[error("{what} = {value} outside [{min}, {max}]")]
    OutOfRange { what: &'static str, value: f64, min: f64, max: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("origin is not strictly inside the curve")]
    OriginNotInside,
    #[error("point expected {expected} the curve")]
    WrongSide { expected: &'static str },
    #[error("no convergence after {iterations} iterations (last update {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("computational box too small: {0}")]
    BoxTooSmall(&'static str),
    #[error("grids are not aligned")]
    GridMismatch,
    #[error("linear system ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("time step violates the CFL cap: displacement {displacement:e} > {limit:e}")]
    CflViolation { displacement: f64, limit: f64 },
    #[error("negative time step requires backward mode")]
    BackwardTime,
    #[error("residue {residue:e} too small: not a quadrature domain of order 1 at the origin")]
    NotQuadratureDomain { residue: f64 },
    #[error("quadrature node {index} lies outside the domain")]
    NodeOutside { index: usize },
    #[error("map a·w + b·w² is not univalent on the disc (need a > 2|b|)")]
    NotUnivalent,
    #[error("epsilon {eps} admits no radius in the gluing recipe")]
    EpsTooLarge { eps: f64 },
    #[error("free boundary extraction failed: {0}")]
    Extraction(&'static str),
}
