use thiserror::Error;

/// Errors raised by the geometric and numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points coincide projectively")]
    CoincidentPoints,
    #[error("lines coincide projectively")]
    CoincidentLines,
    #[error("the infinity line has no point at infinity of its own")]
    InfinityLine,
    #[error("isotropic axis: the symmetry is undefined")]
    IsotropicAxis,
    #[error("point lies at infinity")]
    PointAtInfinity,
    #[error("point is not incident to the line")]
    NotIncident,
    #[error("singular point: the gradient vanishes, branch data required")]
    SingularPoint,
    #[error("point is not on the curve (|F| = {0:e})")]
    NotOnCurve(f64),
    #[error("line is contained in the curve")]
    LineContainedInCurve,
    #[error("Newton iteration diverged")]
    Divergence,
    #[error("elimination failed: {0}")]
    Elimination(String),
    #[error("invalid mirror: {0}")]
    InvalidMirror(String),
    #[error("mirror is an isotropic line")]
    IsotropicMirror,
    #[error("invalid billiard: {0}")]
    InvalidBilliard(String),
    #[error("coincident consecutive vertices at index {0}")]
    CoincidentVertices(usize),
    #[error("vertex {0} lies at infinity")]
    VertexAtInfinity(usize),
    #[error("solver did not converge (max residual {0:e})")]
    NotConverged(f64),
    #[error("tangential configuration: line is tangent to the mirror")]
    Tangential,
    #[error("q_ab lands off the third mirror (distance {0:e})")]
    NoClosure(f64),
    #[error("degenerate angle at vertex {0}")]
    DegenerateAngle(usize),
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("construction self-check failed: {0}")]
    SelfCheck(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
