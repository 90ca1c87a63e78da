use thiserror::Error;

use crate::Point;

/// Errors raised by space construction, distance-field queries, flows,
/// estimators and validators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point lies outside the space")]
    PointOutsideSpace,

    #[error("footpoint solver did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionDivergence { iterations: usize, residual: f64 },

    /// The query point sits on the medial axis; every listed boundary point
    /// realizes the distance to the boundary.
    #[error("point has {} footpoints (medial axis)", footpoints.len())]
    MultipleFootpoints { footpoints: Vec<Point> },

    #[error("sample count must be at least {min}, got {got}")]
    InvalidCount { min: usize, got: usize },

    #[error("rejection sampler starved: acceptance rate {rate:e}")]
    RejectionStarvation { rate: f64 },

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("collar depth {depth} outside {range}")]
    DepthOutOfRange { depth: f64, range: &'static str },

    #[error("cone base has no closed-form fiber metric")]
    UnsupportedBase,

    #[error("operation `{0}` is not available for this space kind")]
    Unsupported(&'static str),

    #[error("curvature audit failed: minimum principal curvature {min_curvature} < 1")]
    CurvatureAudit { min_curvature: f64 },

    #[error("gradient vanishes: flow reached the soul at rho = {rho}")]
    AtSoul { rho: f64 },

    #[error("step size collapsed to {step:e} before reaching level {target}")]
    StepCollapse { step: f64, target: f64 },

    #[error("rho decreased along a gradient curve ({before} -> {after})")]
    NonMonotone { before: f64, after: f64 },

    #[error("packing pool of {required} points exceeds the cap {cap}")]
    PoolTooSmall { required: usize, cap: usize },

    #[error("boundary mesh failed: {0}")]
    MeshFailure(String),

    #[error("chord solver failed at r = {r}")]
    ChordSolverFailure { r: f64 },

    #[error("base-angle estimates did not stabilize down to r = {r}")]
    ResolutionFloor { r: f64 },

    #[error("t = {t} outside the domain of the concavity modulus")]
    DomainError { t: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
