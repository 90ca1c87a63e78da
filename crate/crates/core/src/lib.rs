//! Model spaces with boundary, distance-to-boundary gradient flows, and
//! numerical validators for the collar-volume, contraction, flow-time,
//! inradius and base-angle comparison bounds of spaces with curvature
//! bounded below and 1-convex boundary.

pub mod compare;
pub mod convexity;
pub mod error;
pub mod flow;
pub mod measure;
pub mod rng;
pub mod spaces;
pub mod special;
pub mod tolerances;

pub use error::{Error, Result};
pub use spaces::{
    make_cone, make_warped_collar, AuditPolicy, Capabilities, ConeBase, ConeKind, CurvatureClass, ImplicitBody,
    LevelSetQuery, Point, SpaceKind, SpaceModel,
};
pub use tolerances::Tolerances;
