//! Space configuration files.
//!
//! ```toml
//! kind = "ellipsoid"
//! dimension = 3
//! curvature_class = "nonnegative"
//! allow_uncertified = true
//!
//! [parameters]
//! semi_axes = [1.0, 0.9, 0.9]
//! ```
//!
//! | kind             | parameters                                   |
//! |------------------|----------------------------------------------|
//! | `ball`           | `radius` (default 1)                         |
//! | `ellipsoid`      | `semi_axes` (length = dimension)             |
//! | `cap`            | `angular_radius` in (0, π/2]                 |
//! | `square`         | none (half-side 1)                           |
//! | `linear_cone`    | `height`, `base_radius` or `base_measure`    |
//! | `spherical_cone` | `height`, `base_radius` or `base_measure`    |
//! | `warped_collar`  | `boundary_area`, `depth`                     |
//!
//! `curvature_class` is optional; when given it must match the kind
//! (`at_least_one` for caps and spherical cones, `nonnegative` otherwise,
//! either for warped collars where it selects the warping).

use std::fs;
use std::path::{Path, PathBuf};

use collarbound::spaces::CurvatureAudit;
use collarbound::{
    make_cone, make_warped_collar, AuditPolicy, ConeBase, ConeKind, CurvatureClass, SpaceModel, Tolerances,
};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub kind: String,
    pub dimension: usize,
    #[serde(default)]
    pub curvature_class: Option<String>,
    /// Accept implicit bodies that fail the curvature audit, flagged as
    /// hypothesis-violating controls.
    #[serde(default)]
    pub allow_uncertified: bool,
    #[serde(default)]
    pub parameters: Parameters,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub radius: Option<f64>,
    pub semi_axes: Option<Vec<f64>>,
    pub angular_radius: Option<f64>,
    pub height: Option<f64>,
    pub base_radius: Option<f64>,
    pub base_measure: Option<f64>,
    pub boundary_area: Option<f64>,
    pub depth: Option<f64>,
}

/// A loaded space together with its source and audit outcome.
#[derive(Debug, Clone)]
pub struct LoadedSpace {
    pub path: PathBuf,
    pub config: SpaceConfig,
    pub space: SpaceModel,
}

impl LoadedSpace {
    /// One line per audit fact, for summaries and stderr.
    pub fn audit_report(&self) -> Vec<String> {
        let s = &self.space;
        let mut lines = vec![format!(
            "space {} ({}; n = {}; class {})",
            s.label(),
            self.path.display(),
            s.dimension(),
            class_name(s.curvature_class())
        )];
        if let Some(CurvatureAudit { samples, min_curvature, max_curvature, certified }) = s.audit().copied() {
            lines.push(format!(
                "curvature audit: {samples} boundary samples, principal curvatures in [{min_curvature:.6}, {max_curvature:.6}], {}",
                if certified { "certified" } else { "NOT certified" }
            ));
        }
        if s.hypothesis_violated() {
            lines.push("hypothesis violated: claims on this space are reported as controls".into());
        }
        lines
    }
}

pub fn class_name(c: CurvatureClass) -> &'static str {
    match c {
        CurvatureClass::NonNegative => "nonnegative",
        CurvatureClass::AtLeastOne => "at_least_one",
    }
}

fn parse_class(s: &str) -> Option<CurvatureClass> {
    match s {
        "nonnegative" | "kappa0" | "0" => Some(CurvatureClass::NonNegative),
        "at_least_one" | "kappa1" | "1" => Some(CurvatureClass::AtLeastOne),
        _ => None,
    }
}

pub fn load_space(path: &Path, tol: &Tolerances) -> CliResult<LoadedSpace> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(path, e))?;
    let config: SpaceConfig = toml::from_str(&text).map_err(|e| CliError::config(path, e))?;
    let space = build_space(&config).map_err(|m| CliError::config(path, m))?.with_tolerances(*tol);
    Ok(LoadedSpace { path: path.to_path_buf(), config, space })
}

fn need(v: Option<f64>, name: &str, kind: &str) -> Result<f64, String> {
    v.ok_or_else(|| format!("kind `{kind}` needs parameter `{name}`"))
}

pub fn build_space(c: &SpaceConfig) -> Result<SpaceModel, String> {
    let p = &c.parameters;
    let n = c.dimension;
    if n < 2 {
        return Err(format!("dimension must be at least 2, got {n}"));
    }
    let class = match &c.curvature_class {
        Some(s) => Some(parse_class(s).ok_or_else(|| format!("unknown curvature_class `{s}`"))?),
        None => None,
    };
    let cone_base = |kind: &str| -> Result<ConeBase, String> {
        match (p.base_radius, p.base_measure) {
            (Some(radius), None) => Ok(ConeBase::RoundSphere { dim: n - 1, radius }),
            (None, Some(measure)) => Ok(ConeBase::Abstract { dim: n - 1, measure }),
            _ => Err(format!("kind `{kind}` needs exactly one of `base_radius`, `base_measure`")),
        }
    };
    let space = match c.kind.as_str() {
        "ball" => SpaceModel::ball(n, p.radius.unwrap_or(1.0)),
        "ellipsoid" => {
            let axes = p.semi_axes.as_ref().ok_or("kind `ellipsoid` needs parameter `semi_axes`")?;
            if axes.len() != n {
                return Err(format!("semi_axes has {} entries for dimension {n}", axes.len()));
            }
            let policy = if c.allow_uncertified { AuditPolicy::FlagViolation } else { AuditPolicy::Require };
            SpaceModel::ellipsoid(axes, policy)
        }
        "cap" => SpaceModel::spherical_cap(n, need(p.angular_radius, "angular_radius", "cap")?),
        "square" => SpaceModel::square_control(n),
        "linear_cone" => make_cone(cone_base("linear_cone")?, ConeKind::Linear, need(p.height, "height", "linear_cone")?),
        "spherical_cone" => {
            make_cone(cone_base("spherical_cone")?, ConeKind::Spherical, need(p.height, "height", "spherical_cone")?)
        }
        "warped_collar" => make_warped_collar(
            n,
            need(p.boundary_area, "boundary_area", "warped_collar")?,
            class.unwrap_or(CurvatureClass::NonNegative),
            need(p.depth, "depth", "warped_collar")?,
        ),
        other => return Err(format!("unknown space kind `{other}`")),
    }
    .map_err(|e| e.to_string())?;
    if let Some(cl) = class {
        if cl != space.curvature_class() {
            return Err(format!(
                "curvature_class `{}` does not match kind `{}` (class {})",
                class_name(cl),
                c.kind,
                class_name(space.curvature_class())
            ));
        }
    }
    Ok(space)
}
