//! Catalog of concrete spaces with boundary and their distance-to-boundary
//! field `rho`.
//!
//! Point charts per kind:
//!
//! * Euclidean kinds (ball, implicit convex body, square control): ambient
//!   coordinates in `R^n`.
//! * Spherical caps: unit vectors in `R^{n+1}`; the cap is centered at the
//!   last coordinate axis.
//! * Cones over round spheres: `[t, u_0, .., u_k]` with `t` the cone
//!   parameter (`0` at the apex) and `u` a unit vector of the fiber sphere.
//! * Warped collars carry measures only and have no point chart.

mod implicit;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;

pub use implicit::{principal_curvatures, tangent_basis, CurvatureAudit, ImplicitBody};
pub(crate) use implicit::ConvexBody;

use crate::error::{Error, Result};
use crate::rng;
use crate::tolerances::Tolerances;

pub type Point = DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    EuclideanBall,
    EuclideanConvexBody,
    SphericalCap,
    WarpedProductCollar,
    LinearCone,
    SphericalCone,
    SquareControl,
}

/// Lower curvature bound of the catalog space: `κ = 0` or `κ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurvatureClass {
    NonNegative,
    AtLeastOne,
}

impl CurvatureClass {
    pub fn kappa(self) -> f64 {
        match self {
            Self::NonNegative => 0.0,
            Self::AtLeastOne => 1.0,
        }
    }

    /// Warping factor of the comparison collar at depth `t`: `1 - t` or `cos t`.
    pub fn warping(self, t: f64) -> f64 {
        match self {
            Self::NonNegative => 1.0 - t,
            Self::AtLeastOne => t.cos(),
        }
    }

    /// Largest inradius allowed under the curvature hypothesis.
    pub fn max_inradius(self) -> f64 {
        match self {
            Self::NonNegative => 1.0,
            Self::AtLeastOne => FRAC_PI_2,
        }
    }

    /// `∫₀^r warping(t)^{n-1} dt`.
    pub fn collar_integral(self, n: usize, r: f64) -> f64 {
        match self {
            Self::NonNegative => crate::special::linear_power_integral(n - 1, r),
            Self::AtLeastOne => crate::special::cos_power_integral(n - 1, r),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConeBase {
    /// Round sphere `S^dim` of the given radius; full metric support.
    RoundSphere { dim: usize, radius: f64 },
    /// A base known only through its dimension and measure.
    Abstract { dim: usize, measure: f64 },
}

impl ConeBase {
    pub fn dim(&self) -> usize {
        match self {
            Self::RoundSphere { dim, .. } | Self::Abstract { dim, .. } => *dim,
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Self::RoundSphere { dim, radius } => crate::special::sphere_area(*dim) * radius.powi(*dim as i32),
            Self::Abstract { measure, .. } => *measure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    Linear,
    Spherical,
}

/// How a failed curvature audit is handled when building an implicit body.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditPolicy {
    /// Construction fails unless every sampled principal curvature is ≥ 1.
    Require,
    /// Construction succeeds; the space is flagged as violating the hypothesis.
    FlagViolation,
}

/// What a space kind supports beyond closed-form measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capabilities {
    pub metric: bool,
    pub sampling: bool,
    pub monte_carlo: bool,
    pub chords: bool,
}

#[derive(Debug, Clone)]
enum Geometry {
    Ball { radius: f64 },
    Convex(Arc<ConvexBody>),
    Cap { angular_radius: f64 },
    Collar { boundary_area: f64, depth: f64 },
    Cone { base: ConeBase, kind: ConeKind, height: f64 },
    Square { half_side: f64 },
}

/// A boundary point realizing a local minimum (or near-minimum) of the
/// distance from a query point, with the unit direction at the query point
/// pointing away from it.
#[derive(Debug, Clone)]
pub struct FootpointCandidate {
    pub point: Point,
    pub distance: f64,
    pub ascent: Point,
}

#[derive(Debug, Clone)]
pub(crate) struct Footpoints {
    pub candidates: Vec<FootpointCandidate>,
    pub soul: bool,
}

/// Sets attached to a level `t` of `rho`: the sublevel set `rho ≤ t`, the
/// superlevel set `rho ≥ t` and the level set `rho = t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSetQuery {
    pub t: f64,
}

impl LevelSetQuery {
    pub fn new(space: &SpaceModel, t: f64) -> Result<Self> {
        let a = space.inradius_hint().unwrap_or(f64::INFINITY);
        if !(0.0..=a).contains(&t) {
            return Err(Error::OutOfRange { name: "t", value: t, range: "[0, inradius]" });
        }
        Ok(Self { t })
    }

    pub fn in_sublevel(&self, rho: f64) -> bool {
        rho <= self.t
    }

    pub fn in_superlevel(&self, rho: f64) -> bool {
        rho >= self.t
    }

    pub fn on_level(&self, rho: f64, tol: f64) -> bool {
        (rho - self.t).abs() <= tol
    }
}

/// A concrete metric space with boundary from the catalog.
#[derive(Debug, Clone)]
pub struct SpaceModel {
    geometry: Geometry,
    dimension: usize,
    curvature: CurvatureClass,
    inradius_hint: Option<f64>,
    hypothesis_violated: bool,
    audit: Option<CurvatureAudit>,
    tol: Tolerances,
}

const SOUL_EPS: f64 = 1e-12;

impl SpaceModel {
    fn build(geometry: Geometry, dimension: usize, curvature: CurvatureClass, inradius: Option<f64>) -> Self {
        Self {
            geometry,
            dimension,
            curvature,
            inradius_hint: inradius,
            hypothesis_violated: false,
            audit: None,
            tol: Tolerances::default(),
        }
    }

    /// Euclidean `n`-ball. Its boundary is 1-convex iff `radius ≤ 1`.
    pub fn ball(dimension: usize, radius: f64) -> Result<Self> {
        check_dimension(dimension)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::OutOfRange { name: "radius", value: radius, range: "(0, inf)" });
        }
        let mut s = Self::build(Geometry::Ball { radius }, dimension, CurvatureClass::NonNegative, Some(radius));
        s.hypothesis_violated = radius > 1.0;
        Ok(s)
    }

    /// Implicit convex body `{g ≤ 0}`; runs the boundary curvature audit.
    pub fn convex_body(body: ImplicitBody, policy: AuditPolicy) -> Result<Self> {
        let dimension = body.dimension();
        check_dimension(dimension)?;
        let inradius = body.inradius();
        let cb = ConvexBody::new(body);
        let audit = cb.audit();
        if !audit.certified && policy == AuditPolicy::Require {
            return Err(Error::CurvatureAudit { min_curvature: audit.min_curvature });
        }
        let mut s = Self::build(Geometry::Convex(Arc::new(cb)), dimension, CurvatureClass::NonNegative, inradius);
        s.hypothesis_violated = !audit.certified;
        s.audit = Some(audit);
        Ok(s)
    }

    pub fn ellipsoid(semi_axes: &[f64], policy: AuditPolicy) -> Result<Self> {
        Self::convex_body(ImplicitBody::ellipsoid(semi_axes)?, policy)
    }

    /// Geodesic ball of angular radius `R ∈ (0, π/2]` in the unit sphere `S^n`.
    pub fn spherical_cap(dimension: usize, angular_radius: f64) -> Result<Self> {
        check_dimension(dimension)?;
        if !(angular_radius > 0.0 && angular_radius <= FRAC_PI_2 + 1e-15) {
            return Err(Error::OutOfRange { name: "angular_radius", value: angular_radius, range: "(0, pi/2]" });
        }
        let r = angular_radius.min(FRAC_PI_2);
        Ok(Self::build(Geometry::Cap { angular_radius: r }, dimension, CurvatureClass::AtLeastOne, Some(r)))
    }

    /// The cube `[-1, 1]^n`: flat faces, so its boundary is only 0-convex.
    pub fn square_control(dimension: usize) -> Result<Self> {
        check_dimension(dimension)?;
        let mut s = Self::build(Geometry::Square { half_side: 1.0 }, dimension, CurvatureClass::NonNegative, Some(1.0));
        s.hypothesis_violated = true;
        Ok(s)
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn kind(&self) -> SpaceKind {
        match &self.geometry {
            Geometry::Ball { .. } => SpaceKind::EuclideanBall,
            Geometry::Convex(_) => SpaceKind::EuclideanConvexBody,
            Geometry::Cap { .. } => SpaceKind::SphericalCap,
            Geometry::Collar { .. } => SpaceKind::WarpedProductCollar,
            Geometry::Cone { kind: ConeKind::Linear, .. } => SpaceKind::LinearCone,
            Geometry::Cone { kind: ConeKind::Spherical, .. } => SpaceKind::SphericalCone,
            Geometry::Square { .. } => SpaceKind::SquareControl,
        }
    }

    /// Intrinsic dimension `n`.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Length of the coordinate vectors of this space's chart.
    pub fn ambient_dimension(&self) -> usize {
        match &self.geometry {
            Geometry::Cap { .. } => self.dimension + 1,
            Geometry::Cone { base, .. } => base.dim() + 2,
            _ => self.dimension,
        }
    }

    pub fn curvature_class(&self) -> CurvatureClass {
        self.curvature
    }

    /// Maximum of `rho`, when known in closed form.
    pub fn inradius_hint(&self) -> Option<f64> {
        self.inradius_hint
    }

    pub fn hypothesis_violated(&self) -> bool {
        self.hypothesis_violated
    }

    pub fn audit(&self) -> Option<&CurvatureAudit> {
        self.audit.as_ref()
    }

    pub fn implicit_body(&self) -> Option<&ImplicitBody> {
        match &self.geometry {
            Geometry::Convex(cb) => Some(&cb.body),
            _ => None,
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        match &self.geometry {
            Geometry::Ball { .. } | Geometry::Convex(_) | Geometry::Square { .. } | Geometry::Cap { .. } => {
                Capabilities { metric: true, sampling: true, monte_carlo: true, chords: true }
            }
            Geometry::Cone { base: ConeBase::RoundSphere { .. }, .. } => {
                Capabilities { metric: true, sampling: true, monte_carlo: false, chords: false }
            }
            Geometry::Cone { .. } | Geometry::Collar { .. } => {
                Capabilities { metric: false, sampling: false, monte_carlo: false, chords: false }
            }
        }
    }

    pub fn label(&self) -> String {
        let n = self.dimension;
        match &self.geometry {
            Geometry::Ball { radius } => format!("ball(n={n},R={radius})"),
            Geometry::Convex(cb) => cb.body.label(),
            Geometry::Cap { angular_radius } => format!("cap(n={n},R={angular_radius:.6})"),
            Geometry::Collar { boundary_area, depth } => {
                format!("collar(n={n},k={},A0={boundary_area},r={depth})", self.curvature.kappa())
            }
            Geometry::Cone { base, kind, height } => {
                let k = if *kind == ConeKind::Linear { "linear" } else { "spherical" };
                match base {
                    ConeBase::RoundSphere { dim, radius } => format!("{k}_cone(S^{dim}(r={radius}),T={height})"),
                    ConeBase::Abstract { dim, measure } => format!("{k}_cone(V^{dim}(mu={measure}),T={height})"),
                }
            }
            Geometry::Square { .. } => format!("square_control(n={n})"),
        }
    }

    /// Cone parameters when this space is a cone.
    pub fn cone(&self) -> Option<(&ConeBase, ConeKind, f64)> {
        match &self.geometry {
            Geometry::Cone { base, kind, height } => Some((base, *kind, *height)),
            _ => None,
        }
    }

    /// `(boundary_area, depth)` when this space is a warped collar.
    pub fn collar(&self) -> Option<(f64, f64)> {
        match &self.geometry {
            Geometry::Collar { boundary_area, depth } => Some((*boundary_area, *depth)),
            _ => None,
        }
    }

    pub(crate) fn ball_radius(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::Ball { radius } => Some(*radius),
            _ => None,
        }
    }

    pub(crate) fn cap_radius(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::Cap { angular_radius } => Some(*angular_radius),
            _ => None,
        }
    }

    pub(crate) fn square_half_side(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::Square { half_side } => Some(*half_side),
            _ => None,
        }
    }

    fn require_metric(&self, op: &'static str) -> Result<()> {
        match &self.geometry {
            Geometry::Collar { .. } => Err(Error::Unsupported(op)),
            Geometry::Cone { base: ConeBase::Abstract { .. }, .. } => Err(Error::UnsupportedBase),
            _ => Ok(()),
        }
    }

    /// Membership test in this space's chart.
    pub fn contains(&self, x: &Point) -> bool {
        if x.len() != self.ambient_dimension() {
            return false;
        }
        match &self.geometry {
            Geometry::Ball { radius } => x.norm() <= radius * (1.0 + 1e-12),
            Geometry::Convex(cb) => cb.body.value(x.as_slice()) <= 1e-12,
            Geometry::Square { half_side } => x.amax() <= half_side * (1.0 + 1e-12),
            Geometry::Cap { angular_radius } => {
                (x.norm() - 1.0).abs() <= 1e-9 && polar_angle(x) <= angular_radius + 1e-12
            }
            Geometry::Cone { height, .. } => {
                let t = x[0];
                let u = x.rows(1, x.len() - 1);
                (-1e-12..=height * (1.0 + 1e-12)).contains(&t) && (u.norm() - 1.0).abs() <= 1e-9
            }
            Geometry::Collar { .. } => false,
        }
    }

    /// Distance from `x` to the boundary in the intrinsic metric.
    pub fn rho(&self, x: &Point) -> Result<f64> {
        self.require_metric("rho")?;
        if !self.contains(x) {
            return Err(Error::PointOutsideSpace);
        }
        Ok(self.rho_unchecked(x)?.max(0.0))
    }

    pub(crate) fn rho_unchecked(&self, x: &Point) -> Result<f64> {
        Ok(match &self.geometry {
            Geometry::Ball { radius } => radius - x.norm(),
            Geometry::Square { half_side } => half_side - x.amax(),
            Geometry::Cap { angular_radius } => angular_radius - polar_angle(x),
            Geometry::Cone { height, .. } => height - x[0],
            Geometry::Convex(cb) => cb.stationary_points(x.as_slice(), 0.0, &self.tol)?[0].distance,
            Geometry::Collar { .. } => return Err(Error::Unsupported("rho")),
        })
    }

    /// Bounds on `rho(x)` for a point known to lie in the space; exact for
    /// analytic kinds.
    pub(crate) fn rho_bracket(&self, x: &Point) -> Result<(f64, f64)> {
        match &self.geometry {
            Geometry::Convex(cb) => Ok(cb.body.rho_bracket(x.as_slice())),
            _ => {
                let r = self.rho_unchecked(x)?.max(0.0);
                Ok((r, r))
            }
        }
    }

    /// Whether `rho(x) ≤ r`, evaluating the footpoint solver only when the
    /// cheap bracket straddles `r`.
    pub(crate) fn rho_at_most(&self, x: &Point, r: f64) -> Result<bool> {
        let (lo, hi) = self.rho_bracket(x)?;
        if hi <= r {
            return Ok(true);
        }
        if lo > r {
            return Ok(false);
        }
        Ok(self.rho_unchecked(x)?.max(0.0) <= r)
    }

    /// A boundary point at distance of order `delta` from the boundary point `p`,
    /// in a uniformly random tangent direction.
    pub(crate) fn boundary_neighbor(&self, p: &Point, delta: f64, rng: &mut impl Rng) -> Result<Point> {
        let n = self.ambient_dimension();
        match &self.geometry {
            Geometry::Ball { radius } => {
                let u = p / p.norm();
                let w = random_tangent(rng, &u, None);
                let q = p + w * delta;
                Ok(&q / q.norm() * *radius)
            }
            Geometry::Convex(cb) => {
                let normal = Point::from_vec(cb.outward_normal(p.as_slice()));
                let w = random_tangent(rng, &normal, None);
                let mut q: Vec<f64> = (p + w * delta).iter().cloned().collect();
                for _ in 0..4 {
                    cb.project_to_surface(&mut q);
                }
                Ok(Point::from_vec(q))
            }
            Geometry::Square { half_side } => {
                // stay on the face of the nearest side
                let face = p.iamax();
                let mut e = Point::zeros(n);
                e[face] = 1.0;
                let w = random_tangent(rng, &e, None);
                let mut q = p + w * delta;
                for i in 0..n {
                    if i != face {
                        q[i] = q[i].clamp(-half_side, *half_side);
                    }
                }
                Ok(q)
            }
            Geometry::Cap { angular_radius } => {
                let pole = north(n);
                let mut perp = p.clone();
                perp[n - 1] = 0.0;
                let e = &perp / perp.norm();
                let w = random_tangent(rng, &e, Some(&pole));
                let e2 = &e + w * (delta / angular_radius.sin());
                let e2 = &e2 / e2.norm();
                Ok(&pole * angular_radius.cos() + e2 * angular_radius.sin())
            }
            Geometry::Cone { base: ConeBase::RoundSphere { radius, .. }, height, .. } => {
                let k = n - 1;
                let u = Point::from_iterator(k, p.iter().skip(1).cloned());
                let w = random_tangent(rng, &u, None);
                let u2 = &u + w * (delta / (radius * height));
                Ok(cone_point(*height, &u2 / u2.norm()))
            }
            _ => Err(Error::Unsupported("boundary_neighbor")),
        }
    }

    /// `rho(x) - t` inside the space and `-1` outside; the sign tells on
    /// which side of the superlevel set `rho ≥ t` the point lies.
    pub(crate) fn level_excess(&self, x: &Point, t: f64) -> Result<f64> {
        if !self.contains(x) {
            return Ok(-1.0);
        }
        Ok(self.rho_unchecked(x)?.max(0.0) - t)
    }

    /// Intrinsic distance between two points of the space.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.require_metric("distance")?;
        Ok(match &self.geometry {
            Geometry::Ball { .. } | Geometry::Convex(_) | Geometry::Square { .. } => (x - y).norm(),
            Geometry::Cap { .. } => great_circle(x, y),
            Geometry::Cone { base: ConeBase::RoundSphere { radius, .. }, kind, .. } => {
                let (t1, t2) = (x[0].max(0.0), y[0].max(0.0));
                let u1 = x.rows(1, x.len() - 1);
                let u2 = y.rows(1, y.len() - 1);
                let beta = (radius * 2.0 * ((u1 - u2).norm() / 2.0).min(1.0).asin()).min(PI);
                match kind {
                    ConeKind::Linear => {
                        // law of cosines, written to stay accurate for close points
                        let d2 = (t1 - t2).powi(2) + 4.0 * t1 * t2 * (beta / 2.0).sin().powi(2);
                        d2.max(0.0).sqrt()
                    }
                    ConeKind::Spherical => {
                        let hav = ((t1 - t2) / 2.0).sin().powi(2) + t1.sin() * t2.sin() * (beta / 2.0).sin().powi(2);
                        2.0 * hav.max(0.0).sqrt().min(1.0).asin()
                    }
                }
            }
            _ => return Err(Error::UnsupportedBase),
        })
    }

    /// Nearest boundary point. Fails with [`Error::MultipleFootpoints`] on the
    /// medial axis.
    pub fn footpoint(&self, x: &Point) -> Result<Point> {
        self.require_metric("footpoint")?;
        if !self.contains(x) {
            return Err(Error::PointOutsideSpace);
        }
        let fp = self.footpoint_candidates(x, self.tol.medial_rho)?;
        if fp.soul {
            return Err(Error::MultipleFootpoints {
                footpoints: fp.candidates.into_iter().map(|c| c.point).collect(),
            });
        }
        let active = distinct_active(&fp.candidates, self.tol.medial_rho, self.tol.medial_separation);
        if active.len() > 1 {
            return Err(Error::MultipleFootpoints { footpoints: active.into_iter().map(|c| c.point).collect() });
        }
        Ok(fp.candidates[0].point.clone())
    }

    /// Boundary stationary points sorted by distance. Candidates farther than
    /// `best + band` may be omitted.
    pub(crate) fn footpoint_candidates(&self, x: &Point, band: f64) -> Result<Footpoints> {
        let n = self.ambient_dimension();
        match &self.geometry {
            Geometry::Ball { radius } => {
                let r = x.norm();
                if r <= SOUL_EPS * radius {
                    let candidates = axis_pairs(n)
                        .map(|e| FootpointCandidate { point: &e * *radius, distance: *radius, ascent: -e })
                        .collect();
                    return Ok(Footpoints { candidates, soul: true });
                }
                let dir = x / r;
                Ok(single(FootpointCandidate { point: &dir * *radius, distance: radius - r, ascent: -dir }))
            }
            Geometry::Square { half_side } => {
                let mut candidates: Vec<FootpointCandidate> = Vec::with_capacity(2 * n);
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut p = x.clone();
                        p[i] = sign * half_side;
                        let mut ascent = Point::zeros(n);
                        ascent[i] = -sign;
                        candidates.push(FootpointCandidate { point: p, distance: half_side - sign * x[i], ascent });
                    }
                }
                candidates.sort_by(|a, b| a.distance.total_cmp(&b.distance));
                Ok(Footpoints { candidates, soul: false })
            }
            Geometry::Cap { angular_radius } => {
                let pole = north(n);
                let theta = polar_angle(x);
                let (c, s) = (angular_radius.cos(), angular_radius.sin());
                if theta <= SOUL_EPS {
                    let candidates = axis_pairs(n - 1)
                        .map(|e| {
                            let e = e.push(0.0);
                            FootpointCandidate { point: &pole * c + &e * s, distance: *angular_radius, ascent: -e }
                        })
                        .collect();
                    return Ok(Footpoints { candidates, soul: true });
                }
                let mut perp = x.clone();
                perp[n - 1] = 0.0;
                let e = &perp / perp.norm();
                let point = &pole * c + &e * s;
                let ascent = &pole * theta.sin() - &e * theta.cos();
                Ok(single(FootpointCandidate { point, distance: angular_radius - theta, ascent }))
            }
            Geometry::Cone { height, .. } => {
                let mut point = x.clone();
                point[0] = *height;
                let mut ascent = Point::zeros(n);
                ascent[0] = -1.0;
                let soul = x[0] <= SOUL_EPS * height;
                Ok(Footpoints { candidates: vec![FootpointCandidate { point, distance: height - x[0], ascent }], soul })
            }
            Geometry::Convex(cb) => {
                let sols = cb.stationary_points(x.as_slice(), band, &self.tol)?;
                let scale = 1.0 + x.norm();
                let candidates = sols
                    .into_iter()
                    .map(|s| {
                        let point = Point::from_vec(s.point);
                        let ascent = if s.distance > 1e-12 * scale {
                            (x - &point) / s.distance
                        } else {
                            -Point::from_vec(cb.outward_normal(point.as_slice()))
                        };
                        FootpointCandidate { point, distance: s.distance, ascent }
                    })
                    .collect();
                Ok(Footpoints { candidates, soul: false })
            }
            Geometry::Collar { .. } => Err(Error::Unsupported("footpoint")),
        }
    }

    /// Projects an ambient vector onto the chart's tangent space at `x`.
    pub(crate) fn tangent_project(&self, x: &Point, v: &Point) -> Point {
        match &self.geometry {
            Geometry::Cap { .. } => v - x * x.dot(v),
            Geometry::Cone { .. } => {
                let mut out = v.clone();
                let k = x.len() - 1;
                let u = x.rows(1, k);
                let c = u.dot(&v.rows(1, k));
                for i in 0..k {
                    out[i + 1] -= c * u[i];
                }
                out
            }
            _ => v.clone(),
        }
    }

    /// Maps a nearby ambient vector back onto the chart.
    pub(crate) fn retract(&self, mut x: Point) -> Point {
        match &self.geometry {
            Geometry::Cap { .. } => {
                let n = x.norm();
                x / n
            }
            Geometry::Cone { .. } => {
                let k = x.len() - 1;
                let n = x.rows(1, k).norm();
                for i in 0..k {
                    x[i + 1] /= n;
                }
                x[0] = x[0].max(0.0);
                x
            }
            _ => x,
        }
    }

    /// Geodesic from `p` with initial unit direction `w`, evaluated at length `r`
    /// (straight lines and great circles).
    pub(crate) fn geodesic_point(&self, p: &Point, w: &Point, r: f64) -> Result<Point> {
        match &self.geometry {
            Geometry::Ball { .. } | Geometry::Convex(_) | Geometry::Square { .. } => Ok(p + w * r),
            Geometry::Cap { .. } => Ok(p * r.cos() + w * r.sin()),
            _ => Err(Error::Unsupported("chords")),
        }
    }

    pub(crate) fn enclosing_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let n = self.dimension;
        match &self.geometry {
            Geometry::Ball { radius } => Some((vec![-radius; n], vec![*radius; n])),
            Geometry::Square { half_side } => Some((vec![-half_side; n], vec![*half_side; n])),
            Geometry::Convex(cb) => Some(cb.body.bounding_box()),
            _ => None,
        }
    }

    /// `count` i.i.d. uniform samples of the interior.
    pub fn sample_interior(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        check_count(count)?;
        self.require_metric("sample_interior")?;
        let mut rng = rng::stream(seed, 0);
        match &self.geometry {
            Geometry::Cap { .. } => {
                let n = self.ambient_dimension();
                rejection(count, || {
                    let x = rng::unit_vector(&mut rng, n);
                    self.contains(&x).then_some(x)
                })
            }
            Geometry::Cone { base, kind, height } => {
                let k = base.dim();
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let t = match kind {
                        ConeKind::Linear => height * rng.random::<f64>().powf(1.0 / (k as f64 + 1.0)),
                        ConeKind::Spherical => {
                            let peak = height.min(FRAC_PI_2).sin().powi(k as i32);
                            let t = height * rng.random::<f64>();
                            if rng.random::<f64>() * peak > t.sin().powi(k as i32) {
                                continue;
                            }
                            t
                        }
                    };
                    out.push(cone_point(t, rng::unit_vector(&mut rng, k + 1)));
                }
                Ok(out)
            }
            _ => {
                let (lo, hi) = self.enclosing_box().expect("euclidean kinds have a box");
                rejection(count, || {
                    let x = Point::from_iterator(lo.len(), lo.iter().zip(&hi).map(|(l, h)| rng.random_range(*l..*h)));
                    self.contains(&x).then_some(x)
                })
            }
        }
    }

    /// `count` i.i.d. samples of the boundary, uniform in boundary area.
    pub fn sample_boundary(&self, count: usize, seed: u64) -> Result<Vec<Point>> {
        check_count(count)?;
        self.require_metric("sample_boundary")?;
        let mut rng = rng::stream(seed, 0);
        let n = self.ambient_dimension();
        match &self.geometry {
            Geometry::Ball { radius } => Ok((0..count).map(|_| rng::unit_vector(&mut rng, n) * *radius).collect()),
            Geometry::Square { half_side } => Ok((0..count).map(|_| cube_face_point(&mut rng, n, *half_side)).collect()),
            Geometry::Cap { angular_radius } => {
                Ok((0..count).map(|_| cap_circle_point(&mut rng, n, *angular_radius)).collect())
            }
            Geometry::Cone { base, height, .. } => {
                Ok((0..count).map(|_| cone_point(*height, rng::unit_vector(&mut rng, base.dim() + 1))).collect())
            }
            Geometry::Convex(cb) => match &cb.body {
                ImplicitBody::Ellipsoid { semi_axes } => {
                    // map the round sphere onto the ellipsoid and thin by the
                    // area element ratio |D^{-1} u| / max |D^{-1} u|
                    let amin = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
                    rejection(count, || {
                        let u = rng::unit_vector(&mut rng, n);
                        let w = u.iter().zip(semi_axes).map(|(ui, a)| (ui / a).powi(2)).sum::<f64>().sqrt();
                        (rng.random::<f64>() < w * amin)
                            .then(|| Point::from_iterator(n, u.iter().zip(semi_axes).map(|(ui, a)| ui * a)))
                    })
                }
            },
            Geometry::Collar { .. } => unreachable!("rejected by require_metric"),
        }
    }

    /// `count` samples of the level set `rho = t`. Analytic kinds sample it
    /// uniformly; implicit bodies transport boundary samples along the
    /// level-to-level flow.
    pub fn sample_level_set(&self, t: f64, count: usize, seed: u64) -> Result<Vec<Point>> {
        check_count(count)?;
        self.require_metric("sample_level_set")?;
        let a = self.inradius_hint.unwrap_or(f64::INFINITY);
        if !(t >= 0.0 && t < a) {
            return Err(Error::OutOfRange { name: "t", value: t, range: "[0, inradius)" });
        }
        let mut rng = rng::stream(seed, 0);
        let n = self.ambient_dimension();
        match &self.geometry {
            Geometry::Ball { radius } => {
                Ok((0..count).map(|_| rng::unit_vector(&mut rng, n) * (radius - t)).collect())
            }
            Geometry::Square { half_side } => {
                Ok((0..count).map(|_| cube_face_point(&mut rng, n, half_side - t)).collect())
            }
            Geometry::Cap { angular_radius } => {
                Ok((0..count).map(|_| cap_circle_point(&mut rng, n, angular_radius - t)).collect())
            }
            Geometry::Cone { base, height, .. } => {
                Ok((0..count).map(|_| cone_point(height - t, rng::unit_vector(&mut rng, base.dim() + 1))).collect())
            }
            Geometry::Convex(_) => {
                let starts = self.sample_boundary(count, seed)?;
                let step = self.default_step();
                starts
                    .iter()
                    .map(|p| crate::flow::sharafutdinov_flow(self, p, t, step).map(|c| c.endpoint().clone()))
                    .collect()
            }
            Geometry::Collar { .. } => unreachable!("rejected by require_metric"),
        }
    }

    /// Default integrator step: `step_fraction · inradius`.
    pub fn default_step(&self) -> f64 {
        self.tol.step_fraction * self.inradius_hint.unwrap_or(1.0)
    }
}

/// Builds a cone `[0, T] ×_t V` (linear) or `[0, T] ×_{sin t} V` (spherical)
/// whose boundary is the base copy at `t = T`.
pub fn make_cone(base: ConeBase, kind: ConeKind, height: f64) -> Result<SpaceModel> {
    match kind {
        ConeKind::Linear if !(height > 0.0 && height.is_finite()) => {
            return Err(Error::OutOfRange { name: "T", value: height, range: "(0, inf)" })
        }
        ConeKind::Spherical if !(height > 0.0 && height <= PI) => {
            return Err(Error::OutOfRange { name: "T", value: height, range: "(0, pi]" })
        }
        _ => {}
    }
    let k = base.dim();
    if k == 0 {
        return Err(Error::Invalid("cone base must have dimension ≥ 1".into()));
    }
    let violated = match &base {
        ConeBase::RoundSphere { radius, .. } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(Error::OutOfRange { name: "radius", value: *radius, range: "(0, inf)" });
            }
            *radius > 1.0
        }
        ConeBase::Abstract { measure, .. } => {
            if !(*measure > 0.0 && measure.is_finite()) {
                return Err(Error::OutOfRange { name: "measure", value: *measure, range: "(0, inf)" });
            }
            false
        }
    };
    let curvature = match kind {
        ConeKind::Linear => CurvatureClass::NonNegative,
        ConeKind::Spherical => CurvatureClass::AtLeastOne,
    };
    let mut s = SpaceModel::build(Geometry::Cone { base, kind, height }, k + 1, curvature, Some(height));
    s.hypothesis_violated = violated
        || match kind {
            ConeKind::Linear => height > 1.0,
            ConeKind::Spherical => height > FRAC_PI_2,
        };
    Ok(s)
}

/// Synthetic equality-model collar `∂X ×_{1-t} [0, r]` (κ = 0) or
/// `∂Y ×_{cos t} [0, r]` (κ = 1) over a boundary of the given area.
pub fn make_warped_collar(
    dimension: usize,
    boundary_area: f64,
    curvature: CurvatureClass,
    depth: f64,
) -> Result<SpaceModel> {
    check_dimension(dimension)?;
    if !(boundary_area > 0.0 && boundary_area.is_finite()) {
        return Err(Error::OutOfRange { name: "boundary_area", value: boundary_area, range: "(0, inf)" });
    }
    let (ok, range) = match curvature {
        CurvatureClass::NonNegative => (depth > 0.0 && depth <= 1.0, "(0, 1]"),
        CurvatureClass::AtLeastOne => (depth > 0.0 && depth <= FRAC_PI_2 + 1e-15, "(0, pi/2]"),
    };
    if !ok {
        return Err(Error::DepthOutOfRange { depth, range });
    }
    Ok(SpaceModel::build(Geometry::Collar { boundary_area, depth }, dimension, curvature, Some(depth)))
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Invalid(format!("dimension must be ≥ 2, got {n}")));
    }
    Ok(())
}

pub(crate) fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidCount { min: 1, got: 0 });
    }
    Ok(())
}

fn rejection(count: usize, mut draw: impl FnMut() -> Option<Point>) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(count);
    let mut attempts: u64 = 0;
    while out.len() < count {
        attempts += 1;
        if let Some(x) = draw() {
            out.push(x);
        }
        if attempts >= 10_000_000 && (out.len() as f64) < 1e-6 * attempts as f64 {
            return Err(Error::RejectionStarvation { rate: out.len() as f64 / attempts as f64 });
        }
    }
    Ok(out)
}

fn single(c: FootpointCandidate) -> Footpoints {
    Footpoints { candidates: vec![c], soul: false }
}

/// Candidates within `band` of the nearest one, deduplicated at `separation`.
pub(crate) fn distinct_active(cands: &[FootpointCandidate], band: f64, separation: f64) -> Vec<FootpointCandidate> {
    let best = cands[0].distance;
    let mut out: Vec<FootpointCandidate> = Vec::new();
    for c in cands.iter().filter(|c| c.distance <= best + band) {
        if out.iter().all(|o| (&o.point - &c.point).norm() > separation) {
            out.push(c.clone());
        }
    }
    out
}

fn axis_pairs(n: usize) -> impl Iterator<Item = Point> {
    (0..n).flat_map(move |i| {
        [1.0, -1.0].into_iter().map(move |s| {
            let mut e = Point::zeros(n);
            e[i] = s;
            e
        })
    })
}

fn north(n: usize) -> Point {
    let mut p = Point::zeros(n);
    p[n - 1] = 1.0;
    p
}

/// Angle between a unit vector and the last coordinate axis.
pub(crate) fn polar_angle(x: &Point) -> f64 {
    let n = x.len();
    let perp = x.rows(0, n - 1).norm();
    perp.atan2(x[n - 1])
}

/// Great-circle distance between unit vectors.
pub(crate) fn great_circle(x: &Point, y: &Point) -> f64 {
    2.0 * ((x - y).norm() / 2.0).min(1.0).asin()
}

/// Uniform unit vector orthogonal to `normal` (and to `extra`, if given).
fn random_tangent(rng: &mut impl Rng, normal: &Point, extra: Option<&Point>) -> Point {
    loop {
        let mut w = rng::gaussian_vector(rng, normal.len());
        w -= normal * normal.dot(&w);
        if let Some(e) = extra {
            w -= e * e.dot(&w);
        }
        let len = w.norm();
        if len > 1e-9 {
            return w / len;
        }
    }
}

fn cap_circle_point(rng: &mut impl Rng, n: usize, theta: f64) -> Point {
    let w = rng::unit_vector(rng, n - 1);
    let mut p = w.push(0.0) * theta.sin();
    p[n - 1] = theta.cos();
    p
}

fn cube_face_point(rng: &mut impl Rng, n: usize, half_side: f64) -> Point {
    let face = rng.random_range(0..2 * n);
    let mut p = Point::from_iterator(n, (0..n).map(|_| rng.random_range(-half_side..half_side)));
    p[face / 2] = if face % 2 == 0 { half_side } else { -half_side };
    p
}

fn cone_point(t: f64, u: Point) -> Point {
    let mut v = Vec::with_capacity(u.len() + 1);
    v.push(t);
    v.extend(u.iter());
    Point::from_vec(v)
}
