//! Base-angle convexity of boundaries and level sets from chord geometry.

use rand::Rng;
use rayon::prelude::*;

use crate::compare::{Claim, ComparisonReport, Direction};
use crate::error::{Error, Result};
use crate::flow::{gradient_of_rho, ProfileKind};
use crate::rng;
use crate::spaces::{tangent_basis, CurvatureClass, Point, SpaceKind, SpaceModel};

/// Which boundary the chords are taken on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChordTarget {
    /// `∂X` itself.
    Boundary,
    /// `G(t)` as the boundary of the superlevel set `rho ≥ t`.
    Level(f64),
}

impl ChordTarget {
    pub fn level(self) -> f64 {
        match self {
            Self::Boundary => 0.0,
            Self::Level(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseAngleEstimate {
    pub point: Point,
    pub radii: Vec<f64>,
    /// `min` over directions of `2α/r`, per radius.
    pub per_radius_min: Vec<f64>,
    /// Mean over directions of `2α/r`, per radius.
    pub per_radius_mean: Vec<f64>,
    /// Minimum at the smallest radius.
    pub estimate: f64,
    /// Mean at the smallest radius.
    pub mean_estimate: f64,
    /// `max - min` over directions at the smallest radius.
    pub spread: f64,
}

const BISECTION_STEPS: usize = 48;
pub const RESOLUTION_FLOOR: f64 = 1e-6;
const STABLE_REL: f64 = 0.02;

/// Base angle at `p` of chords on `target`, sampled over `directions`
/// tangent directions for each chord length in `r_schedule`.
pub fn base_angle(
    space: &SpaceModel,
    target: ChordTarget,
    p: &Point,
    r_schedule: &[f64],
    directions: usize,
    seed: u64,
) -> Result<BaseAngleEstimate> {
    if !space.capabilities().chords {
        return Err(Error::Unsupported("chords"));
    }
    if r_schedule.is_empty() || directions == 0 {
        return Err(Error::InvalidCount { min: 1, got: 0 });
    }
    if r_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("r schedule must be strictly decreasing".into()));
    }
    let r_min = *r_schedule.last().unwrap();
    if r_min < RESOLUTION_FLOOR {
        return Err(Error::ResolutionFloor { r: r_min });
    }
    let t = target.level();
    let rho = space.rho(p)?;
    if (rho - t).abs() > 1e-6 {
        return Err(Error::Invalid(format!("point is at level {rho}, not on level {t}")));
    }
    let nu = inward_normal(space, p)?;
    let basis = tangent_frame(space, p, &nu);
    let mut rng = rng::stream(seed, 0);
    let dirs: Vec<Point> = (0..directions)
        .map(|_| {
            let c = rng::unit_vector(&mut rng, basis.len());
            basis.iter().zip(c.iter()).fold(Point::zeros(p.len()), |acc, (b, ci)| acc + b * *ci)
        })
        .collect();

    let mut per_min = Vec::with_capacity(r_schedule.len());
    let mut per_mean = Vec::with_capacity(r_schedule.len());
    let mut spread = 0.0;
    for &r in r_schedule {
        let mut vals = Vec::with_capacity(dirs.len());
        for e in &dirs {
            let alpha = chord_angle(space, p, e, &nu, r, t)?;
            vals.push(2.0 * alpha / r);
        }
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        per_min.push(lo);
        per_mean.push(vals.iter().sum::<f64>() / vals.len() as f64);
        spread = hi - lo;
    }
    let k = per_min.len();
    if k >= 2 {
        let (a, b) = (per_min[k - 2], per_min[k - 1]);
        if (a - b).abs() > STABLE_REL * a.abs().max(b.abs()) + 1e-9 {
            return Err(Error::ResolutionFloor { r: r_min });
        }
    }
    Ok(BaseAngleEstimate {
        point: p.clone(),
        radii: r_schedule.to_vec(),
        estimate: per_min[k - 1],
        mean_estimate: per_mean[k - 1],
        per_radius_min: per_min,
        per_radius_mean: per_mean,
        spread,
    })
}

/// Unit normal of the level set through `p`, pointing into `rho ≥ rho(p)`.
fn inward_normal(space: &SpaceModel, p: &Point) -> Result<Point> {
    Ok(gradient_of_rho(space, p)?.direction)
}

/// Orthonormal frame of the tangent space of the level set at `p`.
fn tangent_frame(space: &SpaceModel, p: &Point, nu: &Point) -> Vec<Point> {
    let basis = tangent_basis(nu);
    if space.kind() != SpaceKind::SphericalCap {
        return basis;
    }
    // on the sphere, also remove the radial direction p
    let mut out: Vec<Point> = Vec::new();
    for b in basis {
        let mut v = &b - p * p.dot(&b);
        for o in &out {
            v -= o * o.dot(&v);
        }
        let len = v.norm();
        if len > 1e-8 {
            out.push(v / len);
        }
    }
    out
}

/// Smallest `α ∈ [0, π/2]` whose chord of length `r` in direction
/// `cos α e + sin α ν` ends in the superlevel set `rho ≥ t`.
fn chord_angle(space: &SpaceModel, p: &Point, e: &Point, nu: &Point, r: f64, t: f64) -> Result<f64> {
    let inside = |alpha: f64| -> Result<bool> {
        let w = e * alpha.cos() + nu * alpha.sin();
        let q = space.geodesic_point(p, &w, r)?;
        Ok(space.level_excess(&q, t)? >= 0.0)
    };
    if inside(0.0)? {
        return Ok(0.0);
    }
    if !inside(std::f64::consts::FRAC_PI_2)? {
        return Err(Error::ChordSolverFailure { r });
    }
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower bound on the base angle of `G(t)` from the Hessian comparison:
/// `1/(1-t)` for `κ = 0`, `tan t` for `κ = 1`.
pub fn hessian_bound(class: CurvatureClass, t: f64) -> f64 {
    match class {
        CurvatureClass::NonNegative => 1.0 / (1.0 - t),
        CurvatureClass::AtLeastOne => t.tan(),
    }
}

/// Options for [`hessian_comparison_check`].
#[derive(Debug, Clone)]
pub struct HessianCheckOptions {
    pub points: usize,
    pub r_schedule: Vec<f64>,
    pub directions: usize,
    pub seed: u64,
}

impl Default for HessianCheckOptions {
    fn default() -> Self {
        Self { points: 8, r_schedule: vec![0.04, 0.02, 0.01], directions: 16, seed: 0 }
    }
}

/// Base angle of `G(t)` against its Hessian-comparison lower bound for each
/// `t` of the grid. The measured value is the minimum over sampled points.
pub fn hessian_comparison_check(
    space: &SpaceModel,
    t_grid: &[f64],
    opts: &HessianCheckOptions,
) -> Result<Vec<ComparisonReport>> {
    let tol = *space.tolerances();
    t_grid
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let start = std::time::Instant::now();
            let seed = opts.seed.wrapping_add(1000 * i as u64);
            let pts = space.sample_level_set(t, opts.points, seed)?;
            let target = if t == 0.0 { ChordTarget::Boundary } else { ChordTarget::Level(t) };
            let ests: Vec<Result<BaseAngleEstimate>> = pts
                .par_iter()
                .enumerate()
                .map(|(j, p)| base_angle(space, target, p, &opts.r_schedule, opts.directions, seed + j as u64))
                .collect();
            let mut lo = f64::INFINITY;
            let mut mean = 0.0;
            for e in ests {
                let e = e?;
                lo = lo.min(e.estimate);
                mean += e.mean_estimate / pts.len() as f64;
            }
            let bound = hessian_bound(space.curvature_class(), t);
            let r_min = *opts.r_schedule.last().unwrap();
            let chord = bound * (r_min * bound).powi(2) / 24.0;
            Ok(ComparisonReport::new(Claim::HessianComparison, &space.label(), Direction::AtLeast, bound, lo)
                .with_param("t", t)
                .with_slack(tol.base_angle_rel * bound, chord + 1e-9)
                .with_detail("mean_base_angle", mean)
                .with_detail("points", pts.len() as f64)
                .with_runtime(start.elapsed().as_secs_f64())
                .judge(space.hypothesis_violated()))
        })
        .collect()
}

/// Modulus of concavity appearing in the level-set convexity argument:
/// `M₀ = -1/(1-t)` and `M₁ = -tan t`.
pub fn concavity_modulus(kind: ProfileKind, t: f64) -> Result<f64> {
    match kind {
        ProfileKind::Kappa0 if (0.0..1.0).contains(&t) => Ok(-1.0 / (1.0 - t)),
        ProfileKind::Kappa1 if (0.0..std::f64::consts::FRAC_PI_2).contains(&t) => Ok(-t.tan()),
        _ => Err(Error::DomainError { t }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordExpansionRow {
    pub s: f64,
    /// Chord-to-tangent angle on the round model of curvature `|M|`.
    pub theta: f64,
    /// `arccos(1 - M²s²/8)`, the lower estimate from the chord-length bound.
    pub theta_lower: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordExpansionReport {
    pub modulus: f64,
    pub rows: Vec<ChordExpansionRow>,
    /// `|M|/2`.
    pub limit: f64,
    pub pass: bool,
}

/// Checks `θ(s)/s → |M|/2` on the circle of radius `1/|M|`, and that the
/// geometric angle dominates the chord-length lower estimate.
pub fn chord_expansion_selftest(modulus: f64, s_schedule: &[f64]) -> Result<ChordExpansionReport> {
    if modulus > 0.0 {
        return Err(Error::OutOfRange { name: "M", value: modulus, range: "(-inf, 0]" });
    }
    if s_schedule.is_empty() || s_schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("s schedule must be nonempty and strictly decreasing".into()));
    }
    let k = modulus.abs();
    let rows: Vec<ChordExpansionRow> = s_schedule
        .iter()
        .map(|&s| {
            let theta = (s * k / 2.0).min(1.0).asin();
            let theta_lower = (1.0 - k * k * s * s / 8.0).clamp(-1.0, 1.0).acos();
            ChordExpansionRow { s, theta, theta_lower, ratio: theta / s }
        })
        .collect();
    let limit = k / 2.0;
    let last = rows.last().expect("nonempty");
    let close = (last.ratio - limit).abs() <= 0.05 * limit + 1e-12;
    let dominated = rows.iter().all(|r| r.theta >= r.theta_lower - 1e-12);
    Ok(ChordExpansionReport { modulus, rows, limit, pass: close && dominated })
}

/// Sampled boundary points for convexity audits.
pub fn sample_boundary_base_angles(
    space: &SpaceModel,
    count: usize,
    r_schedule: &[f64],
    directions: usize,
    seed: u64,
) -> Result<Vec<BaseAngleEstimate>> {
    let pts = space.sample_boundary(count, seed)?;
    let mut rng = rng::stream(seed, 1);
    let seeds: Vec<u64> = (0..pts.len()).map(|_| rng.random()).collect();
    pts.par_iter()
        .zip(seeds)
        .map(|(p, s)| base_angle(space, ChordTarget::Boundary, p, r_schedule, directions, s))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_4, PI};

    const R: [f64; 3] = [0.04, 0.02, 0.01];

    #[test]
    fn disk_boundary_is_one() {
        let disk = SpaceModel::ball(2, 1.0).unwrap();
        let p = Point::from_row_slice(&[0.6, 0.8]);
        let e = base_angle(&disk, ChordTarget::Boundary, &p, &R, 8, 1).unwrap();
        assert!((e.estimate - 1.0).abs() < 0.05);
        // 2α/r = 2 asin(r/2)/r exactly on the unit circle
        assert_abs_diff_eq!(e.estimate, 2.0 * (0.005f64).asin() / 0.01, epsilon = 1e-7);
    }

    #[test]
    fn square_edge_is_flat() {
        let sq = SpaceModel::square_control(2).unwrap();
        let p = Point::from_row_slice(&[0.0, -1.0]);
        let e = base_angle(&sq, ChordTarget::Boundary, &p, &R, 8, 1).unwrap();
        assert!(e.estimate <= 0.01);
    }

    #[test]
    fn ball_level_set() {
        let ball = SpaceModel::ball(3, 1.0).unwrap();
        let p = Point::from_row_slice(&[0.0, 0.5, 0.0]);
        let e = base_angle(&ball, ChordTarget::Level(0.5), &p, &R, 8, 1).unwrap();
        assert!((e.estimate - 2.0).abs() < 0.1);
    }

    #[test]
    fn hemisphere_latitude_circle() {
        let cap = SpaceModel::spherical_cap(2, PI / 2.0).unwrap();
        let t = FRAC_PI_4;
        let p = Point::from_row_slice(&[t.cos(), 0.0, t.sin()]);
        let e = base_angle(&cap, ChordTarget::Level(t), &p, &R, 4, 1).unwrap();
        assert!((e.estimate - 1.0).abs() < 0.05, "{}", e.estimate);
    }

    #[test]
    fn scale_covariance() {
        let small = SpaceModel::ball(2, 1.0).unwrap();
        let big = SpaceModel::ball(2, 2.0).unwrap();
        let a = base_angle(&small, ChordTarget::Boundary, &Point::from_row_slice(&[1.0, 0.0]), &R, 4, 3).unwrap();
        let r2: Vec<f64> = R.iter().map(|r| 2.0 * r).collect();
        let b = base_angle(&big, ChordTarget::Boundary, &Point::from_row_slice(&[2.0, 0.0]), &r2, 4, 3).unwrap();
        assert_abs_diff_eq!(b.estimate, a.estimate / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn moduli() {
        assert_eq!(concavity_modulus(ProfileKind::Kappa0, 0.0).unwrap(), -1.0);
        assert_abs_diff_eq!(concavity_modulus(ProfileKind::Kappa1, FRAC_PI_4).unwrap(), -1.0, epsilon = 1e-15);
        assert!(matches!(concavity_modulus(ProfileKind::Kappa0, 1.0), Err(Error::DomainError { .. })));
        assert!(concavity_modulus(ProfileKind::Kappa1, PI / 2.0).is_err());
    }

    #[test]
    fn chord_expansion() {
        let s = [0.1, 0.05, 0.01, 0.001];
        let r = chord_expansion_selftest(-1.0, &s).unwrap();
        assert!(r.pass);
        assert!((r.rows.last().unwrap().ratio - 0.5).abs() < 0.025);
        let r = chord_expansion_selftest(-2.0, &s).unwrap();
        assert!(r.pass && (r.rows.last().unwrap().ratio - 1.0).abs() < 0.05);
        let r = chord_expansion_selftest(0.0, &s).unwrap();
        assert!(r.pass && r.rows.last().unwrap().ratio == 0.0);
        assert!(chord_expansion_selftest(1.0, &s).is_err());
    }
}
