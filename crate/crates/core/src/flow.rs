//! Gradient curves of `rho` and of `F = f(rho)`, the level-to-level flow and
//! its retraction.
//!
//! Both parametrizations share one integrator: Heun predictor/corrector with
//! step halving whenever the realized increase of `rho` departs from the
//! first-order prediction by more than 10%.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::{FootpointCandidate, Point, SpaceKind, SpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    /// `f(ρ) = -(1-ρ)²/2`.
    Kappa0,
    /// `f(ρ) = sin ρ`.
    Kappa1,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Kappa0 => "kappa0",
            Self::Kappa1 => "kappa1",
        }
    }
}

/// Reparametrizing function `f` of `rho` together with its modulus of
/// concavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcavityProfile {
    kind: ProfileKind,
}

impl ConcavityProfile {
    /// Builds the profile and checks `f' > 0` on a grid over `[0, a)`.
    pub fn new(kind: ProfileKind, inradius: f64) -> Result<Self> {
        let p = Self { kind };
        const GRID: usize = 256;
        for i in 0..GRID {
            let r = inradius * i as f64 / GRID as f64;
            if p.df(r) <= 0.0 {
                return Err(Error::OutOfRange { name: "inradius", value: inradius, range: "f' > 0 on [0, a)" });
            }
        }
        Ok(p)
    }

    /// Profile matching the curvature class of `space`.
    pub fn for_space(space: &SpaceModel) -> Result<Self> {
        let kind = match space.curvature_class() {
            crate::CurvatureClass::NonNegative => ProfileKind::Kappa0,
            crate::CurvatureClass::AtLeastOne => ProfileKind::Kappa1,
        };
        Self::new(kind, space.inradius_hint().unwrap_or(0.0))
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn f(&self, rho: f64) -> f64 {
        match self.kind {
            ProfileKind::Kappa0 => -(1.0 - rho).powi(2) / 2.0,
            ProfileKind::Kappa1 => rho.sin(),
        }
    }

    pub fn df(&self, rho: f64) -> f64 {
        match self.kind {
            ProfileKind::Kappa0 => 1.0 - rho,
            ProfileKind::Kappa1 => rho.cos(),
        }
    }

    /// Modulus of concavity `φ(t)` of `F` on the superlevel set at depth `t`.
    pub fn modulus(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Kappa0 => -1.0,
            ProfileKind::Kappa1 => -t.sin(),
        }
    }

    /// Flow time of the fastest gradient curve of `F` from the boundary to
    /// level `t`: `∫₀^t ds / f'(s)`.
    pub fn footpoint_flow_time(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::Kappa0 => -(1.0 - t).ln(),
            ProfileKind::Kappa1 => t.sin().atanh(),
        }
    }
}

/// Semi-concave gradient of `rho` at a point.
#[derive(Debug, Clone)]
pub struct RhoGradient {
    /// Unit ascent direction.
    pub direction: Point,
    /// `|∇ρ|`; `cos` of the half-spread of the footpoint directions.
    pub norm: f64,
    /// Set when more than one footpoint is active.
    pub degenerate: bool,
    pub footpoints: usize,
}

/// Gradient of `rho` at an interior point.
pub fn gradient_of_rho(space: &SpaceModel, x: &Point) -> Result<RhoGradient> {
    if !space.contains(x) {
        return Err(Error::PointOutsideSpace);
    }
    let (g, _) = gradient_with_band(space, x, space.tolerances().medial_rho)?;
    Ok(g)
}

const SOUL_NORM: f64 = 1e-9;

/// Gradient using every footpoint within `band` of the nearest one. Returns
/// the gradient and `rho(x)`.
pub(crate) fn gradient_with_band(space: &SpaceModel, x: &Point, band: f64) -> Result<(RhoGradient, f64)> {
    let fp = space.footpoint_candidates(x, band)?;
    let rho = fp.candidates[0].distance.max(0.0);
    if fp.soul {
        return Err(Error::AtSoul { rho });
    }
    let active = crate::spaces::distinct_active(&fp.candidates, band, space.tolerances().medial_separation);
    let dirs: Vec<Point> = active.iter().map(|c: &FootpointCandidate| c.ascent.clone()).collect();
    let w = min_norm_hull(&dirs);
    let norm = w.norm();
    if norm < SOUL_NORM {
        return Err(Error::AtSoul { rho });
    }
    let g = RhoGradient { direction: w / norm, norm, degenerate: dirs.len() > 1, footpoints: dirs.len() };
    Ok((g, rho))
}

/// Minimum-norm point of the convex hull of `vs`.
pub(crate) fn min_norm_hull(vs: &[Point]) -> Point {
    const MAX: usize = 8;
    let vs = &vs[..vs.len().min(MAX)];
    if vs.len() == 1 {
        return vs[0].clone();
    }
    let m = vs.len();
    let gram = DMatrix::from_fn(m, m, |i, j| vs[i].dot(&vs[j]));
    let mut best: Option<(f64, Point)> = None;
    for mask in 1u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        // minimize λᵀGλ subject to Σλ = 1 on the face spanned by idx
        let mut a = DMatrix::zeros(k + 1, k + 1);
        let mut b = DVector::zeros(k + 1);
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[(r, c)] = gram[(i, j)];
            }
            a[(r, k)] = 1.0;
            a[(k, r)] = 1.0;
        }
        b[k] = 1.0;
        let Some(sol) = a.lu().solve(&b) else { continue };
        if sol.rows(0, k).iter().any(|l| *l < -1e-12 || !l.is_finite()) {
            continue;
        }
        let mut w = Point::zeros(vs[0].len());
        for (r, &i) in idx.iter().enumerate() {
            w += &vs[i] * sol[r];
        }
        let nw = w.norm();
        if best.as_ref().is_none_or(|(bn, _)| nw < *bn) {
            best = Some((nw, w));
        }
    }
    best.map(|(_, w)| w).unwrap_or_else(|| vs[0].clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowTag {
    FGradient,
    Sharafutdinov,
}

#[derive(Debug, Clone)]
pub struct FlowSample {
    pub time: f64,
    pub point: Point,
    pub rho: f64,
}

/// Time-stamped polyline along a gradient curve.
#[derive(Debug, Clone)]
pub struct FlowCurve {
    pub tag: FlowTag,
    pub start: Point,
    pub step: f64,
    pub samples: Vec<FlowSample>,
    /// Accepted steps taken with more than one active footpoint.
    pub degenerate_steps: usize,
    pub halvings: usize,
}

impl FlowCurve {
    pub fn endpoint(&self) -> &Point {
        &self.samples.last().expect("curves hold their start").point
    }

    pub fn total_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.time)
    }

    pub fn end_rho(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.rho)
    }

    pub fn steps(&self) -> usize {
        self.samples.len() - 1
    }
}

#[derive(Clone, Copy)]
enum Param {
    Sharafutdinov,
    FGradient(ConcavityProfile),
}

struct Velocity {
    v: Point,
    /// First-order rate of increase of `rho` per unit parameter.
    rate: f64,
    rho: f64,
    degenerate: bool,
}

struct Integrator<'a> {
    space: &'a SpaceModel,
    param: Param,
    h0: f64,
}

const HALVING_DEPTH: i32 = 40;
const POLISH_ITERS: usize = 8;
const ROUNDING_FLOOR: f64 = 1e-13;

impl<'a> Integrator<'a> {
    fn velocity(&self, x: &Point, band: f64) -> Result<Velocity> {
        let (g, rho) = gradient_with_band(self.space, x, band)?;
        let (v, rate) = match self.param {
            Param::Sharafutdinov => (&g.direction / g.norm, 1.0),
            Param::FGradient(p) => {
                let d = p.df(rho);
                (&g.direction * (d * g.norm), d * g.norm * g.norm)
            }
        };
        Ok(Velocity { v, rate, rho, degenerate: g.degenerate })
    }

    fn rho(&self, x: &Point) -> Result<f64> {
        Ok(self.space.rho_unchecked(x)?.max(0.0))
    }

    /// Integrates from `start` through the increasing `targets`, recording
    /// every accepted step; `stops` collects the sample index at each target.
    fn run(&self, start: &Point, targets: &[f64], stops: &mut Vec<usize>) -> Result<FlowCurve> {
        let space = self.space;
        let tol = *space.tolerances();
        let mut x = start.clone();
        let mut time = 0.0;
        let rho0 = self.rho(&x)?;
        let mut curve = FlowCurve {
            tag: match self.param {
                Param::Sharafutdinov => FlowTag::Sharafutdinov,
                Param::FGradient(_) => FlowTag::FGradient,
            },
            start: start.clone(),
            step: self.h0,
            samples: vec![FlowSample { time: 0.0, point: x.clone(), rho: rho0 }],
            degenerate_steps: 0,
            halvings: 0,
        };
        let h_min = self.h0 * 2f64.powi(-HALVING_DEPTH);
        let mut h = self.h0;
        let mut rho = rho0;
        // speed of the previous step sets the footpoint band
        let mut speed = 0.0;
        for &target in targets {
            if target <= rho + tol.level_landing {
                stops.push(curve.samples.len() - 1);
                continue;
            }
            loop {
                let vel = self.velocity(&x, tol.medial_rho.max(2.0 * h * speed))?;
                rho = vel.rho;
                if target - rho <= tol.level_landing {
                    break;
                }
                let h_land = (target - rho) / vel.rate;
                let landing = h_land <= h;
                let h_try = if landing { h_land } else { h };
                let x1 = space.retract(&x + &vel.v * h_try);
                speed = vel.v.norm();
                let v1 = self.velocity(&x1, tol.medial_rho.max(2.0 * h_try * speed))?;
                let slope = space.tangent_project(&x, &v1.v);
                let x2 = space.retract(&x + (&vel.v + slope) * (h_try / 2.0));
                let rho2 = self.rho(&x2)?;
                let predicted = vel.rate * h_try;
                let realized = rho2 - rho;
                // the absolute floor keeps rounding in rho from forcing halvings
                if (realized - predicted).abs() > 0.1 * predicted + ROUNDING_FLOOR * (1.0 + rho.abs()) {
                    h = h_try / 2.0;
                    curve.halvings += 1;
                    if h < h_min {
                        return Err(Error::StepCollapse { step: h, target });
                    }
                    continue;
                }
                if realized <= 0.0 {
                    return Err(Error::NonMonotone { before: rho, after: rho2 });
                }
                x = x2;
                time += h_try;
                rho = rho2;
                if vel.degenerate || v1.degenerate {
                    curve.degenerate_steps += 1;
                }
                curve.samples.push(FlowSample { time, point: x.clone(), rho });
                if landing || rho >= target {
                    break;
                }
                h = (2.0 * h).min(self.h0);
            }
            // Newton polish along the flow direction onto the target level
            for _ in 0..POLISH_ITERS {
                let err = target - rho;
                if err.abs() <= tol.level_landing {
                    break;
                }
                let vel = self.velocity(&x, tol.medial_rho.max(err.abs() * 4.0))?;
                let dt = err / vel.rate;
                let nx = space.retract(&x + &vel.v * dt);
                let nrho = self.rho(&nx)?;
                if (target - nrho).abs() >= err.abs() {
                    break;
                }
                x = nx;
                rho = nrho;
                time += dt;
            }
            let last = curve.samples.last_mut().expect("nonempty");
            last.point = x.clone();
            last.rho = rho;
            last.time = time;
            stops.push(curve.samples.len() - 1);
        }
        Ok(curve)
    }
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::OutOfRange { name: "step", value: step, range: "(0, inf)" });
    }
    Ok(())
}

fn check_target(space: &SpaceModel, target: f64) -> Result<()> {
    if let Some(a) = space.inradius_hint() {
        if target > a - 1e-9 {
            return Err(Error::AtSoul { rho: target });
        }
    }
    Ok(())
}

fn start_rho(space: &SpaceModel, p: &Point) -> Result<f64> {
    space.rho(p)
}

/// Level-to-level flow `Ψ^T` started at `p ∈ G(s)`; ends on `G(s + T)`.
pub fn sharafutdinov_flow(space: &SpaceModel, p: &Point, t: f64, step: f64) -> Result<FlowCurve> {
    if t < 0.0 {
        return Err(Error::OutOfRange { name: "T", value: t, range: "[0, a - s]" });
    }
    let s = start_rho(space, p)?;
    sharafutdinov_flow_levels(space, p, &[t], step).map(|(c, _)| {
        debug_assert!(c.end_rho() >= s);
        c
    })
}

/// Flows `p` through the increasing flow times `ts`; returns the curve and
/// the endpoint at each time.
pub fn sharafutdinov_flow_levels(space: &SpaceModel, p: &Point, ts: &[f64], step: f64) -> Result<(FlowCurve, Vec<Point>)> {
    check_step(step)?;
    let s = start_rho(space, p)?;
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Invalid("flow times must be nondecreasing".into()));
    }
    let targets: Vec<f64> = ts.iter().map(|t| s + t).collect();
    if let Some(&last) = targets.last() {
        check_target(space, last)?;
    }
    let integ = Integrator { space, param: Param::Sharafutdinov, h0: step };
    let mut stops = Vec::new();
    let curve = integ.run(p, &targets, &mut stops)?;
    let pts = stops.iter().map(|&i| curve.samples[i].point.clone()).collect();
    Ok((curve, pts))
}

/// Gradient curve of `F = f(rho)` from a boundary point up to level `T`.
pub fn f_gradient_curve(
    space: &SpaceModel,
    profile: &ConcavityProfile,
    p: &Point,
    target: f64,
    step: f64,
) -> Result<FlowCurve> {
    check_step(step)?;
    start_rho(space, p)?;
    check_target(space, target)?;
    let integ = Integrator { space, param: Param::FGradient(*profile), h0: step };
    integ.run(p, &[target], &mut Vec::new())
}

/// Total `F`-gradient flow time needed to reach level `T` from `p`.
pub fn flow_time(space: &SpaceModel, profile: &ConcavityProfile, p: &Point, target: f64, step: f64) -> Result<f64> {
    Ok(f_gradient_curve(space, profile, p, target, step)?.total_time())
}

/// Follows the `F`-gradient curve from `p` for a fixed flow time.
pub fn f_gradient_flow_for_time(
    space: &SpaceModel,
    profile: &ConcavityProfile,
    p: &Point,
    duration: f64,
    step: f64,
) -> Result<Point> {
    check_step(step)?;
    if duration < 0.0 {
        return Err(Error::OutOfRange { name: "duration", value: duration, range: "[0, inf)" });
    }
    start_rho(space, p)?;
    let integ = Integrator { space, param: Param::FGradient(*profile), h0: step };
    let mut x = p.clone();
    let mut elapsed = 0.0;
    while elapsed < duration {
        let h = step.min(duration - elapsed);
        let band = space.tolerances().medial_rho;
        let v0 = integ.velocity(&x, band)?;
        let x1 = space.retract(&x + &v0.v * h);
        let v1 = integ.velocity(&x1, band)?;
        let slope = space.tangent_project(&x, &v1.v);
        x = space.retract(&x + (&v0.v + slope) * (h / 2.0));
        elapsed += h;
    }
    Ok(x)
}

/// Short retraction of the space onto the superlevel set `rho ≥ t`: the
/// identity there, and `Ψ^{t - rho(x)}` below it.
pub fn sharafutdinov_retraction(space: &SpaceModel, x: &Point, t: f64, step: f64) -> Result<Point> {
    let rho = space.rho(x)?;
    if let Some(a) = space.inradius_hint() {
        if t > a {
            return Err(Error::OutOfRange { name: "t", value: t, range: "[0, inradius]" });
        }
    }
    if rho >= t {
        return Ok(x.clone());
    }
    match space.kind() {
        SpaceKind::EuclideanBall => {
            let r = space.ball_radius().expect("ball");
            let nx = x.norm();
            if nx == 0.0 {
                return Ok(x.clone());
            }
            Ok(x * ((r - t) / nx))
        }
        SpaceKind::SphericalCap => {
            let big_r = space.cap_radius().expect("cap");
            let n = x.len();
            let mut perp = x.clone();
            perp[n - 1] = 0.0;
            let e = &perp / perp.norm();
            let theta = big_r - t;
            let mut out = e * theta.sin();
            out[n - 1] = theta.cos();
            Ok(out)
        }
        SpaceKind::SquareControl => {
            let s = space.square_half_side().expect("square") - t;
            Ok(x.map(|c| c.clamp(-s, s)))
        }
        SpaceKind::LinearCone | SpaceKind::SphericalCone => {
            let (_, _, height) = space.cone().expect("cone");
            let mut out = x.clone();
            out[0] = out[0].min(height - t);
            Ok(out)
        }
        _ => Ok(sharafutdinov_flow(space, x, t - rho, step)?.endpoint().clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn p(v: &[f64]) -> Point {
        Point::from_row_slice(v)
    }

    fn meridian(theta: f64) -> Point {
        p(&[theta.sin(), 0.0, theta.cos()])
    }

    #[test]
    fn profiles() {
        let k0 = ConcavityProfile::new(ProfileKind::Kappa0, 1.0).unwrap();
        assert_eq!(k0.f(0.0), -0.5);
        assert_eq!(k0.df(0.25), 0.75);
        assert_eq!(k0.modulus(0.4), -1.0);
        let k1 = ConcavityProfile::new(ProfileKind::Kappa1, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(k1.modulus(FRAC_PI_4), -FRAC_PI_4.sin(), epsilon = 1e-15);
        assert!(ConcavityProfile::new(ProfileKind::Kappa0, 1.5).is_err());
        assert!(ConcavityProfile::new(ProfileKind::Kappa1, 2.0).is_err());
    }

    #[test]
    fn min_norm_of_two_unit_vectors() {
        let a = p(&[1.0, 0.0]);
        let b = p(&[0.0, 1.0]);
        let w = min_norm_hull(&[a.clone(), b.clone()]);
        assert_abs_diff_eq!(w.norm(), (FRAC_PI_4).cos(), epsilon = 1e-14);
        let w = min_norm_hull(&[a.clone(), -a.clone()]);
        assert!(w.norm() < 1e-14);
        // a vector dominated by another face
        let c = p(&[1.0, 1.0]) / 2f64.sqrt();
        let w = min_norm_hull(&[a, b, c]);
        assert_abs_diff_eq!(w.norm(), FRAC_PI_4.cos(), epsilon = 1e-14);
    }

    #[test]
    fn ball_gradient_and_soul() {
        let ball = SpaceModel::ball(3, 1.0).unwrap();
        let g = gradient_of_rho(&ball, &p(&[0.5, 0.0, 0.0])).unwrap();
        assert_abs_diff_eq!((g.direction - p(&[-1.0, 0.0, 0.0])).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(g.norm, 1.0);
        assert!(!g.degenerate);
        assert!(matches!(gradient_of_rho(&ball, &p(&[0.0, 0.0, 0.0])), Err(Error::AtSoul { .. })));
    }

    #[test]
    fn cap_gradient_is_poleward() {
        let cap = SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap();
        let x = meridian(FRAC_PI_2 - 0.3);
        let g = gradient_of_rho(&cap, &x).unwrap();
        let expected = p(&[-(0.3f64).sin(), 0.0, (0.3f64).cos()]);
        assert_abs_diff_eq!((g.direction - expected).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.norm, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn square_diagonal_is_degenerate() {
        let sq = SpaceModel::square_control(2).unwrap();
        let g = gradient_of_rho(&sq, &p(&[0.5, 0.5])).unwrap();
        assert!(g.degenerate);
        assert_abs_diff_eq!(g.norm, FRAC_PI_4.cos(), epsilon = 1e-14);
    }

    #[test]
    fn level_to_level_examples() {
        let ball = SpaceModel::ball(3, 1.0).unwrap();
        let c = sharafutdinov_flow(&ball, &p(&[1.0, 0.0, 0.0]), 0.3, 1e-3).unwrap();
        assert_abs_diff_eq!((c.endpoint() - p(&[0.7, 0.0, 0.0])).norm(), 0.0, epsilon = 1e-10);

        let cap = SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap();
        let c = sharafutdinov_flow(&cap, &meridian(FRAC_PI_2), FRAC_PI_4, 1e-3).unwrap();
        assert_abs_diff_eq!((c.endpoint() - meridian(FRAC_PI_4)).norm(), 0.0, epsilon = 1e-9);

        let sq = SpaceModel::square_control(2).unwrap();
        let c = sharafutdinov_flow(&sq, &p(&[0.0, -1.0]), 0.5, 1e-3).unwrap();
        assert_abs_diff_eq!((c.endpoint() - p(&[0.0, -0.5])).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn flow_times() {
        let ball = SpaceModel::ball(3, 1.0).unwrap();
        let k0 = ConcavityProfile::for_space(&ball).unwrap();
        let t = flow_time(&ball, &k0, &p(&[1.0, 0.0, 0.0]), 0.5, 1e-3).unwrap();
        assert_abs_diff_eq!(t, 2f64.ln(), epsilon = 1e-6);
        assert_eq!(flow_time(&ball, &k0, &p(&[1.0, 0.0, 0.0]), 0.0, 1e-3).unwrap(), 0.0);

        let cap = SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap();
        let k1 = ConcavityProfile::for_space(&cap).unwrap();
        let t = flow_time(&cap, &k1, &meridian(FRAC_PI_2), FRAC_PI_4, 1e-3).unwrap();
        assert_abs_diff_eq!(t, 0.881373587019543, epsilon = 1e-6);
    }

    #[test]
    fn exponential_contraction_on_ball() {
        // F = -|x|²/2 on the unit ball: the F-flow is x e^{-t}
        let ball = SpaceModel::ball(2, 1.0).unwrap();
        let k0 = ConcavityProfile::for_space(&ball).unwrap();
        let a = p(&[0.6, 0.1]);
        let b = p(&[0.2, -0.5]);
        let d = 0.4;
        let fa = f_gradient_flow_for_time(&ball, &k0, &a, d, 1e-3).unwrap();
        let fb = f_gradient_flow_for_time(&ball, &k0, &b, d, 1e-3).unwrap();
        let ratio = (fa - fb).norm() / (a - b).norm();
        assert!(ratio <= (-d).exp() * (1.0 + 1e-3));
        assert_abs_diff_eq!(ratio, (-d).exp(), epsilon = 1e-6);
    }

    #[test]
    fn retraction_cases() {
        let ball = SpaceModel::ball(3, 1.0).unwrap();
        let x = p(&[0.3, 0.0, 0.0]);
        assert_eq!(sharafutdinov_retraction(&ball, &x, 0.7, 1e-3).unwrap(), x);
        let y = p(&[0.9, 0.0, 0.0]);
        let r = sharafutdinov_retraction(&ball, &y, 0.4, 1e-3).unwrap();
        assert_abs_diff_eq!((r - p(&[0.6, 0.0, 0.0])).norm(), 0.0, epsilon = 1e-15);
        let origin = p(&[0.0, 0.0, 0.0]);
        assert_eq!(sharafutdinov_retraction(&ball, &origin, 0.4, 1e-3).unwrap(), origin);
    }

    #[test]
    fn hemisphere_contraction_on_equator() {
        let cap = SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap();
        let a = p(&[1.0, 0.0, 0.0]);
        let b = p(&[(0.01f64).cos(), (0.01f64).sin(), 0.0]);
        let fa = sharafutdinov_flow(&cap, &a, FRAC_PI_3, 1e-3).unwrap();
        let fb = sharafutdinov_flow(&cap, &b, FRAC_PI_3, 1e-3).unwrap();
        let ratio = cap.distance(fa.endpoint(), fb.endpoint()).unwrap() / cap.distance(&a, &b).unwrap();
        assert_abs_diff_eq!(ratio, 0.5, epsilon = 1e-5);
    }
}
