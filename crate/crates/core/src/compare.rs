//! Validators that measure each comparison inequality on a catalog space and
//! grade it against the closed-form bound.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{self, ConcavityProfile};
use crate::measure::{self, MeasureEstimate, Region};
use crate::rng;
use crate::spaces::{CurvatureClass, Point, SpaceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Claim {
    CollarVolume,
    ConeVolume,
    Inradius,
    Contraction,
    FlowTime,
    Rigidity,
    HessianComparison,
    LipschitzImage,
}

impl Claim {
    pub const ALL: [Claim; 8] = [
        Claim::CollarVolume,
        Claim::ConeVolume,
        Claim::Inradius,
        Claim::Contraction,
        Claim::FlowTime,
        Claim::Rigidity,
        Claim::HessianComparison,
        Claim::LipschitzImage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::CollarVolume => "collar_volume",
            Self::ConeVolume => "cone_volume",
            Self::Inradius => "inradius",
            Self::Contraction => "contraction",
            Self::FlowTime => "flow_time",
            Self::Rigidity => "rigidity",
            Self::HessianComparison => "hessian_comparison",
            Self::LipschitzImage => "lipschitz_image",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Which side of the bound the measured value must lie on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    PassAtEquality,
    Fail,
    /// The inequality failed on a space that violates its hypotheses.
    HypothesisViolatedControl,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::PassAtEquality => "pass_at_equality",
            Self::Fail => "fail",
            Self::HypothesisViolatedControl => "hypothesis_violated_control",
        }
    }

    pub fn is_pass(self) -> bool {
        matches!(self, Self::Pass | Self::PassAtEquality)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub claim: Claim,
    pub space: String,
    pub params: Vec<(String, f64)>,
    pub bound: f64,
    pub measured: f64,
    pub measured_error: f64,
    pub slack_statistical: f64,
    pub slack_deterministic: f64,
    pub direction: Direction,
    pub verdict: Verdict,
    /// Wall-clock seconds; excluded from equality-sensitive outputs.
    pub runtime: f64,
    /// Rigidity verdict for [`Claim::Rigidity`].
    pub rigid: Option<bool>,
    pub details: Vec<(String, f64)>,
}

impl ComparisonReport {
    pub fn new(claim: Claim, space: &str, direction: Direction, bound: f64, measured: f64) -> Self {
        Self {
            claim,
            space: space.to_string(),
            params: Vec::new(),
            bound,
            measured,
            measured_error: 0.0,
            slack_statistical: 0.0,
            slack_deterministic: 0.0,
            direction,
            verdict: Verdict::Fail,
            runtime: 0.0,
            rigid: None,
            details: Vec::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn with_detail(mut self, name: &str, value: f64) -> Self {
        self.details.push((name.to_string(), value));
        self
    }

    pub fn with_error(mut self, e: f64) -> Self {
        self.measured_error = e;
        self
    }

    pub fn with_slack(mut self, statistical: f64, deterministic: f64) -> Self {
        self.slack_statistical = statistical;
        self.slack_deterministic = deterministic;
        self
    }

    pub fn with_runtime(mut self, seconds: f64) -> Self {
        self.runtime = seconds;
        self
    }

    pub fn slack(&self) -> f64 {
        self.slack_statistical + self.slack_deterministic
    }

    /// Signed distance from the bound in the direction the claim allows:
    /// positive when the inequality holds strictly.
    pub fn margin(&self) -> f64 {
        match self.direction {
            Direction::AtMost => self.bound - self.measured,
            Direction::AtLeast => self.measured - self.bound,
        }
    }

    pub fn detail(&self, name: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Sets the verdict from the measured value, bound and slack.
    pub fn judge(mut self, control: bool) -> Self {
        self.verdict = grade(self.direction, self.measured, self.bound, self.slack(), control);
        self
    }
}

pub fn grade(direction: Direction, measured: f64, bound: f64, slack: f64, control: bool) -> Verdict {
    let holds = match direction {
        Direction::AtMost => measured <= bound + slack,
        Direction::AtLeast => measured >= bound - slack,
    };
    match (holds, (measured - bound).abs() <= slack, control) {
        (true, true, _) => Verdict::PassAtEquality,
        (true, false, _) => Verdict::Pass,
        (false, _, true) => Verdict::HypothesisViolatedControl,
        (false, _, false) => Verdict::Fail,
    }
}

/// A pair of boundary points and their distances before and after the flow.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRatio {
    pub before: f64,
    pub after: f64,
    pub ratio: f64,
    pub local: bool,
}

/// Shared settings for the validators.
#[derive(Debug, Clone)]
pub struct Validator {
    pub seed: u64,
    /// Monte Carlo samples for volumes.
    pub samples: usize,
    /// Boundary pairs for contraction and rigidity.
    pub pairs: usize,
    /// Sample points for flow-time and inradius searches.
    pub points: usize,
    /// Integrator step; `None` uses the space default.
    pub step: Option<f64>,
    pub force_monte_carlo: bool,
    /// Scale of local pairs relative to the inradius.
    pub local_scale: f64,
}

impl Default for Validator {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1_000_000,
            pairs: 1000,
            points: 200,
            step: None,
            force_monte_carlo: false,
            local_scale: 0.02,
        }
    }
}

fn factor(class: CurvatureClass, t: f64) -> f64 {
    class.warping(t)
}

fn check_depth(space: &SpaceModel, r: f64) -> Result<()> {
    let (ok, range) = match space.curvature_class() {
        CurvatureClass::NonNegative => (r > 0.0 && r <= 1.0, "(0, 1]"),
        CurvatureClass::AtLeastOne => (r > 0.0 && r <= FRAC_PI_2 + 1e-12, "(0, pi/2]"),
    };
    let a = space.inradius_hint().unwrap_or(f64::INFINITY);
    if !ok || r > a + 1e-12 {
        return Err(Error::DepthOutOfRange { depth: r, range });
    }
    Ok(())
}

impl Validator {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_pairs(mut self, pairs: usize) -> Self {
        self.pairs = pairs;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn monte_carlo(mut self, force: bool) -> Self {
        self.force_monte_carlo = force;
        self
    }

    fn step(&self, space: &SpaceModel) -> f64 {
        self.step.unwrap_or_else(|| space.default_step())
    }

    fn region_volume(&self, space: &SpaceModel, region: Region) -> Result<MeasureEstimate> {
        if self.force_monte_carlo && space.capabilities().monte_carlo {
            measure::volume_monte_carlo(space, region, self.samples, self.seed)
        } else {
            measure::volume(space, region, self.samples.max(measure::MIN_SAMPLES), self.seed)
        }
    }

    /// Collar volume `μ(B(∂X, r))` against `μ(∂X)∫₀^r w(t)^{n-1} dt`.
    pub fn check_collar_volume(&self, space: &SpaceModel, r: f64) -> Result<ComparisonReport> {
        let start = Instant::now();
        check_depth(space, r)?;
        let tol = space.tolerances();
        let vol = self.region_volume(space, Region::Collar(r))?;
        let area = measure::boundary_area(space)?;
        let integral = space.curvature_class().collar_integral(space.dimension(), r);
        let bound = area.value * integral;
        let stat = tol.sigma * vol.std_error;
        let det = area.std_error * integral + 1e-12 * bound;
        Ok(ComparisonReport::new(Claim::CollarVolume, &space.label(), Direction::AtMost, bound, vol.value)
            .with_param("r", r)
            .with_error(vol.std_error)
            .with_slack(stat, det)
            .with_detail("boundary_area", area.value)
            .with_detail("samples", vol.samples as f64)
            .with_runtime(start.elapsed().as_secs_f64())
            .judge(space.hypothesis_violated()))
    }

    /// Total volume against the volume of the model cone over the boundary.
    pub fn check_cone_volume(&self, space: &SpaceModel) -> Result<ComparisonReport> {
        let start = Instant::now();
        let tol = space.tolerances();
        let vol = self.region_volume(space, Region::Whole)?;
        let area = measure::boundary_area(space)?;
        let class = space.curvature_class();
        let integral = class.collar_integral(space.dimension(), class.max_inradius());
        let bound = area.value * integral;
        Ok(ComparisonReport::new(Claim::ConeVolume, &space.label(), Direction::AtMost, bound, vol.value)
            .with_error(vol.std_error)
            .with_slack(tol.sigma * vol.std_error, area.std_error * integral + 1e-12 * bound)
            .with_runtime(start.elapsed().as_secs_f64())
            .judge(space.hypothesis_violated()))
    }

    /// Largest value of `rho` found by sampling and local ascent.
    pub fn check_inradius(&self, space: &SpaceModel) -> Result<ComparisonReport> {
        let start = Instant::now();
        let tol = space.tolerances();
        let measured = if space.capabilities().sampling {
            max_rho(space, self.points.max(1), self.seed)?
        } else {
            space.inradius_hint().ok_or(Error::Unsupported("inradius"))?
        };
        let bound = space.curvature_class().max_inradius();
        Ok(ComparisonReport::new(Claim::Inradius, &space.label(), Direction::AtMost, bound, measured)
            .with_slack(0.0, tol.inradius_abs)
            .with_runtime(start.elapsed().as_secs_f64())
            .judge(space.hypothesis_violated()))
    }

    /// Pair distances before and after the level-to-level flow by `T`.
    /// Half the pairs are local (second point within `local_scale·a` of the
    /// first), half are independent boundary samples.
    pub fn contraction_ratios(&self, space: &SpaceModel, t: f64) -> Result<Vec<PairRatio>> {
        let a = space.inradius_hint().unwrap_or(1.0);
        if !(t > 0.0 && t < a) {
            return Err(Error::OutOfRange { name: "T", value: t, range: "(0, inradius)" });
        }
        let pairs = self.boundary_pairs(space, self.pairs)?;
        let step = self.step(space);
        let flowed: Vec<Result<(Point, Point)>> = pairs
            .par_iter()
            .map(|(p, q, _)| {
                let fp = flow::sharafutdinov_flow(space, p, t, step)?;
                let fq = flow::sharafutdinov_flow(space, q, t, step)?;
                Ok((fp.endpoint().clone(), fq.endpoint().clone()))
            })
            .collect();
        pairs
            .iter()
            .zip(flowed)
            .map(|((p, q, local), f)| {
                let (fp, fq) = f?;
                let before = space.distance(p, q)?;
                let after = space.distance(&fp, &fq)?;
                Ok(PairRatio { before, after, ratio: after / before, local: *local })
            })
            .collect()
    }

    fn boundary_pairs(&self, space: &SpaceModel, count: usize) -> Result<Vec<(Point, Point, bool)>> {
        let a = space.inradius_hint().unwrap_or(1.0);
        let delta = self.local_scale * a;
        let local = count.div_ceil(2);
        let global = count - local;
        let starts = space.sample_boundary(local + 2 * global, self.seed)?;
        let mut rng = rng::stream(self.seed, 1);
        let mut out = Vec::with_capacity(count);
        for p in &starts[..local] {
            let d = delta * rng.random_range(0.2..1.0);
            let q = space.boundary_neighbor(p, d, &mut rng)?;
            out.push((p.clone(), q, true));
        }
        for pair in starts[local..].chunks(2) {
            if space.distance(&pair[0], &pair[1])? > 1e-9 {
                out.push((pair[0].clone(), pair[1].clone(), false));
            }
        }
        Ok(out)
    }

    /// Largest pair-distance ratio after flowing by `T`, against `1 - T` or `cos T`.
    pub fn check_contraction(&self, space: &SpaceModel, t: f64) -> Result<ComparisonReport> {
        Ok(self.check_contraction_with_ratios(space, t)?.0)
    }

    /// As [`Validator::check_contraction`], also returning the pair ratios.
    pub fn check_contraction_with_ratios(&self, space: &SpaceModel, t: f64) -> Result<(ComparisonReport, Vec<PairRatio>)> {
        let start = Instant::now();
        let tol = space.tolerances();
        let ratios = self.contraction_ratios(space, t)?;
        let max = ratios.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let bound = factor(space.curvature_class(), t);
        // integrator error on the flowed distances, relative to the local pair scale
        let integ = 10.0 * tol.level_landing / (self.local_scale * space.inradius_hint().unwrap_or(1.0) * 0.2);
        let report = ComparisonReport::new(Claim::Contraction, &space.label(), Direction::AtMost, bound, max)
            .with_param("T", t)
            .with_slack(0.0, tol.contraction_rel * bound + integ)
            .with_detail("pairs", ratios.len() as f64)
            .with_detail("min_ratio", min)
            .with_runtime(start.elapsed().as_secs_f64())
            .judge(space.hypothesis_violated());
        Ok((report, ratios))
    }

    /// Flow times from sampled boundary points to level `T`.
    pub fn flow_times(&self, space: &SpaceModel, t: f64) -> Result<Vec<(Point, f64)>> {
        let profile = ConcavityProfile::for_space(space)?;
        let pts = space.sample_boundary(self.points.max(1), self.seed)?;
        let step = self.step(space);
        pts.into_par_iter()
            .map(|p| {
                let time = flow::flow_time(space, &profile, &p, t, step)?;
                Ok((p, time))
            })
            .collect()
    }

    /// Minimum sampled flow time to level `T` against the footpoint value.
    pub fn check_flow_time(&self, space: &SpaceModel, t: f64) -> Result<ComparisonReport> {
        let start = Instant::now();
        let tol = space.tolerances();
        let profile = ConcavityProfile::for_space(space)?;
        let bound = profile.footpoint_flow_time(t);
        let times = self.flow_times(space, t)?;
        let min = times.iter().map(|(_, s)| *s).fold(f64::INFINITY, f64::min);
        let max = times.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
        let above = times.iter().filter(|(_, s)| *s > bound + 1e-3).count();
        Ok(ComparisonReport::new(Claim::FlowTime, &space.label(), Direction::AtLeast, bound, min)
            .with_param("T", t)
            .with_slack(0.0, tol.flow_time_abs)
            .with_detail("count", times.len() as f64)
            .with_detail("count_above", above as f64)
            .with_detail("max_time", max)
            .with_detail("max_excess", max - bound)
            .with_runtime(start.elapsed().as_secs_f64())
            .judge(space.hypothesis_violated()))
    }

    /// Warped-product fingerprint of the collar of depth `r`: collar-volume
    /// equality together with exact `w(t)` contraction of local pairs on
    /// every level of `t_grid` (default `r·i/6`, `i = 1..5`).
    pub fn detect_rigidity(&self, space: &SpaceModel, r: f64, t_grid: Option<&[f64]>) -> Result<ComparisonReport> {
        let start = Instant::now();
        let tol = *space.tolerances();
        let collar = self.check_collar_volume(space, r)?;
        let equality = collar.verdict == Verdict::PassAtEquality;
        let default: Vec<f64> = (1..=5).map(|i| r * i as f64 / 6.0).collect();
        let grid = t_grid.unwrap_or(&default);
        if grid.iter().any(|&t| !(t > 0.0 && t <= r)) {
            return Err(Error::Invalid("rigidity levels must lie in (0, r]".into()));
        }
        let a = space.inradius_hint().unwrap_or(1.0);
        let delta = self.local_scale * a;
        let starts = space.sample_boundary(self.pairs.max(1), self.seed)?;
        let mut rng = rng::stream(self.seed, 2);
        let pairs: Vec<(Point, Point)> = starts
            .iter()
            .map(|p| {
                let d = delta * rng.random_range(0.2..1.0);
                Ok((p.clone(), space.boundary_neighbor(p, d, &mut rng)?))
            })
            .collect::<Result<_>>()?;
        let step = self.step(space);
        let class = space.curvature_class();
        let residuals: Vec<Result<f64>> = pairs
            .par_iter()
            .map(|(p, q)| {
                let (_, fp) = flow::sharafutdinov_flow_levels(space, p, grid, step)?;
                let (_, fq) = flow::sharafutdinov_flow_levels(space, q, grid, step)?;
                let d0 = space.distance(p, q)?;
                let mut worst: f64 = 0.0;
                for ((x, y), &t) in fp.iter().zip(&fq).zip(grid) {
                    let ratio = space.distance(x, y)? / (factor(class, t) * d0);
                    worst = worst.max((ratio - 1.0).abs());
                }
                Ok(worst)
            })
            .collect();
        let mut residual: f64 = 0.0;
        for r in residuals {
            residual = residual.max(r?);
        }
        let fits = residual <= tol.rigidity_residual;
        let rigid = equality && fits;
        let consistent = equality == fits;
        let verdict = match (consistent, rigid, space.hypothesis_violated()) {
            (true, true, _) => Verdict::PassAtEquality,
            (true, false, _) => Verdict::Pass,
            (false, _, true) => Verdict::HypothesisViolatedControl,
            (false, _, false) => Verdict::Fail,
        };
        let mut report = ComparisonReport::new(Claim::Rigidity, &space.label(), Direction::AtMost, tol.rigidity_residual, residual)
            .with_param("r", r)
            .with_detail("collar_equality", equality as u8 as f64)
            .with_detail("collar_margin", collar.margin())
            .with_detail("pairs", pairs.len() as f64)
            .with_runtime(start.elapsed().as_secs_f64());
        report.verdict = verdict;
        report.rigid = Some(rigid);
        Ok(report)
    }
}

/// Maximum of `rho` by sampling followed by ascent along an ε-subgradient:
/// footpoints within the current step length all enter the min-norm hull, so
/// steps follow a medial ridge instead of zigzagging across it.
fn max_rho(space: &SpaceModel, count: usize, seed: u64) -> Result<f64> {
    const MAX_STEPS: usize = 2000;
    let pts = space.sample_interior(count, seed)?;
    let mut best = (f64::NEG_INFINITY, pts[0].clone());
    for p in pts {
        let r = space.rho(&p)?;
        if r > best.0 {
            best = (r, p);
        }
    }
    let (mut rho, mut x) = best;
    let floor = space.tolerances().medial_rho;
    let mut h = 0.1 * space.inradius_hint().unwrap_or(rho.max(1e-3));
    for _ in 0..MAX_STEPS {
        if h <= 1e-10 {
            break;
        }
        let dir = match flow::gradient_with_band(space, &x, h.max(floor)) {
            Ok((g, _)) => g.direction,
            Err(Error::AtSoul { .. }) if h > floor => {
                h /= 2.0;
                continue;
            }
            Err(Error::AtSoul { .. }) => break,
            Err(e) => return Err(e),
        };
        let cand = space.retract(&x + dir * h);
        match space.rho(&cand) {
            Ok(r) if r > rho => {
                rho = r;
                x = cand;
                h *= 1.5;
            }
            Ok(_) | Err(Error::PointOutsideSpace) => h /= 2.0,
            Err(e) => return Err(e),
        }
    }
    Ok(rho)
}
