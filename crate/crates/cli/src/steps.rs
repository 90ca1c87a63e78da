//! Step definitions and their execution against a loaded space.

use std::time::Instant;

use collarbound::compare::{Claim, ComparisonReport, Direction, Validator};
use collarbound::convexity::{self, ChordTarget, HessianCheckOptions};
use collarbound::flow::{self, ConcavityProfile, ProfileKind};
use collarbound::measure::{self, MeasureEstimate, Region};
use collarbound::{CurvatureClass, SpaceModel};
use serde::Deserialize;

use crate::output::{Row, Series, StepRecord};

/// One scenario step: a name plus the command it runs.
#[derive(Debug, Clone, Deserialize, PartialEq)]
pub struct Step {
    pub name: String,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Action {
    Volume {
        /// `whole`, `collar` or `sublevel`.
        #[serde(default = "default_region")]
        region: String,
        depth: Option<f64>,
        samples: Option<usize>,
        #[serde(default)]
        monte_carlo: bool,
    },
    Profile {
        levels: Vec<f64>,
        samples: Option<usize>,
        /// Differentiate Monte Carlo volumes even when closed forms exist.
        #[serde(default)]
        coarea: bool,
    },
    Pack {
        eps: Vec<f64>,
    },
    Flow {
        target: f64,
        count: usize,
        /// `kappa0`, `kappa1` or `sharafutdinov`; defaults to the space's profile.
        profile: Option<String>,
        step: Option<f64>,
    },
    BaseAngle {
        /// Level `t` whose level set is probed; the boundary when absent.
        level: Option<f64>,
        count: usize,
        radii: Option<Vec<f64>>,
        directions: Option<usize>,
    },
    Compare(CompareSpec),
}

fn default_region() -> String {
    "whole".into()
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    /// Claim names, or `["all"]` for every claim the space supports.
    pub claims: Option<Vec<String>>,
    /// Collar depths for the collar-volume and rigidity claims.
    pub r: Option<Vec<f64>>,
    /// Flow depth for the contraction, flow-time and Lipschitz-image claims.
    pub flow_t: Option<f64>,
    /// Levels for the Hessian comparison.
    pub levels: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub pairs: Option<usize>,
    pub points: Option<usize>,
    #[serde(default)]
    pub monte_carlo: bool,
}

const DEFAULT_SAMPLES: usize = 1_000_000;
const DEFAULT_RADII: [f64; 3] = [0.04, 0.02, 0.01];

impl Step {
    /// Runs the step; failures are recorded in the returned record.
    pub fn execute(&self, space: &SpaceModel, seed: u64) -> StepRecord {
        let start = Instant::now();
        let mut rec = StepRecord { name: self.name.clone(), seed, ..Default::default() };
        let res = match &self.action {
            Action::Volume { region, depth, samples, monte_carlo } => {
                volume(space, &mut rec, region, *depth, samples.unwrap_or(DEFAULT_SAMPLES), *monte_carlo)
            }
            Action::Profile { levels, samples, coarea } => {
                profile(space, &mut rec, levels, samples.unwrap_or(DEFAULT_SAMPLES), *coarea)
            }
            Action::Pack { eps } => pack(space, &mut rec, eps),
            Action::Flow { target, count, profile, step } => {
                flows(space, &mut rec, *target, *count, profile.as_deref(), *step)
            }
            Action::BaseAngle { level, count, radii, directions } => base_angles(
                space,
                &mut rec,
                *level,
                *count,
                radii.as_deref().unwrap_or(&DEFAULT_RADII),
                directions.unwrap_or(16),
            ),
            Action::Compare(spec) => compare(space, &mut rec, spec),
        };
        if let Err(e) = res {
            rec.error = Some(e);
        }
        rec.runtime = start.elapsed().as_secs_f64();
        rec
    }
}

type StepResult = std::result::Result<(), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn volume(space: &SpaceModel, rec: &mut StepRecord, region: &str, depth: Option<f64>, samples: usize, mc: bool) -> StepResult {
    let reg = match (region, depth) {
        ("whole", _) => Region::Whole,
        ("collar", Some(r)) => Region::Collar(r),
        ("sublevel", Some(t)) => Region::Sublevel(t),
        ("collar" | "sublevel", None) => return Err(format!("region `{region}` needs a depth")),
        _ => return Err(format!("unknown region `{region}`")),
    };
    let est = if mc {
        measure::volume_monte_carlo(space, reg, samples, rec.seed)
    } else {
        measure::volume(space, reg, samples, rec.seed)
    }
    .map_err(err)?;
    let quantity = match depth {
        Some(d) if region != "whole" => format!("volume[{region}={d}]"),
        _ => "volume".to_string(),
    };
    rec.rows.push(estimate_row(rec, quantity, &est));
    Ok(())
}

fn estimate_row(rec: &StepRecord, quantity: String, est: &MeasureEstimate) -> Row {
    Row::estimate(&rec.name, quantity, est.value, est.std_error, rec.seed)
        .with_note(format!("method={};samples={}", est.method.name(), est.samples))
}

fn profile(space: &SpaceModel, rec: &mut StepRecord, levels: &[f64], samples: usize, coarea: bool) -> StepResult {
    let prof = measure::area_profile_with(space, levels, samples, rec.seed, coarea).map_err(err)?;
    let mut series = Series::new("area_profile", &rec.name, &["t", "area", "error", "reference"]);
    for i in 0..prof.t.len() {
        let reference = prof.reference.get(i).copied().unwrap_or(f64::NAN);
        let mut row = Row::estimate(&rec.name, format!("area[t={}]", prof.t[i]), prof.area[i], prof.error[i], rec.seed)
            .with_note(format!("method={};samples={}", prof.method.name(), prof.samples));
        if reference.is_finite() {
            row.bound = Some(reference);
        }
        rec.rows.push(row);
        series.rows.push(vec![prof.t[i], prof.area[i], prof.error[i], reference]);
    }
    rec.series.push(series);
    Ok(())
}

fn pack(space: &SpaceModel, rec: &mut StepRecord, eps: &[f64]) -> StepResult {
    let pts = measure::rough_volume(space, eps, rec.seed).map_err(err)?;
    let mut series = Series::new("packing_trend", &rec.name, &["eps", "beta", "normalized"]);
    for p in &pts {
        rec.rows.push(
            Row::estimate(&rec.name, format!("packing[eps={}]", p.eps), p.normalized, 0.0, rec.seed)
                .with_note(format!("beta={};pool={}", p.beta, p.pool)),
        );
        series.rows.push(vec![p.eps, p.beta as f64, p.normalized]);
    }
    rec.series.push(series);
    Ok(())
}

fn flows(space: &SpaceModel, rec: &mut StepRecord, target: f64, count: usize, profile: Option<&str>, step: Option<f64>) -> StepResult {
    use rayon::prelude::*;
    let step = step.unwrap_or_else(|| space.default_step());
    let prof = match profile {
        None => Some(ConcavityProfile::for_space(space).map_err(err)?),
        Some("sharafutdinov") => None,
        Some(name) => {
            let kind = match name {
                "kappa0" => ProfileKind::Kappa0,
                "kappa1" => ProfileKind::Kappa1,
                _ => return Err(format!("unknown profile `{name}`")),
            };
            let a = space.inradius_hint().unwrap_or(space.curvature_class().max_inradius());
            Some(ConcavityProfile::new(kind, a).map_err(err)?)
        }
    };
    let starts = space.sample_boundary(count, rec.seed).map_err(err)?;
    let curves: Vec<_> = starts
        .par_iter()
        .map(|p| match &prof {
            Some(pr) => flow::f_gradient_curve(space, pr, p, target, step),
            None => flow::sharafutdinov_flow(space, p, target, step),
        })
        .collect::<collarbound::Result<_>>()
        .map_err(err)?;
    let dim = space.ambient_dimension();
    let mut columns: Vec<String> = vec!["index".into()];
    columns.extend((0..dim).map(|i| format!("start{i}")));
    columns.extend((0..dim).map(|i| format!("end{i}")));
    columns.extend(["flow_time", "steps", "degenerate_steps", "end_rho"].map(String::from));
    let mut series = Series { kind: "flow_curves".into(), step: rec.name.clone(), columns, rows: Vec::new() };
    let (mut lo, mut hi, mut landing) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for (i, c) in curves.iter().enumerate() {
        let mut row = vec![i as f64];
        row.extend(c.start.iter());
        row.extend(c.endpoint().iter());
        row.extend([c.total_time(), c.steps() as f64, c.degenerate_steps as f64, c.end_rho()]);
        series.rows.push(row);
        lo = lo.min(c.total_time());
        hi = hi.max(c.total_time());
        landing = landing.max((c.end_rho() - target).abs());
    }
    let mut min_row = Row::estimate(&rec.name, format!("flow_time_min[T={target}]"), lo, 0.0, rec.seed);
    if let Some(pr) = &prof {
        min_row.bound = Some(pr.footpoint_flow_time(target));
        min_row = min_row.with_note(format!("profile={}", pr.name()));
    } else {
        min_row = min_row.with_note("profile=sharafutdinov");
    }
    rec.rows.push(min_row);
    rec.rows.push(Row::estimate(&rec.name, format!("flow_time_max[T={target}]"), hi, 0.0, rec.seed));
    rec.rows.push(Row::estimate(&rec.name, format!("landing_error[T={target}]"), landing, 0.0, rec.seed));
    rec.series.push(series);
    Ok(())
}

fn base_angles(
    space: &SpaceModel,
    rec: &mut StepRecord,
    level: Option<f64>,
    count: usize,
    radii: &[f64],
    directions: usize,
) -> StepResult {
    use rayon::prelude::*;
    let t = level.unwrap_or(0.0);
    let pts = if t == 0.0 {
        space.sample_boundary(count, rec.seed)
    } else {
        space.sample_level_set(t, count, rec.seed)
    }
    .map_err(err)?;
    let target = if t == 0.0 { ChordTarget::Boundary } else { ChordTarget::Level(t) };
    let ests = pts
        .par_iter()
        .enumerate()
        .map(|(i, p)| convexity::base_angle(space, target, p, radii, directions, rec.seed.wrapping_add(i as u64)))
        .collect::<collarbound::Result<Vec<_>>>()
        .map_err(err)?;
    let bound = convexity::hessian_bound(space.curvature_class(), t);
    let rel = space.tolerances().base_angle_rel;
    let mut series = Series::new("base_angles", &rec.name, &["index", "estimate", "mean", "spread"]);
    for (i, e) in ests.iter().enumerate() {
        let report = ComparisonReport::new(Claim::HessianComparison, &space.label(), Direction::AtLeast, bound, e.estimate)
            .with_param("t", t)
            .with_param("point", i as f64)
            .with_error(e.spread)
            .with_slack(rel * bound, 1e-9)
            .judge(space.hypothesis_violated());
        rec.rows.push(Row::from_report(&rec.name, &report, rec.seed).with_note(format!("mean={}", e.mean_estimate)));
        series.rows.push(vec![i as f64, e.estimate, e.mean_estimate, e.spread]);
    }
    rec.series.push(series);
    Ok(())
}

/// Claims a space can evaluate, given its capabilities.
pub fn applicable_claims(space: &SpaceModel) -> Vec<Claim> {
    let caps = space.capabilities();
    Claim::ALL
        .into_iter()
        .filter(|c| match c {
            Claim::CollarVolume | Claim::ConeVolume | Claim::LipschitzImage => true,
            Claim::Inradius => caps.sampling || space.inradius_hint().is_some(),
            Claim::Contraction | Claim::FlowTime | Claim::Rigidity => caps.metric && caps.sampling,
            Claim::HessianComparison => caps.chords,
        })
        .collect()
}

fn depth_limit(space: &SpaceModel) -> f64 {
    let a = space.inradius_hint().unwrap_or(f64::INFINITY);
    space.curvature_class().max_inradius().min(a)
}

fn default_levels(space: &SpaceModel) -> Vec<f64> {
    let a = depth_limit(space);
    match space.curvature_class() {
        CurvatureClass::NonNegative => [0.25, 0.5, 0.75].iter().map(|f| f * a).collect(),
        CurvatureClass::AtLeastOne => [0.25, 0.5, 2.0 / 3.0].iter().map(|f| f * a).collect(),
    }
}

fn compare(space: &SpaceModel, rec: &mut StepRecord, spec: &CompareSpec) -> StepResult {
    let claims: Vec<Claim> = match &spec.claims {
        None => applicable_claims(space),
        Some(list) if list.iter().any(|c| c == "all") => applicable_claims(space),
        Some(list) => list
            .iter()
            .map(|c| Claim::parse(c).ok_or_else(|| format!("unknown claim `{c}`")))
            .collect::<Result<_, _>>()?,
    };
    let mut v = Validator::default().with_seed(rec.seed).monte_carlo(spec.monte_carlo);
    if let Some(s) = spec.samples {
        v = v.with_samples(s);
    }
    if let Some(p) = spec.pairs {
        v = v.with_pairs(p);
    }
    if let Some(p) = spec.points {
        v = v.with_points(p);
    }
    let a = depth_limit(space);
    let rs = spec.r.clone().unwrap_or_else(|| vec![0.5 * a]);
    let flow_t = spec.flow_t.unwrap_or(0.5 * a);
    let levels = spec.levels.clone().unwrap_or_else(|| default_levels(space));
    let mut failures = Vec::new();
    let name = rec.name.clone();
    let seed = rec.seed;
    let mut push = |rec: &mut StepRecord, r: collarbound::Result<ComparisonReport>, what: &str| match r {
        Ok(rep) => rec.rows.push(Row::from_report(&name, &rep, seed)),
        Err(e) => failures.push(format!("{what}: {e}")),
    };
    for claim in claims {
        match claim {
            Claim::CollarVolume => {
                for &r in &rs {
                    push(rec, v.check_collar_volume(space, r), claim.name());
                }
            }
            Claim::ConeVolume => push(rec, v.check_cone_volume(space), claim.name()),
            Claim::Inradius => push(rec, v.check_inradius(space), claim.name()),
            Claim::Contraction => match v.check_contraction_with_ratios(space, flow_t) {
                Ok((rep, ratios)) => {
                    let mut s = Series::new("contraction_ratios", &rec.name, &["pair", "ratio", "error", "reference"]);
                    for (i, pr) in ratios.iter().enumerate() {
                        s.rows.push(vec![i as f64, pr.ratio, 0.0, rep.bound]);
                    }
                    rec.series.push(s);
                    push(rec, Ok(rep), claim.name());
                }
                Err(e) => push(rec, Err(e), claim.name()),
            },
            Claim::FlowTime => push(rec, v.check_flow_time(space, flow_t), claim.name()),
            Claim::Rigidity => {
                for &r in &rs {
                    push(rec, v.detect_rigidity(space, r, None), claim.name());
                }
            }
            Claim::HessianComparison => {
                let opts = HessianCheckOptions { seed: rec.seed, ..Default::default() };
                match convexity::hessian_comparison_check(space, &levels, &opts) {
                    Ok(reps) => {
                        for rep in reps {
                            push(rec, Ok(rep), claim.name());
                        }
                    }
                    Err(e) => push(rec, Err(e), claim.name()),
                }
            }
            Claim::LipschitzImage => push(rec, lipschitz_image(space, flow_t, v.samples, rec.seed), claim.name()),
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}

/// Level-set area after flowing by `T` against `w(T)^{n-1}` times the
/// boundary area.
fn lipschitz_image(space: &SpaceModel, t: f64, samples: usize, seed: u64) -> collarbound::Result<ComparisonReport> {
    let source = measure::boundary_area(space)?;
    let image = match measure::analytic_level_area(space, t) {
        Some(a) => MeasureEstimate::analytic(a),
        None => {
            let h = 0.02 * depth_limit(space);
            let prof = measure::area_profile(space, &[t - h, t, t + h], samples, seed)?;
            MeasureEstimate { value: prof.area[1], std_error: prof.error[1], samples: prof.samples, method: prof.method }
        }
    };
    let l = space.curvature_class().warping(t);
    let d = (space.dimension() - 1) as u32;
    let mut rep = measure::lipschitz_image_bound_check(l, &source, &image, d).with_param("T", t);
    rep.space = space.label();
    Ok(rep.judge(space.hypothesis_violated()))
}
