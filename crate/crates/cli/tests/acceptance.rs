//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with the measured values and its runtime; the process exits nonzero if
//! any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8, LN_2, PI};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use collarbound::compare::Validator;
use collarbound::convexity::{self, ChordTarget};
use collarbound::flow::{self, ConcavityProfile};
use collarbound::measure::{self, Region};
use collarbound::{make_cone, AuditPolicy, ConeBase, ConeKind, Point, SpaceModel};
use collarbound_cli::run_scenario;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn pt(v: &[f64]) -> Point {
    Point::from_row_slice(v)
}

fn ball() -> SpaceModel {
    SpaceModel::ball(3, 1.0).unwrap()
}

fn hemisphere() -> SpaceModel {
    SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap()
}

/// The (1, 0.9, 0.9) spheroid. Its meridian curvature at the equator is 0.9,
/// so it is built with the violation flagged rather than rejected.
fn spheroid() -> SpaceModel {
    SpaceModel::ellipsoid(&[1.0, 0.9, 0.9], AuditPolicy::FlagViolation).unwrap()
}

fn collar_ball() -> Outcome {
    let v = Validator::default().with_seed(11).monte_carlo(true);
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [0.25, 0.5, 0.75, 1.0] {
        let start = Instant::now();
        let rep = v.check_collar_volume(&ball(), r).unwrap();
        // 4π ∫₀^r (1-t)² dt
        let exact = 4.0 * PI * (1.0 - (1.0 - r).powi(3)) / 3.0;
        let sigma = rep.measured_error;
        let ok = (rep.measured - exact).abs() <= 3.0 * sigma
            && sigma <= 0.005 * exact
            && start.elapsed().as_secs_f64() <= 30.0;
        pass &= ok;
        parts.push(format!("r={r}: {:.5} vs {:.5} (σ={:.1e})", rep.measured, exact, sigma));
    }
    Outcome::new(pass, parts.join("; "))
}

fn collar_hemisphere() -> Outcome {
    let v = Validator::default().with_seed(12).monte_carlo(true);
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_2] {
        let start = Instant::now();
        let rep = v.check_collar_volume(&hemisphere(), r).unwrap();
        let exact = 2.0 * PI * r.sin();
        let sigma = rep.measured_error;
        let ok = (rep.measured - exact).abs() <= 3.0 * sigma && start.elapsed().as_secs_f64() <= 30.0;
        pass &= ok;
        parts.push(format!("r={r:.4}: {:.5} vs {:.5} (σ={:.1e})", rep.measured, exact, sigma));
    }
    Outcome::new(pass, parts.join("; "))
}

fn collar_strict() -> Outcome {
    let rep = Validator::default().with_seed(13).check_collar_volume(&spheroid(), 0.3).unwrap();
    let gap = rep.bound - rep.measured;
    let sigma = rep.measured_error;
    Outcome::new(
        gap >= 3.0 * sigma && sigma > 0.0,
        format!("bound {:.5} measured {:.5} gap {:.5} = {:.1}σ", rep.bound, rep.measured, gap, gap / sigma),
    )
}

fn contraction() -> Outcome {
    let v = Validator::default().with_seed(14).with_pairs(1000);
    let max = |s: &SpaceModel, t: f64| {
        let ratios = v.contraction_ratios(s, t).unwrap();
        (ratios.len(), ratios.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max))
    };
    let (nb, rb) = max(&ball(), 0.3);
    let (nh, rh) = max(&hemisphere(), FRAC_PI_3);
    let sq = SpaceModel::square_control(2).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in [(-0.3, 0.3), (0.0, 0.3), (-0.2, 0.4), (0.1, 0.15)] {
        let (p, q) = (pt(&[a, -1.0]), pt(&[b, -1.0]));
        let fp = flow::sharafutdinov_flow(&sq, &p, 0.5, 1e-3).unwrap();
        let fq = flow::sharafutdinov_flow(&sq, &q, 0.5, 1e-3).unwrap();
        let ratio = sq.distance(fp.endpoint(), fq.endpoint()).unwrap() / sq.distance(&p, &q).unwrap();
        worst = worst.max((ratio - 1.0).abs());
    }
    let pass = nb >= 1000 && nh >= 1000 && (rb - 0.7).abs() <= 1e-3 && (rh - 0.5).abs() <= 1e-3 && worst <= 1e-6;
    Outcome::new(
        pass,
        format!("ball {rb:.6} over {nb} pairs; hemisphere {rh:.6} over {nh} pairs; square edge |ratio-1| {worst:.1e}"),
    )
}

/// Depth at which the inward normal from a boundary point of the spheroid
/// meets the long axis.
fn axis_crossing_depth(p: &Point, a: f64, b: f64) -> f64 {
    let g = pt(&[p[0] / (a * a), p[1] / (b * b), p[2] / (b * b)]);
    b * b * g.norm()
}

fn flow_time() -> Outcome {
    let b = ball();
    let profile = ConcavityProfile::for_space(&b).unwrap();
    let p = pt(&[0.0, 0.0, 1.0]);
    let time = flow::flow_time(&b, &profile, &p, 0.5, 1e-3).unwrap();
    let ball_ok = (time - LN_2).abs() <= 1e-4;

    let e = spheroid();
    let t = 0.85;
    let profile = ConcavityProfile::for_space(&e).unwrap();
    let minimum = profile.footpoint_flow_time(t);
    let times = Validator::default().with_seed(15).with_points(200).flow_times(&e, t).unwrap();
    let crossing: Vec<f64> = times
        .iter()
        .filter(|(p, _)| axis_crossing_depth(p, 1.0, 0.9) <= t - 0.005)
        .map(|(_, s)| s - minimum)
        .collect();
    let least = crossing.iter().copied().fold(f64::INFINITY, f64::min);
    let pass = ball_ok && !crossing.is_empty() && least > 1e-3;
    Outcome::new(
        pass,
        format!(
            "ball {time:.7} vs ln 2 {LN_2:.7}; spheroid T={t}: {} of {} samples cross the axis, least excess {least:.2e}",
            crossing.len(),
            times.len()
        ),
    )
}

fn base_angles() -> Outcome {
    let radii = [0.04, 0.02, 0.01];
    let mut pass = true;
    let mut parts = Vec::new();
    let b = ball();
    for t in [0.25, 0.5, 0.75] {
        let p = &b.sample_level_set(t, 1, 16).unwrap()[0];
        let est = convexity::base_angle(&b, ChordTarget::Level(t), p, &radii, 12, 17).unwrap();
        let want = 1.0 / (1.0 - t);
        pass &= (est.estimate / want - 1.0).abs() <= 0.05;
        parts.push(format!("ball t={t}: {:.4}/{want:.4}", est.estimate));
    }
    let h = hemisphere();
    for t in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_3] {
        let p = &h.sample_level_set(t, 1, 18).unwrap()[0];
        let est = convexity::base_angle(&h, ChordTarget::Level(t), p, &radii, 12, 19).unwrap();
        let want = t.tan();
        pass &= (est.estimate / want - 1.0).abs() <= 0.05;
        parts.push(format!("hemisphere t={t:.4}: {:.4}/{want:.4}", est.estimate));
    }
    let sq = SpaceModel::square_control(2).unwrap();
    let est = convexity::base_angle(&sq, ChordTarget::Boundary, &pt(&[0.3, -1.0]), &radii, 12, 20).unwrap();
    pass &= est.estimate <= 0.01;
    parts.push(format!("square edge {:.2e}", est.estimate));
    Outcome::new(pass, parts.join("; "))
}

fn inradius() -> Outcome {
    let v = Validator::default().with_seed(21);
    let cases = [(ball(), 1.0, "ball"), (hemisphere(), FRAC_PI_2, "hemisphere"), (spheroid(), 0.9, "spheroid")];
    let mut pass = true;
    let mut parts = Vec::new();
    for (s, want, name) in cases {
        let got = v.check_inradius(&s).unwrap().measured;
        pass &= (got - want).abs() <= 1e-3;
        parts.push(format!("{name} {got:.6}"));
    }
    Outcome::new(pass, parts.join("; "))
}

fn cones() -> Outcome {
    let lin = make_cone(ConeBase::RoundSphere { dim: 2, radius: 1.0 }, ConeKind::Linear, 1.0).unwrap();
    let sph = make_cone(ConeBase::RoundSphere { dim: 1, radius: 1.0 }, ConeKind::Spherical, FRAC_PI_2).unwrap();
    let vl = measure::volume(&lin, Region::Whole, 1000, 0).unwrap();
    let vs = measure::volume(&sph, Region::Whole, 1000, 0).unwrap();
    let pass = (vl.value - 4.0 * PI / 3.0).abs() <= 1e-12
        && (vs.value - 2.0 * PI).abs() <= 1e-12
        && vl.method == measure::Method::Analytic
        && vs.method == measure::Method::Analytic;
    Outcome::new(pass, format!("linear {:.15}; spherical {:.15}", vl.value, vs.value))
}

fn packing() -> Outcome {
    let sched = [0.2, 0.1, 0.05];
    let big = measure::rough_volume(&SpaceModel::ball(2, 1.0).unwrap(), &sched, 22).unwrap();
    let small = measure::rough_volume(&SpaceModel::ball(2, 0.5).unwrap(), &sched, 23).unwrap();
    let ratio = big[2].normalized / small[2].normalized;
    Outcome::new((ratio / 4.0 - 1.0).abs() <= 0.15, format!("ε²β ratio at ε=0.05: {ratio:.4}"))
}

fn rigidity() -> Outcome {
    let v = Validator::default().with_seed(24).with_pairs(100);
    let rb = v.detect_rigidity(&ball(), 0.6, None).unwrap();
    let re = v.detect_rigidity(&spheroid(), 0.3, None).unwrap();
    let pass = rb.measured <= 1e-3 && rb.rigid == Some(true) && re.measured >= 1e-2 && re.rigid == Some(false);
    Outcome::new(
        pass,
        format!(
            "ball residual {:.2e} rigid={:?}; spheroid residual {:.2e} rigid={:?}",
            rb.measured, rb.rigid, re.measured, re.rigid
        ),
    )
}

fn scenarios() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let mut pass = true;
    let mut names = Vec::new();
    for sc in scenarios() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_scenario(&sc, Some(a.path())).unwrap();
        run_scenario(&sc, Some(b.path())).unwrap();
        let ra = std::fs::read(a.path().join("results.tsv")).unwrap();
        let rb = std::fs::read(b.path().join("results.tsv")).unwrap();
        let same = ra == rb && !ra.is_empty();
        pass &= same;
        let stem = sc.file_stem().unwrap().to_string_lossy().into_owned();
        names.push(format!("{stem}={}", if same { "identical" } else { "DIFFERENT" }));
    }
    Outcome::new(pass && !names.is_empty(), names.join(", "))
}

type Criterion = (u32, &'static str, f64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "collar volume equality, ball", 120.0, collar_ball),
        (2, "collar volume equality, hemisphere", 90.0, collar_hemisphere),
        (3, "strict collar inequality, spheroid", 60.0, collar_strict),
        (4, "contraction factors", 60.0, contraction),
        (5, "flow times", 30.0, flow_time),
        (6, "base angles", 60.0, base_angles),
        (7, "inradius", 10.0, inradius),
        (8, "cone closed forms", 1.0, cones),
        (9, "packing rough volume", 120.0, packing),
        (10, "rigidity fingerprint", 120.0, rigidity),
        (11, "scenario determinism", f64::INFINITY, determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let pass = outcome.pass && secs <= limit;
        if !pass {
            failed += 1;
        }
        let timing = if limit.is_finite() { format!("{secs:.2}s of {limit}s") } else { format!("{secs:.2}s") };
        println!("criterion {id:>2} {} {name}: {} [{timing}]", if pass { "PASS" } else { "FAIL" }, outcome.detail);
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
