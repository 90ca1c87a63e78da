//! Checks against values computed independently of the library: brute-force
//! boundary scans, closed forms and quadrature.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use approx::assert_abs_diff_eq;
use collarbound::compare::Verdict;
use collarbound::flow::{self, ConcavityProfile, ProfileKind};
use collarbound::measure::{self, Method, Region};
use collarbound::{make_cone, make_warped_collar, AuditPolicy, ConeBase, ConeKind, CurvatureClass, Point, SpaceModel};

fn pt(v: &[f64]) -> Point {
    Point::from_row_slice(v)
}

/// Nearest point of a lat-long scan of the ellipsoid surface.
fn brute_nearest(axes: [f64; 3], x: [f64; 3], steps: usize) -> (f64, [f64; 3]) {
    let mut best = (f64::INFINITY, [0.0; 3]);
    for i in 0..=steps {
        let theta = PI * i as f64 / steps as f64;
        let (st, ct) = theta.sin_cos();
        for j in 0..steps {
            let phi = 2.0 * PI * j as f64 / steps as f64;
            let (sp, cp) = phi.sin_cos();
            let p = [axes[0] * ct, axes[1] * st * cp, axes[2] * st * sp];
            let d = ((p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2) + (p[2] - x[2]).powi(2)).sqrt();
            if d < best.0 {
                best = (d, p);
            }
        }
    }
    best
}

fn prolate() -> SpaceModel {
    SpaceModel::ellipsoid(&[1.0, 0.9, 0.9], AuditPolicy::FlagViolation).unwrap()
}

#[test]
fn ellipsoid_rho_at_origin_matches_scan() {
    let e = prolate();
    let (d, _) = brute_nearest([1.0, 0.9, 0.9], [0.0; 3], 1000);
    let rho = e.rho(&pt(&[0.0; 3])).unwrap();
    assert!(rho <= d + 1e-12, "solver {rho} above scan {d}");
    assert!(d - rho < 1e-5, "solver {rho} scan {d}");
    assert_abs_diff_eq!(rho, 0.9, epsilon = 1e-12);
}

#[test]
fn ellipsoid_footpoint_matches_scan() {
    let e = prolate();
    let x = [0.2, 0.1, 0.0];
    let (d, p) = brute_nearest([1.0, 0.9, 0.9], x, 1000);
    let f = e.footpoint(&pt(&x)).unwrap();
    let rho = e.rho(&pt(&x)).unwrap();
    assert!(rho <= d + 1e-12 && d - rho < 1e-5, "solver {rho} scan {d}");
    assert_abs_diff_eq!((&f - pt(&x)).norm(), rho, epsilon = 1e-12);
    // the scan resolves position only to its spacing
    assert!((f - pt(&p)).norm() < 1e-2);
}

#[test]
fn ellipsoid_rho_on_random_points_matches_scan() {
    let e = prolate();
    for x in e.sample_interior(6, 11).unwrap() {
        let (d, _) = brute_nearest([1.0, 0.9, 0.9], [x[0], x[1], x[2]], 600);
        let rho = e.rho(&x).unwrap();
        // a scan with spacing h overshoots by about h²/ρ
        let h = PI / 600.0;
        assert!(rho <= d + 1e-12 && d - rho < h * h / rho, "at {x}: solver {rho} scan {d}");
    }
}

#[test]
fn spheroid_area_matches_closed_form() {
    let (a, b) = (1.0f64, 0.9f64);
    let ecc = (1.0 - b * b / (a * a)).sqrt();
    let exact = 2.0 * PI * b * b * (1.0 + a / (b * ecc) * ecc.asin());
    let est = measure::boundary_area(&prolate()).unwrap();
    assert_eq!(est.method, Method::Triangulation);
    assert!((est.value - exact).abs() <= 1e-4 * exact, "{} vs {exact}", est.value);
    assert!(est.std_error < 1e-4 * exact);
    assert!((est.value - exact).abs() <= 10.0 * est.std_error + 1e-9);
}

#[test]
fn ellipse_perimeter_matches_series() {
    // Gauss-Kummer series for the perimeter of an ellipse
    let (a, b) = (1.0f64, 0.9f64);
    let h = ((a - b) / (a + b)).powi(2);
    let mut sum = 1.0;
    let mut coeff = 1.0f64;
    for k in 1..30 {
        let kf = k as f64;
        coeff *= (0.5 - (kf - 1.0)) / kf;
        sum += coeff * coeff * h.powi(k);
    }
    let exact = PI * (a + b) * sum;
    let e = SpaceModel::ellipsoid(&[1.0, 0.9], AuditPolicy::FlagViolation).unwrap();
    let est = measure::boundary_area(&e).unwrap();
    assert!((est.value - exact).abs() < 1e-6, "{} vs {exact}", est.value);
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn footpoint_flow_times_match_quadrature() {
    // along a normal geodesic dh/ds = f'(h), so the time to reach T is ∫ dh / f'(h)
    let ball = SpaceModel::ball(3, 1.0).unwrap();
    let prof = ConcavityProfile::new(ProfileKind::Kappa0, 1.0).unwrap();
    for t in [0.5, 0.9] {
        let q = simpson(|h| 1.0 / (1.0 - h), 0.0, t, 2000);
        let time = flow::flow_time(&ball, &prof, &pt(&[1.0, 0.0, 0.0]), t, 1e-3).unwrap();
        assert!((time - q).abs() < 1e-6, "T={t}: {time} vs {q}");
    }
    let hemi = SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap();
    let prof = ConcavityProfile::new(ProfileKind::Kappa1, FRAC_PI_2).unwrap();
    let q = simpson(|h| 1.0 / h.cos(), 0.0, FRAC_PI_4, 2000);
    let time = flow::flow_time(&hemi, &prof, &pt(&[1.0, 0.0, 0.0]), FRAC_PI_4, 1e-3).unwrap();
    assert!((time - q).abs() < 1e-6, "{time} vs {q}");
    assert_abs_diff_eq!(q, 0.881373587019543, epsilon = 1e-9);
}

#[test]
fn monte_carlo_ball_volume_within_three_sigma() {
    let ball = SpaceModel::ball(3, 1.0).unwrap();
    let est = measure::volume_monte_carlo(&ball, Region::Whole, 1_000_000, 5).unwrap();
    let exact = 4.0 * PI / 3.0;
    assert!(est.std_error / exact <= 0.005);
    assert!((est.value - exact).abs() <= 3.0 * est.std_error, "{est:?}");
}

#[test]
fn cone_volumes_are_exact() {
    let lin = make_cone(ConeBase::RoundSphere { dim: 2, radius: 1.0 }, ConeKind::Linear, 1.0).unwrap();
    let v = measure::volume(&lin, Region::Whole, 1000, 0).unwrap();
    assert_eq!(v.method, Method::Analytic);
    assert_abs_diff_eq!(v.value, 4.0 * PI / 3.0, epsilon = 1e-12);
    let sph = make_cone(ConeBase::RoundSphere { dim: 1, radius: 1.0 }, ConeKind::Spherical, FRAC_PI_2).unwrap();
    let v = measure::volume(&sph, Region::Whole, 1000, 0).unwrap();
    assert_abs_diff_eq!(v.value, 2.0 * PI, epsilon = 1e-12);
    // an abstract base still carries measures
    let abs = make_cone(ConeBase::Abstract { dim: 2, measure: 3.0 }, ConeKind::Linear, 0.5).unwrap();
    let v = measure::volume(&abs, Region::Whole, 1000, 0).unwrap();
    assert_abs_diff_eq!(v.value, 3.0 * 0.125 / 3.0, epsilon = 1e-12);
}

#[test]
fn warped_collar_volumes() {
    let c = make_warped_collar(3, 4.0 * PI, CurvatureClass::NonNegative, 1.0).unwrap();
    assert_abs_diff_eq!(measure::volume(&c, Region::Whole, 1000, 0).unwrap().value, 4.0 * PI / 3.0, epsilon = 1e-12);
    let c = make_warped_collar(2, 2.0 * PI, CurvatureClass::AtLeastOne, FRAC_PI_2).unwrap();
    assert_abs_diff_eq!(measure::volume(&c, Region::Whole, 1000, 0).unwrap().value, 2.0 * PI, epsilon = 1e-12);
    assert!(make_warped_collar(3, 4.0 * PI, CurvatureClass::NonNegative, 0.0).is_err());
}

#[test]
fn lipschitz_image_examples() {
    let ball = SpaceModel::ball(3, 1.0).unwrap();
    let prof = measure::area_profile(&ball, &[0.0, 0.15, 0.3], 1000, 0).unwrap();
    let a0 = measure::MeasureEstimate::analytic(prof.area[0]);
    let a3 = measure::MeasureEstimate::analytic(prof.area[2]);
    let rep = measure::lipschitz_image_bound_check(0.7, &a0, &a3, 2);
    assert_eq!(rep.verdict, Verdict::PassAtEquality);

    let hemi = SpaceModel::spherical_cap(2, FRAC_PI_2).unwrap();
    let prof = measure::area_profile(&hemi, &[0.0, FRAC_PI_4 / 2.0, FRAC_PI_4], 1000, 0).unwrap();
    assert_abs_diff_eq!(prof.area[2], SQRT_2 * PI, epsilon = 1e-12);
    let rep = measure::lipschitz_image_bound_check(
        FRAC_PI_4.cos(),
        &measure::MeasureEstimate::analytic(prof.area[0]),
        &measure::MeasureEstimate::analytic(prof.area[2]),
        1,
    );
    assert_eq!(rep.verdict, Verdict::PassAtEquality);

    let same = measure::MeasureEstimate { value: 2.0, std_error: 0.01, samples: 100, method: Method::MonteCarlo };
    assert!(measure::lipschitz_image_bound_check(1.0, &same, &same, 3).verdict.is_pass());
}

#[test]
fn coarea_profile_of_ball_matches_level_areas() {
    let ball = SpaceModel::ball(3, 1.0).unwrap();
    let grid: Vec<f64> = (0..=8).map(|i| 0.1 * i as f64).collect();
    let prof = measure::area_profile_with(&ball, &grid, 1_000_000, 2, true).unwrap();
    assert_eq!(prof.method, Method::CoareaDifference);
    for (i, &t) in grid.iter().enumerate() {
        let exact = 4.0 * PI * (1.0 - t).powi(2);
        // one-sided end differences carry an O(h²) bias of V'''h²/3
        let bias = if i == 0 || i == grid.len() - 1 { 8.0 * PI * 0.01 / 3.0 } else { 8.0 * PI * 0.01 / 6.0 };
        assert!(
            (prof.area[i] - exact).abs() <= 4.0 * prof.error[i] + bias,
            "t={t}: {} ± {} vs {exact}",
            prof.area[i],
            prof.error[i]
        );
    }
}
