//! Closed-form measures of round spheres and the power integrals that appear
//! in warped-product volumes.

use std::f64::consts::PI;

/// Area of the unit `k`-sphere `S^k ⊂ R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    // |S^k| = 2π/(k-1) |S^{k-2}|
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

/// Volume of the unit `n`-ball.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n - 1) / n as f64
}

/// `∫₀^x sin^m(s) ds`.
pub fn sin_power_integral(m: usize, x: f64) -> f64 {
    match m {
        0 => x,
        1 => 1.0 - x.cos(),
        _ => {
            let mf = m as f64;
            -x.sin().powi(m as i32 - 1) * x.cos() / mf + (mf - 1.0) / mf * sin_power_integral(m - 2, x)
        }
    }
}

/// `∫₀^x cos^m(s) ds`.
pub fn cos_power_integral(m: usize, x: f64) -> f64 {
    match m {
        0 => x,
        1 => x.sin(),
        _ => {
            let mf = m as f64;
            x.cos().powi(m as i32 - 1) * x.sin() / mf + (mf - 1.0) / mf * cos_power_integral(m - 2, x)
        }
    }
}

/// `∫₀^x (1 - s)^m ds`.
pub fn linear_power_integral(m: usize, x: f64) -> f64 {
    let k = m as f64 + 1.0;
    (1.0 - (1.0 - x).powi(m as i32 + 1)) / k
}

/// `∫_a^b s^m ds`.
pub fn monomial_integral(m: usize, a: f64, b: f64) -> f64 {
    let k = m as i32 + 1;
    (b.powi(k) - a.powi(k)) / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = 2000;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(2), 4.0 * PI, epsilon = 1e-14);
        assert_relative_eq!(sphere_area(3), 2.0 * PI * PI, epsilon = 1e-13);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, epsilon = 1e-14);
        assert_relative_eq!(ball_volume(2), PI, epsilon = 1e-14);
    }

    #[test]
    fn power_integrals_match_quadrature() {
        for m in 0..7 {
            for &x in &[0.1, 0.7, 1.3, PI / 2.0, 2.5] {
                let s = simpson(|t| t.sin().powi(m as i32), 0.0, x);
                let c = simpson(|t| t.cos().powi(m as i32), 0.0, x);
                assert_relative_eq!(sin_power_integral(m, x), s, epsilon = 1e-11);
                assert_relative_eq!(cos_power_integral(m, x), c, epsilon = 1e-11);
            }
            let l = simpson(|t| (1.0 - t).powi(m as i32), 0.0, 0.8);
            assert_relative_eq!(linear_power_integral(m, 0.8), l, epsilon = 1e-12);
        }
    }
}
