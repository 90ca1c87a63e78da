//! Convex bodies given as sublevel sets `{g ≤ 0}` of a smooth strongly convex
//! function, with the nearest-boundary-point solver and the curvature audit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::rng;
use crate::tolerances::Tolerances;

/// Defining functions supported for implicit convex bodies.
#[derive(Debug, Clone, PartialEq)]
pub enum ImplicitBody {
    /// `Σ x_i² / a_i² ≤ 1`.
    Ellipsoid { semi_axes: Vec<f64> },
}

impl ImplicitBody {
    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        if semi_axes.len() < 2 {
            return Err(Error::Invalid("ellipsoid needs at least two semi-axes".into()));
        }
        if semi_axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::Invalid("ellipsoid semi-axes must be positive".into()));
        }
        Ok(Self::Ellipsoid { semi_axes: semi_axes.to_vec() })
    }

    pub fn dimension(&self) -> usize {
        match self {
            Self::Ellipsoid { semi_axes } => semi_axes.len(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Ellipsoid { semi_axes } => {
                x.iter().zip(semi_axes).map(|(xi, a)| (xi / a) * (xi / a)).sum::<f64>() - 1.0
            }
        }
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Ellipsoid { semi_axes } => {
                for ((o, xi), a) in out.iter_mut().zip(x).zip(semi_axes) {
                    *o = 2.0 * xi / (a * a);
                }
            }
        }
    }

    /// Row-major Hessian into `out` (length `n*n`).
    pub fn hessian(&self, _x: &[f64], out: &mut [f64]) {
        match self {
            Self::Ellipsoid { semi_axes } => {
                let n = semi_axes.len();
                out.iter_mut().for_each(|v| *v = 0.0);
                for (i, a) in semi_axes.iter().enumerate() {
                    out[i * n + i] = 2.0 / (a * a);
                }
            }
        }
    }

    /// A point strictly inside the body.
    pub fn center(&self) -> Vec<f64> {
        vec![0.0; self.dimension()]
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Self::Ellipsoid { semi_axes } => {
                (semi_axes.iter().map(|a| -a).collect(), semi_axes.clone())
            }
        }
    }

    pub fn volume(&self) -> Option<f64> {
        match self {
            Self::Ellipsoid { semi_axes } => {
                Some(crate::special::ball_volume(semi_axes.len()) * semi_axes.iter().product::<f64>())
            }
        }
    }

    pub fn inradius(&self) -> Option<f64> {
        match self {
            Self::Ellipsoid { semi_axes } => semi_axes.iter().cloned().reduce(f64::min),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Ellipsoid { semi_axes } => {
                let axes: Vec<String> = semi_axes.iter().map(|a| format!("{a}")).collect();
                format!("ellipsoid({})", axes.join(","))
            }
        }
    }

    /// Cheap bounds `lo ≤ rho(x) ≤ hi` for an interior point. For an
    /// ellipsoid `E` and `x ∈ ∂(sE)`, `E ⊇ sE + (1-s)B(a_min)` gives the lower
    /// bound and the radial segment to `x/s` the upper one.
    pub fn rho_bracket(&self, x: &[f64]) -> (f64, f64) {
        match self {
            Self::Ellipsoid { semi_axes } => {
                let s = (self.value(x) + 1.0).max(0.0).sqrt();
                let amin = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
                let amax = semi_axes.iter().cloned().fold(0.0, f64::max);
                let gap = (1.0 - s).max(0.0);
                (gap * amin, gap * amax)
            }
        }
    }

    /// Boundary point on the ray `center + s·dir`, `s > 0`.
    pub fn ray_hit(&self, dir: &[f64]) -> Vec<f64> {
        let c = self.center();
        let (lo, hi) = self.bounding_box();
        let diam: f64 = lo.iter().zip(&hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
        let at = |s: f64| -> Vec<f64> { c.iter().zip(dir).map(|(ci, di)| ci + s * di).collect() };
        let (mut a, mut b) = (0.0, diam);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if self.value(&at(m)) < 0.0 {
                a = m;
            } else {
                b = m;
            }
            if b - a < 1e-16 * diam {
                break;
            }
        }
        at(0.5 * (a + b))
    }
}

/// Minimum and maximum principal curvature over a boundary sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureAudit {
    pub samples: usize,
    pub min_curvature: f64,
    pub max_curvature: f64,
    pub certified: bool,
}

/// A stationary point of the distance from a query point to the boundary.
#[derive(Debug, Clone)]
pub(crate) struct Stationary {
    pub point: Vec<f64>,
    pub distance: f64,
}

/// An implicit body together with its precomputed boundary seed set.
#[derive(Debug, Clone)]
pub(crate) struct ConvexBody {
    pub body: ImplicitBody,
    dim: usize,
    seeds: Vec<f64>,
}

impl ConvexBody {
    pub fn new(body: ImplicitBody) -> Self {
        let dim = body.dimension();
        let seeds = seed_directions(dim).iter().flat_map(|d| body.ray_hit(d)).collect();
        Self { body, dim, seeds }
    }

    pub fn seed_count(&self) -> usize {
        self.seeds.len() / self.dim
    }

    pub fn seed(&self, i: usize) -> &[f64] {
        &self.seeds[i * self.dim..(i + 1) * self.dim]
    }

    pub fn audit(&self) -> CurvatureAudit {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.seed_count() {
            let k = principal_curvatures(&self.body, self.seed(i));
            lo = lo.min(k[0]);
            hi = hi.max(k[k.len() - 1]);
        }
        CurvatureAudit {
            samples: self.seed_count(),
            min_curvature: lo,
            max_curvature: hi,
            certified: lo >= 1.0 - 1e-6,
        }
    }

    /// Stationary points of `|x - p|` over the boundary within `band` of the
    /// nearest one, sorted by distance.
    pub fn stationary_points(&self, x: &[f64], band: f64, _tol: &Tolerances) -> Result<Vec<Stationary>> {
        let mut out = match &self.body {
            ImplicitBody::Ellipsoid { semi_axes } => ellipsoid_stationary(semi_axes, x),
        };
        if out.is_empty() {
            return Err(Error::ProjectionDivergence { iterations: 0, residual: f64::NAN });
        }
        out.sort_by(|a, b| a.distance.total_cmp(&b.distance));
        let cut = out[0].distance + band;
        out.retain(|s| s.distance <= cut);
        out.dedup_by(|a, b| dist2(&a.point, &b.point) < 1e-24);
        Ok(out)
    }

    pub fn project_to_surface(&self, p: &mut [f64]) {
        let mut g = vec![0.0; self.dim];
        for _ in 0..4 {
            let v = self.body.value(p);
            if v.abs() < 1e-16 {
                break;
            }
            self.body.gradient(p, &mut g);
            let gg = dot(&g, &g);
            for i in 0..self.dim {
                p[i] -= v * g[i] / gg;
            }
        }
    }

    /// Unit outward normal at a boundary point.
    pub fn outward_normal(&self, p: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        self.body.gradient(p, &mut g);
        let gn = norm(&g);
        g.iter().map(|v| v / gn).collect()
    }
}

/// All stationary points of `|x - p|` on `Σ p_i²/a_i² = 1`.
///
/// A stationary point has `p_i = x_i a_i² / (a_i² + s)` for a root `s` of
/// `F(s) = Σ x_i² a_i² / (a_i² + s)² = 1`. Roots are bracketed between the
/// poles `-a_i²`, where `F` is convex, and bisected in the offset from the
/// nearest pole so that points close to the medial axis keep full precision.
/// When `x` lies on a coordinate plane a pole can drop out of `F`; if
/// `F < 1` there, a whole sphere of stationary points sits at that pole and
/// one point per free axis and sign represents it.
fn ellipsoid_stationary(semi_axes: &[f64], x: &[f64]) -> Vec<Stationary> {
    let sq: Vec<f64> = semi_axes.iter().map(|a| a * a).collect();
    let c: Vec<f64> = x.iter().zip(&sq).map(|(xi, q)| xi * xi * q).collect();

    // distinct pole values a², ascending; the pole in s is -a²
    let mut groups: Vec<f64> = sq.clone();
    groups.sort_by(f64::total_cmp);
    groups.dedup();
    let active = |g: f64| sq.iter().zip(&c).any(|(q, ci)| *q == g && *ci > 0.0);

    // F and the denominators for s = -g + delta
    let f_at = |g: f64, delta: f64| -> f64 {
        sq.iter().zip(&c).filter(|(_, ci)| **ci > 0.0).map(|(q, ci)| ci / ((q - g) + delta).powi(2)).sum()
    };
    let point_at = |g: f64, delta: f64| -> Vec<f64> {
        x.iter().zip(&sq).map(|(xi, q)| if *xi == 0.0 { 0.0 } else { xi * q / ((q - g) + delta) }).collect()
    };
    let finish = |p: Vec<f64>| Stationary { distance: dist2(x, &p).sqrt(), point: p };

    // bisect `F(-g + sign·d) = 1` over d in (lo, hi) given F - 1 changes sign
    let bisect = |g: f64, sign: f64, mut lo: f64, mut hi: f64| -> f64 {
        let above_at_lo = f_at(g, sign * lo) > 1.0;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (f_at(g, sign * mid) > 1.0) == above_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    // grow `d` until F(-g + sign·d) < 1
    let reach = |g: f64, sign: f64| -> f64 {
        let mut d = 1.0;
        while f_at(g, sign * d) >= 1.0 && d < 1e300 {
            d *= 2.0;
        }
        d
    };

    let mut out = Vec::new();
    let poles: Vec<f64> = groups.iter().cloned().filter(|&g| active(g)).collect();
    if let (Some(&top), Some(&bottom)) = (poles.first(), poles.last()) {
        // above the highest pole F falls from ∞ to 0: the nearest point
        let hi = reach(top, 1.0);
        out.push(finish(point_at(top, bisect(top, 1.0, 0.0, hi))));
        // below the lowest pole F rises from 0 to ∞
        let hi = reach(bottom, -1.0);
        out.push(finish(point_at(bottom, -bisect(bottom, -1.0, 0.0, hi))));
    }
    for w in poles.windows(2) {
        // s ∈ (-w[1], -w[0]); F is convex and blows up at both ends
        let (upper, lower) = (w[0], w[1]);
        let width = lower - upper;
        let slope = |d: f64| -> f64 {
            sq.iter().zip(&c).filter(|(_, ci)| **ci > 0.0).map(|(q, ci)| -ci / ((q - lower) + d).powi(3)).sum()
        };
        let (mut lo, mut hi) = (0.0, width);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let dmin = 0.5 * (lo + hi);
        if f_at(lower, dmin) > 1.0 {
            continue;
        }
        let d_left = bisect(lower, 1.0, 0.0, dmin);
        out.push(finish(point_at(lower, d_left)));
        let d_right = bisect(upper, -1.0, 0.0, width - dmin);
        out.push(finish(point_at(upper, -d_right)));
    }
    for &g in groups.iter().filter(|&&g| !active(g)) {
        let rest = 1.0 - f_at(g, 0.0);
        if rest < 0.0 {
            continue;
        }
        let base = point_at(g, 0.0);
        for (j, q) in sq.iter().enumerate() {
            if *q != g {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut p = base.clone();
                p[j] = sign * (g * rest).sqrt();
                out.push(finish(p));
            }
        }
    }
    out
}

/// Principal curvatures of `{g = 0}` at `p`, ascending.
pub fn principal_curvatures(body: &ImplicitBody, p: &[f64]) -> Vec<f64> {
    let n = body.dimension();
    let mut g = vec![0.0; n];
    body.gradient(p, &mut g);
    let gn = norm(&g);
    let normal = DVector::from_iterator(n, g.iter().map(|v| v / gn));
    let mut h = vec![0.0; n * n];
    body.hessian(p, &mut h);
    let hess = DMatrix::from_row_slice(n, n, &h);

    let basis = tangent_basis(&normal);
    let k = basis.len();
    let mut shape = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            shape[(i, j)] = (basis[i].transpose() * &hess * &basis[j])[(0, 0)] / gn;
        }
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(shape).eigenvalues.iter().cloned().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Orthonormal basis of the complement of a unit vector.
pub fn tangent_basis(normal: &DVector<f64>) -> Vec<DVector<f64>> {
    let n = normal.len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    for axis in 0..n {
        let mut v = DVector::zeros(n);
        v[axis] = 1.0;
        v -= normal * normal[axis];
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let len = v.norm();
        if len > 1e-8 {
            basis.push(v / len);
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

fn seed_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..720)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / 720.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        3 => {
            // Fibonacci lattice
            let count = 2048;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut rng = rng::stream(0x5eed_5eed, 0);
            (0..4096).map(|_| rng::unit_vector(&mut rng, dim).iter().cloned().collect()).collect()
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spheroid_curvature_extremes() {
        // semi-axes (1, 0.9, 0.9): meridian curvature b/a² = 0.9 at the equator,
        // a/b² at the tips
        let body = ImplicitBody::ellipsoid(&[1.0, 0.9, 0.9]).unwrap();
        let k = principal_curvatures(&body, &[0.0, 0.9, 0.0]);
        assert_relative_eq!(k[0], 0.9, epsilon = 1e-12);
        assert_relative_eq!(k[1], 1.0 / 0.9, epsilon = 1e-12);
        let k = principal_curvatures(&body, &[1.0, 0.0, 0.0]);
        assert_relative_eq!(k[0], 1.0 / 0.81, epsilon = 1e-12);

        let audit = ConvexBody::new(body).audit();
        assert!(!audit.certified);
        assert!((audit.min_curvature - 0.9).abs() < 2e-3);
    }

    #[test]
    fn certified_spheroid_audit() {
        let body = ImplicitBody::ellipsoid(&[0.9, 0.85, 0.85]).unwrap();
        let audit = ConvexBody::new(body).audit();
        assert!(audit.certified);
        assert!((audit.min_curvature - 0.85 / 0.81).abs() < 2e-3);
    }

    #[test]
    fn ray_hits_lie_on_boundary() {
        let body = ImplicitBody::ellipsoid(&[1.0, 0.9, 0.9]).unwrap();
        let cb = ConvexBody::new(body.clone());
        for i in (0..cb.seed_count()).step_by(97) {
            assert!(body.value(cb.seed(i)).abs() < 1e-12);
        }
    }
}
