//! Tolerance ladder shared by the solvers and validators.
//!
//! | name                 | default | used for                                       |
//! |----------------------|---------|------------------------------------------------|
//! | `medial_separation`  | 1e-6    | two footpoints count as distinct               |
//! | `medial_rho`         | 1e-8    | two footpoints count as equally near           |
//! | `sigma`              | 3       | statistical slack multiplier                   |
//! | `contraction_rel`    | 1e-3    | relative slack on pair-distance ratios         |
//! | `rigidity_residual`  | 1e-3    | warped-product fit threshold                   |
//! | `base_angle_rel`     | 0.05    | relative slack on base-angle comparisons       |
//! | `inradius_abs`       | 1e-3    | absolute slack on inradius                     |
//! | `flow_time_abs`      | 1e-4    | absolute slack on gradient-curve flow times    |
//! | `level_landing`      | 1e-10   | `|rho(end) - target|` when a flow stops        |
//! | `step_fraction`      | 1e-3    | default integrator step as fraction of inradius|

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub medial_separation: f64,
    pub medial_rho: f64,
    pub sigma: f64,
    pub contraction_rel: f64,
    pub rigidity_residual: f64,
    pub base_angle_rel: f64,
    pub inradius_abs: f64,
    pub flow_time_abs: f64,
    pub level_landing: f64,
    pub step_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            medial_separation: 1e-6,
            medial_rho: 1e-8,
            sigma: 3.0,
            contraction_rel: 1e-3,
            rigidity_residual: 1e-3,
            base_angle_rel: 0.05,
            inradius_abs: 1e-3,
            flow_time_abs: 1e-4,
            level_landing: 1e-10,
            step_fraction: 1e-3,
        }
    }
}

impl Tolerances {
    /// Names accepted by [`Tolerances::set`].
    pub const NAMES: [&'static str; 10] = [
        "medial_separation",
        "medial_rho",
        "sigma",
        "contraction_rel",
        "rigidity_residual",
        "base_angle_rel",
        "inradius_abs",
        "flow_time_abs",
        "level_landing",
        "step_fraction",
    ];

    /// Overrides one entry by name. Returns `false` for an unknown name.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        let slot = match name {
            "medial_separation" => &mut self.medial_separation,
            "medial_rho" => &mut self.medial_rho,
            "sigma" => &mut self.sigma,
            "contraction_rel" => &mut self.contraction_rel,
            "rigidity_residual" => &mut self.rigidity_residual,
            "base_angle_rel" => &mut self.base_angle_rel,
            "inradius_abs" => &mut self.inradius_abs,
            "flow_time_abs" => &mut self.flow_time_abs,
            "level_landing" => &mut self.level_landing,
            "step_fraction" => &mut self.step_fraction,
            _ => return false,
        };
        *slot = value;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_known_and_unknown() {
        let mut tol = Tolerances::default();
        assert!(tol.set("sigma", 4.0));
        assert_eq!(tol.sigma, 4.0);
        assert!(!tol.set("nope", 1.0));
        for name in Tolerances::NAMES {
            assert!(tol.clone().set(name, 0.5));
        }
    }
}
