use super::matrix::ModeMatrix;
use crate::error::{Error, Result};
use crate::schedule::{theta_dot_max, CouplingSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SynthesisMode {
    /// G₁ = G₂ = √(δ θ̇).
    #[default]
    EqualCouplings,
}

/// Peak coupling of a synthesized pulse pair and the large-detuning ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TqdPulseSummary {
    pub max_coupling: f64,
    /// δ / max Gᵢ; the elimination of the middle mode needs this ≫ 1.
    pub detuning_ratio: f64,
}

impl TqdPulseSummary {
    pub fn for_parameters(nu: f64, delta: f64) -> Self {
        let max_coupling = (delta * theta_dot_max(nu)).sqrt();
        Self {
            max_coupling,
            detuning_ratio: delta / max_coupling,
        }
    }
}

/// Pulses whose effective outer-mode coupling G₁G₂/δ reproduces the
/// counter-diabatic coupling θ̇ of the Vitanov shape with rate `nu`.
pub fn synthesize_tqd_pulses(
    nu: f64,
    delta: f64,
    mode: SynthesisMode,
) -> Result<(CouplingSchedule, TqdPulseSummary)> {
    if !(nu > 0.0 && nu.is_finite()) {
        return Err(Error::invalid("nu", format!("must be positive, got {nu}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", format!("must be positive, got {delta}")));
    }
    match mode {
        SynthesisMode::EqualCouplings => Ok((
            CouplingSchedule::tqd(nu, delta),
            TqdPulseSummary::for_parameters(nu, delta),
        )),
    }
}

/// Beam-splitter matrix left after eliminating the middle mode:
/// (1,3) = (3,1) = G₁G₂/δ.
pub fn effective_matrix(g1: f64, g2: f64, delta: f64) -> Result<ModeMatrix> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite and non-zero"));
    }
    Ok(ModeMatrix::effective(g1 * g2 / delta))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;
    use nalgebra::Matrix3;
    use num_complex::Complex64;

    use super::*;
    use crate::grid::TimeGrid;
    use crate::schedule::vitanov_theta_dot;
    use crate::sta::counterdiabatic_matrix;

    #[test]
    fn peak_coupling_and_ratio() {
        let (s, summary) = synthesize_tqd_pulses(2.0, 40.0, SynthesisMode::EqualCouplings).unwrap();
        assert_relative_eq!(summary.max_coupling, (10.0 * PI).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(summary.max_coupling, 5.604991216397929, max_relative = 1e-12);
        assert_relative_eq!(summary.detuning_ratio, 7.136496464611085, max_relative = 1e-12);
        let (g1, g2) = s.eval(2.5).unwrap();
        assert_relative_eq!(g1, summary.max_coupling, max_relative = 1e-14);
        assert_eq!(g1, g2);
    }

    #[test]
    fn pulses_vanish_in_tails() {
        let (s, _) = synthesize_tqd_pulses(2.0, 40.0, SynthesisMode::EqualCouplings).unwrap();
        let (a, b) = s.eval(1e3).unwrap();
        assert!(a < 1e-100 && b < 1e-100);
        let (a, b) = s.eval(-1e3).unwrap();
        assert!(a < 1e-100 && b < 1e-100);
    }

    #[test]
    fn invalid_parameters() {
        assert!(synthesize_tqd_pulses(0.0, 40.0, SynthesisMode::EqualCouplings).is_err());
        assert!(synthesize_tqd_pulses(2.0, -1.0, SynthesisMode::EqualCouplings).is_err());
        assert!(effective_matrix(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn effective_matrix_shape() {
        assert_eq!(effective_matrix(0.0, 0.0, 40.0).unwrap().entries(), &Matrix3::zeros());
        let m = effective_matrix(2.0, 3.0, 4.0).unwrap();
        assert_eq!(m.get(0, 2), Complex64::new(1.5, 0.0));
        assert_eq!(m.get(2, 0), Complex64::new(1.5, 0.0));
        assert_eq!(m.entries().iter().filter(|z| z.norm() > 0.0).count(), 2);
    }

    #[test]
    fn midpoint_effective_coupling_is_theta_dot() {
        let (s, _) = synthesize_tqd_pulses(2.0, 40.0, SynthesisMode::EqualCouplings).unwrap();
        let (g1, g2) = s.eval(2.5).unwrap();
        let m = effective_matrix(g1, g2, 40.0).unwrap();
        assert_relative_eq!(m.get(0, 2).re, PI / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn matching_condition_over_grid() {
        for nu in [0.5, 1.0, 2.0] {
            let delta = 40.0;
            let (s, _) = synthesize_tqd_pulses(nu, delta, SynthesisMode::EqualCouplings).unwrap();
            let vit = CouplingSchedule::vitanov(1.0, nu).unwrap();
            for t in TimeGrid::vitanov_default(nu).unwrap().times() {
                let (g1, g2) = s.eval(t).unwrap();
                let theta_dot = vitanov_theta_dot(t, nu).unwrap();
                assert!((g1 * g2 / delta - theta_dot).abs() < 1e-10);
                let m2 = effective_matrix(g1, g2, delta).unwrap();
                let m1 = counterdiabatic_matrix(&vit, t).unwrap().matrix;
                assert!((m2.get(0, 2).norm() - m1.get(0, 2).norm()).abs() < 1e-10);
            }
        }
    }
}
