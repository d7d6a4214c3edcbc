use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::matrix::{ModeMatrix, ModeMatrixTag};
use crate::error::{Error, Result};
use crate::schedule::CouplingSchedule;

type C64 = Complex64;

/// Orthonormal basis {ψ₁, ψ₂, ψ₃} at one instant.
pub type ModeBasis = [Vector3<C64>; 3];

const GRAM_TOLERANCE: f64 = 1e-8;

/// Counter-diabatic generator together with its scalar coupling
/// G = (ġ₁g₂ − g₁ġ₂)/g₀².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterDiabatic {
    pub matrix: ModeMatrix,
    pub coupling: f64,
    /// g₁ = g₂ = 0, where G is undefined; the matrix is set to zero.
    pub degenerate: bool,
    /// The derivative came from a one-sided tabulated stencil.
    pub one_sided: bool,
}

/// Closed-form counter-diabatic matrix of the three-mode chain at `t`.
pub fn counterdiabatic_matrix(schedule: &CouplingSchedule, t: f64) -> Result<CounterDiabatic> {
    let (g1, g2) = schedule.eval(t)?;
    let rates = schedule.eval_rates(t)?;
    let g0_sq = g1 * g1 + g2 * g2;
    if g0_sq == 0.0 {
        return Ok(CounterDiabatic {
            matrix: ModeMatrix::zero(ModeMatrixTag::CounterDiabatic),
            coupling: 0.0,
            degenerate: true,
            one_sided: rates.one_sided,
        });
    }
    let coupling = (rates.g1_dot * g2 - g1 * rates.g2_dot) / g0_sq;
    Ok(CounterDiabatic {
        matrix: ModeMatrix::counterdiabatic(coupling),
        coupling,
        degenerate: false,
        one_sided: rates.one_sided,
    })
}

fn gram_deviation(basis: &ModeBasis) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            let overlap = basis[i].dotc(&basis[j]);
            worst = worst.max((overlap - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// M′(t) = i Σₙ |ψ̇ₙ⟩⟨ψₙ| for an arbitrary smooth orthonormal basis
/// schedule, with ψ̇ from a five-point central difference of width `step`.
pub fn generic_counterdiabatic<F>(basis: F, t: f64, step: f64) -> Result<ModeMatrix>
where
    F: Fn(f64) -> Result<ModeBasis>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("step", "must be positive"));
    }
    let offsets = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut samples = Vec::with_capacity(5);
    for k in offsets {
        let tk = t + k * step;
        let b = basis(tk)?;
        let deviation = gram_deviation(&b);
        if deviation > GRAM_TOLERANCE {
            return Err(Error::InvalidBasis { t: tk, deviation });
        }
        samples.push(b);
    }
    let scale = C64::new(1.0 / (12.0 * step), 0.0);
    let mut m = Matrix3::<C64>::zeros();
    for n in 0..3 {
        let near: Vector3<C64> = samples[3][n] - samples[1][n];
        let far: Vector3<C64> = samples[4][n] - samples[0][n];
        let dpsi = (near * C64::new(8.0, 0.0) - far) * scale;
        m += dpsi * samples[2][n].adjoint();
    }
    Ok(ModeMatrix::new(m * C64::i(), ModeMatrixTag::General))
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;
    use crate::grid::TimeGrid;
    use crate::schedule::vitanov_theta_dot;
    use crate::sta::closed_form_eigenmodes;

    fn vitanov_basis(g0: f64, nu: f64) -> impl Fn(f64) -> Result<ModeBasis> {
        let sched = CouplingSchedule::vitanov(g0, nu).unwrap();
        move |t| {
            let (g1, g2) = sched.eval(t)?;
            let modes = closed_form_eigenmodes(g1, g2)?;
            Ok(modes.map(|v| v.map(|x| C64::new(x, 0.0))))
        }
    }

    #[test]
    fn constant_couplings_have_no_correction() {
        let s = CouplingSchedule::constant(0.4, 1.1).unwrap();
        let cd = counterdiabatic_matrix(&s, 3.0).unwrap();
        assert_eq!(cd.coupling, 0.0);
        assert_eq!(cd.matrix.entries(), &Matrix3::zeros());
        assert!(!cd.degenerate);
    }

    #[test]
    fn degenerate_instant_flags_zero() {
        let s = CouplingSchedule::constant(0.0, 0.0).unwrap();
        let cd = counterdiabatic_matrix(&s, 0.0).unwrap();
        assert!(cd.degenerate);
        assert_eq!(cd.matrix.entries(), &Matrix3::zeros());
    }

    #[test]
    fn vitanov_midpoint_equals_theta_dot() {
        for nu in [0.5, 1.0, 2.0] {
            let s = CouplingSchedule::vitanov(1.0, nu).unwrap();
            let cd = counterdiabatic_matrix(&s, 5.0 / nu).unwrap();
            assert_relative_eq!(cd.coupling, std::f64::consts::PI * nu / 8.0, max_relative = 1e-14);
            assert_eq!(cd.matrix.get(0, 2), C64::new(0.0, cd.coupling));
            assert_eq!(cd.matrix.get(2, 0), C64::new(0.0, -cd.coupling));
        }
    }

    #[test]
    fn vitanov_identity_over_grid() {
        for nu in [0.5, 1.0, 2.0] {
            let s = CouplingSchedule::vitanov(1.0, nu).unwrap();
            let grid = TimeGrid::vitanov_default(nu).unwrap();
            for t in grid.times() {
                let g = counterdiabatic_matrix(&s, t).unwrap().coupling;
                assert!((g.abs() - vitanov_theta_dot(t, nu).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn linear_ramp_against_symbolic_derivative() {
        // g₁ = t, g₂ = 1 ⇒ G = 1/(1 + t²)
        let samples = (0..=20).map(|i| {
            let t = 0.05 * i as f64;
            (t, t, 1.0)
        });
        let s = CouplingSchedule::tabulated(samples.collect()).unwrap();
        for i in 0..=20 {
            let t = 0.05 * i as f64;
            let cd = counterdiabatic_matrix(&s, t).unwrap();
            assert_relative_eq!(cd.coupling.abs(), 1.0 / (1.0 + t * t), epsilon = 1e-12);
        }
        assert!(counterdiabatic_matrix(&s, 0.0).unwrap().one_sided);
        assert!(!counterdiabatic_matrix(&s, 0.5).unwrap().one_sided);
    }

    #[test]
    fn static_basis_gives_zero() {
        let e = Matrix3::<C64>::identity();
        let fixed = |_t: f64| -> Result<ModeBasis> {
            Ok([e.column(0).into_owned(), e.column(1).into_owned(), e.column(2).into_owned()])
        };
        let m = generic_counterdiabatic(fixed, 1.0, 1e-3).unwrap();
        assert!(m.entries().camax() < 1e-15);
    }

    #[test]
    fn rejects_non_orthonormal_basis() {
        let bad = |_t: f64| -> Result<ModeBasis> {
            let v = Vector3::new(C64::new(1.0, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 0.0));
            Ok([v, v, v])
        };
        assert!(matches!(
            generic_counterdiabatic(bad, 0.0, 1e-3),
            Err(Error::InvalidBasis { .. })
        ));
    }

    #[test]
    fn generic_matches_closed_form_on_vitanov() {
        for nu in [0.5, 1.0, 2.0] {
            let basis = vitanov_basis(1.0, nu);
            let sched = CouplingSchedule::vitanov(1.0, nu).unwrap();
            let grid = TimeGrid::vitanov_default(nu).unwrap();
            let h = 1e-3 / nu;
            for t in grid.times().into_iter().step_by(10).skip(1) {
                let generic = generic_counterdiabatic(&basis, t, h).unwrap();
                let closed = counterdiabatic_matrix(&sched, t).unwrap().matrix;
                let diff = (generic.entries() - closed.entries()).camax();
                assert!(diff < 1e-6, "ν={nu} t={t} diff={diff:e}");
                // Hermitian by antisymmetry of Σ ψ̇ψ†
                assert!(generic.hermiticity_error() < 1e-8);
            }
        }
    }
}
