use nalgebra::Vector3;
use num_complex::Complex64;

use super::hamiltonian::MatrixGenerator;
use super::ode::{Dopri5, Tolerances};
use super::state::AmplitudeState;
use super::trajectory::{Diagnostics, Trajectory};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::schedule::CouplingSchedule;
use crate::sta::counterdiabatic_matrix;

type C64 = Complex64;

const HERMITICITY_TOLERANCE: f64 = 1e-10;

/// Integrates i v′ = M(t) v on `grid`.
pub fn propagate_amplitudes(
    generator: &MatrixGenerator,
    v0: AmplitudeState,
    grid: &TimeGrid,
    tol: Tolerances,
) -> Result<Trajectory> {
    let times = grid.times();
    let y0: Vec<C64> = v0.0.iter().copied().collect();
    let n0 = v0.norm();
    let mut populations = Vec::with_capacity(times.len());
    let mut amplitudes = Vec::with_capacity(times.len());
    let mut norm_drift: f64 = 0.0;
    let minus_i = C64::new(0.0, -1.0);

    let stats = Dopri5::new(tol).integrate(
        |t, y, dy| {
            let m = generator(t)?;
            let herm = m.hermiticity_error();
            if herm > HERMITICITY_TOLERANCE {
                return Err(Error::invalid(
                    "matrix schedule",
                    format!("M({t}) is not Hermitian (deviation {herm:.3e})"),
                ));
            }
            let out = m.apply(&Vector3::new(y[0], y[1], y[2]));
            for i in 0..3 {
                dy[i] = minus_i * out[i];
            }
            Ok(())
        },
        &times,
        &y0,
        |_, _, y| {
            let v = AmplitudeState(Vector3::new(y[0], y[1], y[2]));
            norm_drift = norm_drift.max((v.norm() - n0).abs());
            populations.push(v.populations());
            amplitudes.push(v.0);
            Ok(())
        },
    )?;

    Ok(Trajectory {
        times,
        populations,
        trace: None,
        fidelity: None,
        amplitudes: Some(amplitudes),
        diagnostics: Diagnostics {
            engine: "amplitude".into(),
            tolerances: Some(tol),
            stats,
            norm_drift: Some(norm_drift),
            ..Default::default()
        },
    })
}

/// Propagates under the counter-diabatic matrix of `schedule` alone.
pub fn propagate_tqd_amplitudes(
    schedule: &CouplingSchedule,
    v0: AmplitudeState,
    grid: &TimeGrid,
    tol: Tolerances,
) -> Result<Trajectory> {
    let schedule = schedule.clone();
    let generator = move |t: f64| counterdiabatic_matrix(&schedule, t).map(|cd| cd.matrix);
    let mut traj = propagate_amplitudes(&generator, v0, grid, tol)?;
    traj.diagnostics.engine = "amplitude-counterdiabatic".into();
    Ok(traj)
}
