use crate::dynamics::{propagate_amplitudes, propagate_tqd_amplitudes, AmplitudeState, Tolerances, Trajectory};
use crate::error::Result;
use crate::grid::{TimeGrid, DEFAULT_POINTS, PROTOCOL_HALF_WIDTH};
use crate::schedule::CouplingSchedule;
use crate::sta::ModeMatrix;

pub const FIG2_NUS: [f64; 3] = [0.5, 1.0, 2.0];

/// Threshold on p₂ that defines the transfer-completion time.
pub const COMPLETION_THRESHOLD: f64 = 0.99;

/// Adiabatic and counter-diabatic transfer at one shape rate.
#[derive(Debug, Clone)]
pub struct Fig2Point {
    pub nu: f64,
    pub grid: TimeGrid,
    /// (t, g₁, g₂) of the adiabatic pulses.
    pub couplings: Vec<(f64, f64, f64)>,
    pub adiabatic: Trajectory,
    pub tqd: Trajectory,
    /// First time, measured from the grid start, at which the
    /// counter-diabatic p₂ reaches 0.99.
    pub tqd_completion_time: Option<f64>,
    /// |Δ final p₂| when the tolerances are halved, (adiabatic, tqd).
    pub convergence_delta: (f64, f64),
}

/// Runs both protocols with g₀ = 1 MHz and v₀ = [1, 0, 0] on the centred
/// protocol window of each ν.
pub fn run_fig2_suite(nus: &[f64], tol: Tolerances) -> Result<Vec<Fig2Point>> {
    nus.iter().map(|&nu| run_point(nu, tol)).collect()
}

fn run_point(nu: f64, tol: Tolerances) -> Result<Fig2Point> {
    let schedule = CouplingSchedule::vitanov(1.0, nu)?;
    let grid = TimeGrid::protocol_window(nu, PROTOCOL_HALF_WIDTH, DEFAULT_POINTS)?;
    let couplings = grid
        .times()
        .into_iter()
        .map(|t| schedule.eval(t).map(|(g1, g2)| (t, g1, g2)))
        .collect::<Result<Vec<_>>>()?;

    let v0 = AmplitudeState::excited(0);
    let adiabatic_gen = {
        let s = schedule.clone();
        move |t: f64| ModeMatrix::from_schedule(&s, t)
    };
    let adiabatic = propagate_amplitudes(&adiabatic_gen, v0, &grid, tol)?;
    let tqd = propagate_tqd_amplitudes(&schedule, v0, &grid, tol)?;

    let fine = tol.halved();
    let adiabatic_fine = propagate_amplitudes(&adiabatic_gen, v0, &grid, fine)?;
    let tqd_fine = propagate_tqd_amplitudes(&schedule, v0, &grid, fine)?;
    let convergence_delta = (
        (adiabatic.final_populations()[2] - adiabatic_fine.final_populations()[2]).abs(),
        (tqd.final_populations()[2] - tqd_fine.final_populations()[2]).abs(),
    );

    let tqd_completion_time = tqd
        .first_time_reaching(2, COMPLETION_THRESHOLD)
        .map(|t| t - grid.t_start());
    Ok(Fig2Point {
        nu,
        grid,
        couplings,
        adiabatic,
        tqd,
        tqd_completion_time,
        convergence_delta,
    })
}
