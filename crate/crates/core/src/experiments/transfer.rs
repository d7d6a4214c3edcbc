use log::warn;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    build_h3, evolve_lindblad, evolve_schrodinger, DensityMatrix, FockState, SchrodingerRun,
    Tolerances, Trajectory,
};
use crate::error::Result;
use crate::grid::{TimeGrid, DEFAULT_POINTS};
use crate::schedule::CouplingSchedule;
use crate::sta::{synthesize_tqd_pulses, SynthesisMode, TqdPulseSummary};
use crate::system::{FockDims, SystemConfig};

/// Half-width of closed optomechanical transfer windows, in units of 1/ν.
pub const TRANSFER_HALF_WIDTH: f64 = 20.0;

/// Below this δ / max G the middle mode is not reliably eliminated.
const RATIO_WARNING: f64 = 5.0;

/// Samples per period of the fastest frequency on the grid.
const SAMPLES_PER_PERIOD: f64 = 16.0;

#[derive(Debug, Clone)]
pub struct TransferRun {
    pub grid: TimeGrid,
    pub trajectory: Trajectory,
    pub final_state: FockState,
    pub max_phonon: f64,
    pub final_p2: f64,
    pub fidelity: f64,
    pub pulses: Option<TqdPulseSummary>,
}

/// Output points for a window of length `span` that keep at least
/// [`DEFAULT_POINTS`] and resolve oscillations at `frequency`.
pub fn output_points(span: f64, frequency: f64) -> usize {
    let resolved = (span * frequency.abs() / std::f64::consts::TAU * SAMPLES_PER_PERIOD).ceil();
    DEFAULT_POINTS.max(resolved as usize + 1)
}

/// Centred transfer window for rate `nu` with output sampling matched to `delta`.
pub fn transfer_grid(nu: f64, delta: f64) -> Result<TimeGrid> {
    let span = 2.0 * TRANSFER_HALF_WIDTH / nu;
    TimeGrid::protocol_window(nu, TRANSFER_HALF_WIDTH, output_points(span, delta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Schrodinger,
    Lindblad,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Schrodinger => "schrodinger",
            Engine::Lindblad => "lindblad",
        }
    }
}

/// One H₃ run from |1 0_m 0⟩ with vacuum mechanics.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub engine: Engine,
    pub trajectory: Trajectory,
    /// Final ⟨0₁ 1₂| tr_m ρ |0₁ 1₂⟩.
    pub fidelity: f64,
}

/// Runs `config` with the chosen engine on `grid`.
pub fn simulate(config: &SystemConfig, grid: &TimeGrid, engine: Engine, tol: Tolerances) -> Result<Simulation> {
    config.validate()?;
    let dims = config.fock_dims;
    let [d1, d2] = config.detunings;
    let h = build_h3(config.schedule.clone(), d1, d2, dims)?;
    let psi0 = FockState::basis(dims, [1, 0, 0])?;
    match engine {
        Engine::Schrodinger => {
            let run = evolve_schrodinger(&h, &psi0, grid, tol)?;
            let space = run.final_state.space();
            let mut fidelity = 0.0;
            for nm in 0..dims.mechanical {
                fidelity += run.final_state.amplitudes()[space.index([0, nm, 1])?].norm_sqr();
            }
            Ok(Simulation {
                engine,
                trajectory: run.trajectory,
                fidelity,
            })
        }
        Engine::Lindblad => {
            let rho0 = DensityMatrix::from_pure(&psi0);
            let run = evolve_lindblad(&h, &config.dissipation, &rho0, grid, tol)?;
            let fidelity = run.trajectory.final_fidelity().expect("lindblad records F");
            Ok(Simulation {
                engine,
                trajectory: run.trajectory,
                fidelity,
            })
        }
    }
}

/// Closed Fock-space run of H₃ from |1 0 0⟩.
pub fn run_transfer(
    schedule: &CouplingSchedule,
    delta: f64,
    grid: &TimeGrid,
    dims: FockDims,
    tol: Tolerances,
) -> Result<TransferRun> {
    let h = build_h3(schedule.clone(), delta, delta, dims)?;
    let psi0 = FockState::basis(dims, [1, 0, 0])?;
    let SchrodingerRun {
        trajectory,
        final_state,
    } = evolve_schrodinger(&h, &psi0, grid, tol)?;
    let space = final_state.space();
    let fidelity = (0..dims.mechanical)
        .map(|nm| final_state.amplitudes()[space.index([0, nm, 1]).expect("fits")].norm_sqr())
        .sum();
    Ok(TransferRun {
        grid: *grid,
        max_phonon: trajectory.max_population(1),
        final_p2: trajectory.final_populations()[2],
        fidelity,
        trajectory,
        final_state,
        pulses: None,
    })
}

/// Synthesized pulses at (δ, ν) run through H₃ with δ₁ = δ₂ = δ.
pub fn run_fig4_transfer(delta: f64, nu: f64, tol: Tolerances) -> Result<TransferRun> {
    let (schedule, summary) = synthesize_tqd_pulses(nu, delta, SynthesisMode::EqualCouplings)?;
    if summary.detuning_ratio < RATIO_WARNING {
        warn!(
            "δ / max G = {:.3} is below {RATIO_WARNING}; the middle mode is not far detuned",
            summary.detuning_ratio
        );
    }
    let grid = transfer_grid(nu, delta)?;
    let mut run = run_transfer(&schedule, delta, &grid, FockDims::CLOSED, tol)?;
    run.pulses = Some(summary);
    Ok(run)
}
