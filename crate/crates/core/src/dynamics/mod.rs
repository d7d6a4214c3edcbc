//! Propagation in the amplitude, Schrödinger and master-equation pictures.

mod amplitude;
mod fock;
mod hamiltonian;
mod lindblad;
mod observables;
mod ode;
mod schrodinger;
mod state;
mod trajectory;

pub use amplitude::{propagate_amplitudes, propagate_tqd_amplitudes};
pub use fock::{FockSpace, SparseOp};
pub use hamiltonian::{build_h3, Hamiltonian, MatrixGenerator, QuadraticHamiltonian};
pub use lindblad::{evolve_lindblad, LindbladRun, EDGE_WARNING_THRESHOLD};
pub use observables::fidelity;
pub use ode::{Dopri5, SolverStats, Tolerances};
pub use schrodinger::{evolve_schrodinger, SchrodingerRun};
pub use state::{AmplitudeState, DensityMatrix, FockState};
pub use trajectory::{Diagnostics, Trajectory};
