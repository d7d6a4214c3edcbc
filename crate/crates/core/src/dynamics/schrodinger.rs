use num_complex::Complex64;

use super::fock::SparseOp;
use super::hamiltonian::Hamiltonian;
use super::observables::{mechanical_edge, occupation_table, populations_from_weights};
use super::ode::{Dopri5, Tolerances};
use super::state::FockState;
use super::trajectory::{Diagnostics, Trajectory};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

type C64 = Complex64;

pub struct SchrodingerRun {
    pub trajectory: Trajectory,
    pub final_state: FockState,
}

/// Integrates i ψ′ = H(t) ψ on `grid`.
pub fn evolve_schrodinger(
    h: &dyn Hamiltonian,
    psi0: &FockState,
    grid: &TimeGrid,
    tol: Tolerances,
) -> Result<SchrodingerRun> {
    let space = *h.space();
    if psi0.space() != &space {
        return Err(Error::InvalidDims(format!(
            "state dims {:?} differ from Hamiltonian dims {:?}",
            psi0.space().mode_dims(),
            space.mode_dims()
        )));
    }
    let times = grid.times();
    let table = occupation_table(&space);
    let mut op = SparseOp::new(space.dim());
    let mut populations = Vec::with_capacity(times.len());
    let mut norm_drift: f64 = 0.0;
    let mut edge: f64 = 0.0;
    let mut last = psi0.amplitudes().to_vec();
    let minus_i = C64::new(0.0, -1.0);

    let stats = Dopri5::new(tol).integrate(
        |t, y, dy| {
            h.assemble(t, &mut op)?;
            dy.fill(C64::new(0.0, 0.0));
            op.apply_add(y, dy, minus_i);
            Ok(())
        },
        &times,
        psi0.amplitudes(),
        |k, _, y| {
            let norm: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            norm_drift = norm_drift.max((norm - 1.0).abs());
            populations.push(populations_from_weights(&table, |i| y[i].norm_sqr()));
            edge = edge.max(mechanical_edge(&space, |i| y[i].norm_sqr()));
            if k + 1 == times.len() {
                last.copy_from_slice(y);
            }
            Ok(())
        },
    )?;

    Ok(SchrodingerRun {
        trajectory: Trajectory {
            times,
            populations,
            trace: None,
            fidelity: None,
            amplitudes: None,
            diagnostics: Diagnostics {
                engine: "schrodinger".into(),
                tolerances: Some(tol),
                stats,
                norm_drift: Some(norm_drift),
                mechanical_edge_population: Some(edge),
                ..Default::default()
            },
        },
        final_state: FockState::from_parts(space, last),
    })
}
