use log::warn;
use num_complex::Complex64;

use super::fock::SparseOp;
use super::hamiltonian::Hamiltonian;
use super::observables::{mechanical_edge, occupation_table, populations_from_weights, transfer_fidelity};
use super::ode::{Dopri5, Tolerances};
use super::state::{hermiticity_error, DensityMatrix};
use super::trajectory::{Diagnostics, Trajectory};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::system::Dissipation;

type C64 = Complex64;

/// Population of the top mechanical level above which the truncation is
/// reported as too small.
pub const EDGE_WARNING_THRESHOLD: f64 = 1e-4;

pub struct LindbladRun {
    pub trajectory: Trajectory,
    pub final_state: DensityMatrix,
}

/// Integrates
/// ρ′ = −i[H, ρ] + κ₁ L[a₁]ρ + κ₂ L[a₂]ρ + γ(n+1) L[b]ρ + γn L[b†]ρ
/// with L[A]ρ = AρA† − ½{A†A, ρ}.
pub fn evolve_lindblad(
    h: &dyn Hamiltonian,
    dissipation: &Dissipation,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
    tol: Tolerances,
) -> Result<LindbladRun> {
    dissipation.validate()?;
    let space = *h.space();
    if rho0.space() != &space {
        return Err(Error::InvalidDims(format!(
            "state dims {:?} differ from Hamiltonian dims {:?}",
            rho0.space().mode_dims(),
            space.mode_dims()
        )));
    }
    let d = space.dim();

    let jumps: Vec<(SparseOp, f64)> = [
        (space.lowering(0), dissipation.kappa1),
        (space.lowering(2), dissipation.kappa2),
        (space.lowering(1), dissipation.gamma_m * (dissipation.n_th + 1.0)),
        (space.raising(1), dissipation.gamma_m * dissipation.n_th),
    ]
    .into_iter()
    .filter(|(_, rate)| *rate > 0.0)
    .collect();

    // −½ Σ r A†A, the anti-Hermitian part of the effective generator
    let mut decay = SparseOp::new(d);
    for (a, rate) in &jumps {
        decay.add_scaled(&a.adjoint().mul(a), C64::new(-0.5 * rate, 0.0));
    }

    let times = grid.times();
    let table = occupation_table(&space);
    let mut h_op = SparseOp::new(d);
    let mut k_op = SparseOp::new(d);
    let mut k_adj = SparseOp::new(d);
    let mut populations = Vec::with_capacity(times.len());
    let mut traces = Vec::with_capacity(times.len());
    let mut fidelities = Vec::with_capacity(times.len());
    let tr0 = rho0.trace().re;
    let mut trace_drift: f64 = 0.0;
    let mut herm_drift: f64 = 0.0;
    let mut edge: f64 = 0.0;
    let mut last = rho0.as_slice().to_vec();
    let one = C64::new(1.0, 0.0);

    let stats = Dopri5::new(tol).integrate(
        |t, rho, out| {
            h.assemble(t, &mut h_op)?;
            // K = −iH − ½ Σ r A†A, so ρ′ = Kρ + ρK† + Σ r AρA†
            k_op.clear();
            k_op.add_scaled(&h_op, C64::new(0.0, -1.0));
            k_op.add_scaled(&decay, one);
            k_adj.clear();
            k_adj.add_scaled(&h_op, C64::new(0.0, 1.0));
            k_adj.add_scaled(&decay, one);
            out.fill(C64::new(0.0, 0.0));
            k_op.left_mul_add(rho, out, one);
            k_adj.right_mul_add(rho, out, one);
            for (a, rate) in &jumps {
                a.sandwich_add(rho, out, C64::new(*rate, 0.0));
            }
            Ok(())
        },
        &times,
        rho0.as_slice(),
        |k, _, rho| {
            let diag = |i: usize| rho[i * d + i].re;
            let tr: f64 = (0..d).map(diag).sum();
            trace_drift = trace_drift.max((tr - tr0).abs());
            herm_drift = herm_drift.max(hermiticity_error(rho, d));
            edge = edge.max(mechanical_edge(&space, diag));
            traces.push(tr);
            fidelities.push(transfer_fidelity(&space, rho));
            populations.push(populations_from_weights(&table, diag));
            if k + 1 == times.len() {
                last.copy_from_slice(rho);
            }
            Ok(())
        },
    )?;

    let final_state = DensityMatrix::from_parts(space, last);
    let mut warnings = Vec::new();
    if edge > EDGE_WARNING_THRESHOLD {
        let msg = format!(
            "mechanical truncation d_m = {} too small: top level reached population {edge:.3e}",
            space.mode_dims()[1]
        );
        warn!("{msg}");
        warnings.push(msg);
    }

    Ok(LindbladRun {
        trajectory: Trajectory {
            times,
            populations,
            trace: Some(traces),
            fidelity: Some(fidelities),
            amplitudes: None,
            diagnostics: Diagnostics {
                engine: "lindblad".into(),
                tolerances: Some(tol),
                stats,
                trace_drift: Some(trace_drift),
                hermiticity_drift: Some(herm_drift),
                min_eigenvalue: Some(final_state.min_eigenvalue()),
                mechanical_edge_population: Some(edge),
                warnings,
                ..Default::default()
            },
        },
        final_state,
    })
}
