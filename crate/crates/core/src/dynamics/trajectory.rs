use std::io::Write;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ode::{SolverStats, Tolerances};
use crate::error::Result;
use crate::io::{fmt_num, write_row};

/// Conservation and truncation checks collected during one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub engine: String,
    pub tolerances: Option<Tolerances>,
    pub stats: SolverStats,
    /// max |‖ψ(t)‖ − ‖ψ(0)‖| for unitary runs.
    pub norm_drift: Option<f64>,
    /// max |tr ρ(t) − tr ρ(0)|.
    pub trace_drift: Option<f64>,
    /// max |ρ − ρ†| over the output grid.
    pub hermiticity_drift: Option<f64>,
    /// Smallest eigenvalue of the final density matrix.
    pub min_eigenvalue: Option<f64>,
    /// max over t of the population of the highest kept mechanical level.
    pub mechanical_edge_population: Option<f64>,
    pub warnings: Vec<String>,
}

/// Populations ⟨nᵢ⟩(t) of [a₁, b_m, a₂] on the output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<[f64; 3]>,
    pub trace: Option<Vec<f64>>,
    pub fidelity: Option<Vec<f64>>,
    pub amplitudes: Option<Vec<Vector3<Complex64>>>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_populations(&self) -> [f64; 3] {
        *self.populations.last().expect("trajectory has at least one sample")
    }

    pub fn populations_of(&self, mode: usize) -> impl Iterator<Item = f64> + '_ {
        self.populations.iter().map(move |p| p[mode])
    }

    pub fn max_population(&self, mode: usize) -> f64 {
        self.populations_of(mode).fold(f64::NEG_INFINITY, f64::max)
    }

    /// First grid time at which mode `mode` reaches `threshold`.
    pub fn first_time_reaching(&self, mode: usize, threshold: f64) -> Option<f64> {
        self.populations
            .iter()
            .zip(&self.times)
            .find(|(p, _)| p[mode] >= threshold)
            .map(|(_, &t)| t)
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.fidelity.as_ref().and_then(|f| f.last().copied())
    }

    /// `t,p1,p_m,p2[,trace,F]`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut header = String::from("t,p1,p_m,p2");
        if self.trace.is_some() {
            header.push_str(",trace");
        }
        if self.fidelity.is_some() {
            header.push_str(",F");
        }
        writeln!(w, "{header}")?;
        let mut row = Vec::with_capacity(6);
        for (k, (&t, p)) in self.times.iter().zip(&self.populations).enumerate() {
            row.clear();
            row.push(t);
            row.extend_from_slice(p);
            if let Some(tr) = &self.trace {
                row.push(tr[k]);
            }
            if let Some(f) = &self.fidelity {
                row.push(f[k]);
            }
            write_row(w, &row)?;
        }
        Ok(())
    }

    /// Human-readable one-line summary of the final state.
    pub fn summary(&self) -> String {
        let p = self.final_populations();
        let mut s = format!(
            "t_end={} p1={} p_m={} p2={} max_p_m={}",
            fmt_num(*self.times.last().unwrap()),
            fmt_num(p[0]),
            fmt_num(p[1]),
            fmt_num(p[2]),
            fmt_num(self.max_population(1))
        );
        if let Some(f) = self.final_fidelity() {
            s.push_str(&format!(" F={}", fmt_num(f)));
        }
        s
    }
}
