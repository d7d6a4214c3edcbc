//! Instantaneous eigenmodes, counter-diabatic generators and pulse
//! synthesis for the three-mode chain a₁ – a₃ – a₂.

mod counterdiabatic;
mod eigen;
mod matrix;
mod synthesis;

pub use counterdiabatic::{
    counterdiabatic_matrix, generic_counterdiabatic, CounterDiabatic, ModeBasis,
};
pub use eigen::{closed_form_eigenmodes, eigen_decompose, EigenSystem};
pub use matrix::{ModeMatrix, ModeMatrixTag};
pub use synthesis::{effective_matrix, synthesize_tqd_pulses, SynthesisMode, TqdPulseSummary};
