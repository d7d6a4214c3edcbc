use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::schedule::CouplingSchedule;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeMatrixTag {
    /// Nearest-neighbour chain coupling, real symmetric.
    Adiabatic,
    /// i Σ ψ̇ₙψₙ†: imaginary antisymmetric, couples only the outer modes.
    CounterDiabatic,
    /// Beam-splitter coupling left after eliminating the middle mode.
    Effective,
    /// Optomechanical chain with the outer-mode detunings on the diagonal.
    Optomechanical,
    /// Anything else (user-supplied or numerically generated).
    General,
}

/// 3×3 generator of the linear amplitude dynamics i v̇ = M v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    entries: Matrix3<C64>,
    tag: ModeMatrixTag,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl ModeMatrix {
    pub fn new(entries: Matrix3<C64>, tag: ModeMatrixTag) -> Self {
        Self { entries, tag }
    }

    pub fn zero(tag: ModeMatrixTag) -> Self {
        Self::new(Matrix3::zeros(), tag)
    }

    /// [[0, g₁, 0], [g₁, 0, g₂], [0, g₂, 0]].
    pub fn adiabatic(g1: f64, g2: f64) -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 1)] = re(g1);
        m[(1, 0)] = re(g1);
        m[(1, 2)] = re(g2);
        m[(2, 1)] = re(g2);
        Self::new(m, ModeMatrixTag::Adiabatic)
    }

    /// [[0, 0, iG], [0, 0, 0], [−iG, 0, 0]].
    pub fn counterdiabatic(g: f64) -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 2)] = C64::new(0.0, g);
        m[(2, 0)] = C64::new(0.0, -g);
        Self::new(m, ModeMatrixTag::CounterDiabatic)
    }

    /// Real symmetric outer-mode coupling `omega`.
    pub(crate) fn effective(omega: f64) -> Self {
        let mut m = Matrix3::zeros();
        m[(0, 2)] = re(omega);
        m[(2, 0)] = re(omega);
        Self::new(m, ModeMatrixTag::Effective)
    }

    /// Optomechanical chain: detunings δ₁, δ₂ on the outer diagonal.
    pub fn optomechanical(g1: f64, g2: f64, delta1: f64, delta2: f64) -> Self {
        let mut m = Self::adiabatic(g1, g2).entries;
        m[(0, 0)] = re(delta1);
        m[(2, 2)] = re(delta2);
        Self::new(m, ModeMatrixTag::Optomechanical)
    }

    /// Adiabatic chain matrix with couplings from `schedule` at `t`.
    pub fn from_schedule(schedule: &CouplingSchedule, t: f64) -> Result<Self> {
        let (g1, g2) = schedule.eval(t)?;
        Ok(Self::adiabatic(g1, g2))
    }

    pub fn entries(&self) -> &Matrix3<C64> {
        &self.entries
    }

    pub fn tag(&self) -> ModeMatrixTag {
        self.tag
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// max |M − M†| over entries.
    pub fn hermiticity_error(&self) -> f64 {
        (self.entries - self.entries.adjoint()).camax()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn apply(&self, v: &Vector3<C64>) -> Vector3<C64> {
        self.entries * v
    }

    pub fn sum(&self, other: &ModeMatrix) -> ModeMatrix {
        ModeMatrix::new(self.entries + other.entries, ModeMatrixTag::General)
    }
}
