use super::fock::{FockSpace, SparseOp};
use crate::error::Result;
use crate::schedule::CouplingSchedule;
use crate::sta::ModeMatrix;
use crate::system::FockDims;

/// Time-dependent generator of a [`ModeMatrix`], t ↦ M(t).
pub type MatrixGenerator = dyn Fn(f64) -> Result<ModeMatrix> + Send + Sync;

/// Fock-space Hamiltonian that can be assembled at any instant.
pub trait Hamiltonian: Send + Sync {
    fn space(&self) -> &FockSpace;

    /// Overwrites `out` with H(t).
    fn assemble(&self, t: f64, out: &mut SparseOp) -> Result<()>;
}

/// H(t) = Σᵢⱼ Mᵢⱼ(t) aᵢ† aⱼ, the second-quantised form of a mode matrix.
pub struct QuadraticHamiltonian {
    space: FockSpace,
    hops: Vec<SparseOp>,
    generator: Box<MatrixGenerator>,
}

impl QuadraticHamiltonian {
    pub fn new<F>(dims: FockDims, generator: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<ModeMatrix> + Send + Sync + 'static,
    {
        let space = FockSpace::new(dims)?;
        let hops = (0..9).map(|k| space.hopping(k / 3, k % 3)).collect();
        Ok(Self {
            space,
            hops,
            generator: Box::new(generator),
        })
    }

    pub fn mode_matrix(&self, t: f64) -> Result<ModeMatrix> {
        (self.generator)(t)
    }
}

impl Hamiltonian for QuadraticHamiltonian {
    fn space(&self) -> &FockSpace {
        &self.space
    }

    fn assemble(&self, t: f64, out: &mut SparseOp) -> Result<()> {
        let m = (self.generator)(t)?;
        out.clear();
        for (k, hop) in self.hops.iter().enumerate() {
            out.add_scaled(hop, m.get(k / 3, k % 3));
        }
        Ok(())
    }
}

/// Σᵢ δᵢ aᵢ†aᵢ + Gᵢ(t)(aᵢ†b_m + b_m†aᵢ) with the couplings from `schedule`.
pub fn build_h3(
    schedule: CouplingSchedule,
    delta1: f64,
    delta2: f64,
    dims: FockDims,
) -> Result<QuadraticHamiltonian> {
    QuadraticHamiltonian::new(dims, move |t| {
        let (g1, g2) = schedule.eval(t)?;
        Ok(ModeMatrix::optomechanical(g1, g2, delta1, delta2))
    })
}
