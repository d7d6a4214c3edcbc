use nalgebra::{DMatrix, SymmetricEigen, Vector3};
use num_complex::Complex64;

use super::fock::FockSpace;
use crate::error::{Error, Result};
use crate::system::FockDims;

type C64 = Complex64;

/// Mode amplitudes [a₁, b_m, a₂] of the linear (single-excitation) picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState(pub Vector3<C64>);

impl AmplitudeState {
    /// One excitation in mode `mode`.
    pub fn excited(mode: usize) -> Self {
        let mut v = Vector3::zeros();
        v[mode] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }
}

const NORM_TOLERANCE: f64 = 1e-10;

/// Normalised pure state in the truncated three-mode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    space: FockSpace,
    amplitudes: Vec<C64>,
}

impl FockState {
    pub fn new(dims: FockDims, amplitudes: Vec<C64>) -> Result<Self> {
        let space = FockSpace::new(dims)?;
        if amplitudes.len() != space.dim() {
            return Err(Error::InvalidDims(format!(
                "expected {} amplitudes, got {}",
                space.dim(),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid("psi", format!("norm {norm} is not 1")));
        }
        Ok(Self { space, amplitudes })
    }

    /// Number state |n₁, n_m, n₂⟩.
    pub fn basis(dims: FockDims, n: [usize; 3]) -> Result<Self> {
        let space = FockSpace::new(dims)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); space.dim()];
        amplitudes[space.index(n)?] = C64::new(1.0, 0.0);
        Ok(Self { space, amplitudes })
    }

    /// Single-excitation state Σᵢ vᵢ |1ᵢ⟩.
    pub fn single_excitation(dims: FockDims, v: &AmplitudeState) -> Result<Self> {
        let space = FockSpace::new(dims)?;
        let mut amplitudes = vec![C64::new(0.0, 0.0); space.dim()];
        for mode in 0..3 {
            let mut n = [0; 3];
            n[mode] = 1;
            amplitudes[space.index(n)?] = v.0[mode];
        }
        Self::new(dims, amplitudes)
    }

    pub(crate) fn from_parts(space: FockSpace, amplitudes: Vec<C64>) -> Self {
        Self { space, amplitudes }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Density operator of the truncated three-mode system, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    rho: Vec<C64>,
}

impl DensityMatrix {
    pub fn new(dims: FockDims, rho: Vec<C64>) -> Result<Self> {
        let space = FockSpace::new(dims)?;
        let d = space.dim();
        if rho.len() != d * d {
            return Err(Error::InvalidDims(format!("expected {} entries, got {}", d * d, rho.len())));
        }
        let dm = Self { space, rho };
        if dm.hermiticity_error() > 1e-9 {
            return Err(Error::invalid("rho", "not Hermitian"));
        }
        if (dm.trace().re - 1.0).abs() > 1e-6 {
            return Err(Error::invalid("rho", format!("trace {} is not 1", dm.trace())));
        }
        Ok(dm)
    }

    pub fn from_pure(psi: &FockState) -> Self {
        let d = psi.space.dim();
        let a = &psi.amplitudes;
        let mut rho = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                rho[i * d + j] = a[i] * a[j].conj();
            }
        }
        Self {
            space: psi.space,
            rho,
        }
    }

    pub(crate) fn from_parts(space: FockSpace, rho: Vec<C64>) -> Self {
        Self { space, rho }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.rho[i * self.space.dim() + j]
    }

    pub fn trace(&self) -> C64 {
        let d = self.space.dim();
        (0..d).map(|i| self.rho[i * d + i]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.rho, self.space.dim())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.space.dim();
        let m = DMatrix::from_row_slice(d, d, &self.rho);
        let herm = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(herm).eigenvalues.min()
    }
}

pub(crate) fn hermiticity_error(rho: &[C64], d: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((rho[i * d + j] - rho[j * d + i].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_state_needs_room() {
        assert!(FockState::basis(FockDims::CLOSED, [1, 0, 0]).is_ok());
        assert!(matches!(
            FockState::basis(FockDims::CLOSED, [2, 0, 0]),
            Err(Error::InvalidDims(_))
        ));
    }

    #[test]
    fn rejects_unnormalised_state() {
        let amps = vec![C64::new(0.5, 0.0); 8];
        assert!(FockState::new(FockDims::CLOSED, amps).is_err());
    }

    #[test]
    fn pure_density_is_valid() {
        let v = AmplitudeState(Vector3::new(
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.8),
        ));
        let psi = FockState::single_excitation(FockDims::THERMAL, &v).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!((rho.trace().re - 1.0).abs() < 1e-14);
        assert!(rho.hermiticity_error() < 1e-15);
        assert!(rho.min_eigenvalue() > -1e-12);
        let again = DensityMatrix::new(FockDims::THERMAL, rho.as_slice().to_vec()).unwrap();
        assert_eq!(again, rho);
    }
}
