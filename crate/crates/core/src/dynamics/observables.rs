use num_complex::Complex64;

use super::fock::FockSpace;
use super::state::DensityMatrix;

/// ⟨0₁ 1₂| tr_m ρ |0₁ 1₂⟩: one photon in mode a₂, none in a₁, any
/// mechanical occupation.
pub fn fidelity(rho: &DensityMatrix) -> f64 {
    transfer_fidelity(rho.space(), rho.as_slice())
}

pub(crate) fn transfer_fidelity(space: &FockSpace, rho: &[Complex64]) -> f64 {
    let d = space.dim();
    (0..space.mode_dims()[1])
        .map(|nm| {
            let k = space.index([0, nm, 1]).expect("target state fits every valid truncation");
            rho[k * d + k].re
        })
        .sum()
}

/// Occupation table nᵢ(k) for every basis index.
pub(crate) fn occupation_table(space: &FockSpace) -> Vec<[f64; 3]> {
    (0..space.dim())
        .map(|k| space.occupations(k).map(|n| n as f64))
        .collect()
}

pub(crate) fn populations_from_weights(
    table: &[[f64; 3]],
    weight: impl Fn(usize) -> f64,
) -> [f64; 3] {
    let mut p = [0.0; 3];
    for (k, n) in table.iter().enumerate() {
        let w = weight(k);
        for i in 0..3 {
            p[i] += w * n[i];
        }
    }
    p
}

/// Weight of the highest kept mechanical level.
pub(crate) fn mechanical_edge(space: &FockSpace, weight: impl Fn(usize) -> f64) -> f64 {
    let top = space.mode_dims()[1] - 1;
    (0..space.dim())
        .filter(|&k| space.occupations(k)[1] == top)
        .map(weight)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::FockState;
    use crate::system::FockDims;

    #[test]
    fn target_and_initial_states() {
        let target = DensityMatrix::from_pure(&FockState::basis(FockDims::THERMAL, [0, 0, 1]).unwrap());
        assert_eq!(fidelity(&target), 1.0);
        let initial = DensityMatrix::from_pure(&FockState::basis(FockDims::THERMAL, [1, 0, 0]).unwrap());
        assert_eq!(fidelity(&initial), 0.0);
        // a phonon alongside the photon still counts
        let dressed = DensityMatrix::from_pure(&FockState::basis(FockDims::THERMAL, [0, 3, 1]).unwrap());
        assert_eq!(fidelity(&dressed), 1.0);
    }
}
