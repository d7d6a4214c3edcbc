use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::matrix::ModeMatrix;
use crate::error::{Error, Result};

/// Eigenvalues and real eigenmodes of the chain matrix in canonical order
/// (0, +g₀, −g₀). Signs: the dark mode has a non-negative last component
/// (negative first component when that is zero); the two bright modes have
/// middle components +1/√2 and −1/√2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: [f64; 3],
    pub modes: [Vector3<f64>; 3],
}

impl EigenSystem {
    pub fn dark_mode(&self) -> &Vector3<f64> {
        &self.modes[0]
    }

    /// max |⟨ψᵢ|ψⱼ⟩ − δᵢⱼ|.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.modes[i].dot(&self.modes[j]) - target).abs());
            }
        }
        worst
    }
}

/// Closed-form eigenmodes: ψ₁ = [−g₂, 0, g₁]/g₀ and
/// ψ₂,₃ = [g₁/g₀, ±1, g₂/g₀]/√2.
pub fn closed_form_eigenmodes(g1: f64, g2: f64) -> Result<[Vector3<f64>; 3]> {
    let g0 = g1.hypot(g2);
    if g0 == 0.0 {
        return Err(Error::DegenerateSystem { t: f64::NAN });
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok([
        Vector3::new(-g2 / g0, 0.0, g1 / g0),
        Vector3::new(s * g1 / g0, s, s * g2 / g0),
        Vector3::new(s * g1 / g0, -s, s * g2 / g0),
    ])
}

/// Numerical diagonalisation of a real symmetric chain matrix.
pub fn eigen_decompose(m: &ModeMatrix) -> Result<EigenSystem> {
    if !m.is_hermitian(1e-12) || m.entries().iter().any(|z| z.im.abs() > 1e-12) {
        return Err(Error::invalid("m", "expected a real symmetric chain matrix"));
    }
    let real: Matrix3<f64> = m.entries().map(|z| z.re);
    let scale = real.amax();
    if scale == 0.0 {
        return Err(Error::DegenerateSystem { t: f64::NAN });
    }
    let eig = SymmetricEigen::new(real);
    let mut order: [usize; 3] = [0, 1, 2];
    // ascending order is (−g₀, 0, +g₀)
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let (neg, mid, pos) = (order[0], order[1], order[2]);

    let column = |k: usize| -> Vector3<f64> { eig.eigenvectors.column(k).into_owned() };
    let mut dark = column(mid);
    let tiny = 1e-12;
    if dark[2] < -tiny || (dark[2].abs() <= tiny && dark[0] > 0.0) {
        dark = -dark;
    }
    let mut plus = column(pos);
    if plus[1] < 0.0 {
        plus = -plus;
    }
    let mut minus = column(neg);
    if minus[1] > 0.0 {
        minus = -minus;
    }
    Ok(EigenSystem {
        eigenvalues: [
            eig.eigenvalues[mid],
            eig.eigenvalues[pos],
            eig.eigenvalues[neg],
        ],
        modes: [dark, plus, minus],
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;

    fn as_complex(v: &Vector3<f64>) -> Vector3<Complex64> {
        v.map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn boundary_dark_mode() {
        let es = eigen_decompose(&ModeMatrix::adiabatic(0.0, 3.0)).unwrap();
        assert_relative_eq!(es.dark_mode()[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(es.dark_mode()[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(es.dark_mode()[2], 0.0, epsilon = 1e-14);
        assert_relative_eq!(es.eigenvalues[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn equal_couplings_dark_mode() {
        let es = eigen_decompose(&ModeMatrix::adiabatic(1.0, 1.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(es.dark_mode()[0], -s, epsilon = 1e-14);
        assert_relative_eq!(es.dark_mode()[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(es.dark_mode()[2], s, epsilon = 1e-14);
    }

    #[test]
    fn zero_couplings_degenerate() {
        assert!(matches!(
            eigen_decompose(&ModeMatrix::adiabatic(0.0, 0.0)),
            Err(Error::DegenerateSystem { .. })
        ));
        assert!(closed_form_eigenmodes(0.0, 0.0).is_err());
        assert!(eigen_decompose(&ModeMatrix::counterdiabatic(1.0)).is_err());
    }

    proptest! {
        #[test]
        fn residuals_and_closed_forms(g1 in 1e-3f64..10.0, g2 in 1e-3f64..10.0) {
            let m = ModeMatrix::adiabatic(g1, g2);
            let es = eigen_decompose(&m).unwrap();
            let g0 = g1.hypot(g2);
            prop_assert!(es.eigenvalues[0].abs() < 1e-10);
            prop_assert!((es.eigenvalues[1] - g0).abs() < 1e-10);
            prop_assert!((es.eigenvalues[2] + g0).abs() < 1e-10);
            prop_assert!(m.apply(&as_complex(&es.modes[0])).norm() < 1e-10);
            let r2 = m.apply(&as_complex(&es.modes[1])) - as_complex(&es.modes[1]).scale(g0);
            prop_assert!(r2.norm() < 1e-10);
            prop_assert!(es.gram_deviation() < 1e-10);
            let closed = closed_form_eigenmodes(g1, g2).unwrap();
            for k in 0..3 {
                prop_assert!((es.modes[k] - closed[k]).amax() < 1e-10);
            }
        }
    }
}
