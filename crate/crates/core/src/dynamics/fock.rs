//! Truncated Fock space of the three modes and sparse operators on it.
//!
//! Basis index of |n₁, n_m, n₂⟩ is (n₁·d_m + n_m)·d₂ + n₂.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::system::FockDims;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpace {
    dims: [usize; 3],
}

impl FockSpace {
    pub fn new(dims: FockDims) -> Result<Self> {
        dims.validate()?;
        Ok(Self {
            dims: dims.as_array(),
        })
    }

    pub fn dims(&self) -> FockDims {
        FockDims {
            optical1: self.dims[0],
            mechanical: self.dims[1],
            optical2: self.dims[2],
        }
    }

    pub fn mode_dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index(&self, n: [usize; 3]) -> Result<usize> {
        for (mode, (&ni, &di)) in n.iter().zip(&self.dims).enumerate() {
            if ni >= di {
                return Err(Error::InvalidDims(format!(
                    "occupation {ni} of mode {mode} needs more than {di} levels"
                )));
            }
        }
        Ok((n[0] * self.dims[1] + n[1]) * self.dims[2] + n[2])
    }

    pub fn occupations(&self, k: usize) -> [usize; 3] {
        let n2 = k % self.dims[2];
        let rest = k / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], n2]
    }

    /// Annihilation operator of `mode` (0 = a₁, 1 = b_m, 2 = a₂).
    pub fn lowering(&self, mode: usize) -> SparseOp {
        let mut op = SparseOp::new(self.dim());
        for k in 0..self.dim() {
            let n = self.occupations(k);
            if n[mode] > 0 {
                let mut m = n;
                m[mode] -= 1;
                let row = self.index(m).expect("lowered state is in range");
                op.push(row, k, C64::new((n[mode] as f64).sqrt(), 0.0));
            }
        }
        op
    }

    pub fn raising(&self, mode: usize) -> SparseOp {
        self.lowering(mode).adjoint()
    }

    /// a_i† a_j.
    pub fn hopping(&self, i: usize, j: usize) -> SparseOp {
        self.raising(i).mul(&self.lowering(j))
    }
}

/// Sparse matrix stored as (row, col, value) triplets; duplicates add.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn push(&mut self, row: usize, col: usize, value: C64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.entries.push((row, col, value));
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Appends `scale · other`.
    pub fn add_scaled(&mut self, other: &SparseOp, scale: C64) {
        debug_assert_eq!(self.dim, other.dim);
        if scale == C64::new(0.0, 0.0) {
            return;
        }
        self.entries
            .extend(other.entries.iter().map(|&(r, c, v)| (r, c, v * scale)));
    }

    pub fn adjoint(&self) -> SparseOp {
        SparseOp {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())).collect(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn from_dense(m: &DMatrix<C64>) -> SparseOp {
        let mut op = SparseOp::new(m.nrows());
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != C64::new(0.0, 0.0) {
                    op.push(r, c, m[(r, c)]);
                }
            }
        }
        op
    }

    pub fn mul(&self, other: &SparseOp) -> SparseOp {
        SparseOp::from_dense(&(self.to_dense() * other.to_dense()))
    }

    /// y += A x.
    pub fn apply_add(&self, x: &[C64], y: &mut [C64], scale: C64) {
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c] * scale;
        }
    }

    /// out += scale · A ρ for row-major ρ.
    pub fn left_mul_add(&self, rho: &[C64], out: &mut [C64], scale: C64) {
        let d = self.dim;
        for &(r, c, v) in &self.entries {
            let w = v * scale;
            let (src, dst) = (&rho[c * d..(c + 1) * d], r * d);
            for (j, s) in src.iter().enumerate() {
                out[dst + j] += w * s;
            }
        }
    }

    /// out += scale · ρ A for row-major ρ.
    pub fn right_mul_add(&self, rho: &[C64], out: &mut [C64], scale: C64) {
        let d = self.dim;
        for &(r, c, v) in &self.entries {
            let w = v * scale;
            for i in 0..d {
                out[i * d + c] += rho[i * d + r] * w;
            }
        }
    }

    /// out += scale · A ρ A† for row-major ρ.
    pub fn sandwich_add(&self, rho: &[C64], out: &mut [C64], scale: C64) {
        let d = self.dim;
        for &(r, i, a) in &self.entries {
            let ai = a * scale;
            for &(c, j, b) in &self.entries {
                out[r * d + c] += ai * b.conj() * rho[i * d + j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(d: [usize; 3]) -> FockSpace {
        FockSpace::new(FockDims::new(d[0], d[1], d[2]).unwrap()).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let s = space([2, 5, 3]);
        assert_eq!(s.dim(), 30);
        for k in 0..s.dim() {
            assert_eq!(s.index(s.occupations(k)).unwrap(), k);
        }
        assert!(matches!(s.index([2, 0, 0]), Err(Error::InvalidDims(_))));
    }

    #[test]
    fn commutator_below_cutoff() {
        // [b, b†] = 1 on every level except the truncated edge
        let s = space([2, 4, 2]);
        let b = s.lowering(1).to_dense();
        let bd = s.raising(1).to_dense();
        let comm = &b * &bd - &bd * &b;
        for k in 0..s.dim() {
            let n = s.occupations(k);
            let expected = if n[1] + 1 < 4 { 1.0 } else { -3.0 };
            assert!((comm[(k, k)].re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_products_agree() {
        let s = space([2, 3, 2]);
        let a = s.hopping(0, 1);
        let d = s.dim();
        let rho: Vec<C64> = (0..d * d)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let rho_m = DMatrix::from_row_slice(d, d, &rho);
        let one = C64::new(1.0, 0.0);

        let mut left = vec![C64::new(0.0, 0.0); d * d];
        a.left_mul_add(&rho, &mut left, one);
        let mut right = vec![C64::new(0.0, 0.0); d * d];
        a.right_mul_add(&rho, &mut right, one);
        let mut sandwich = vec![C64::new(0.0, 0.0); d * d];
        a.sandwich_add(&rho, &mut sandwich, one);

        let ad = a.to_dense();
        let l = &ad * &rho_m;
        let r = &rho_m * &ad;
        let sw = &ad * &rho_m * ad.adjoint();
        for i in 0..d {
            for j in 0..d {
                assert!((left[i * d + j] - l[(i, j)]).norm() < 1e-12);
                assert!((right[i * d + j] - r[(i, j)]).norm() < 1e-12);
                assert!((sandwich[i * d + j] - sw[(i, j)]).norm() < 1e-12);
            }
        }
    }
}
