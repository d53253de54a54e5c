use nalgebra::linalg::SymmetricEigen;
use num_complex::Complex64;

use super::{CMat, HermitianMatrix};
use crate::error::Result;

/// Eigenvalues in descending order with the matching orthonormal eigenvectors
/// as columns of `basis`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: CMat,
}

/// Validates hermiticity of `m` and decomposes it.
pub fn spectral(m: &CMat) -> Result<SpectralDecomposition> {
    let h = HermitianMatrix::new(m.clone())?;
    Ok(SpectralDecomposition::of(&h))
}

impl SpectralDecomposition {
    pub fn of(m: &HermitianMatrix) -> Self {
        let eig = SymmetricEigen::new(m.as_matrix().clone());
        let n = m.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let basis = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { eigenvalues, basis }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(λ) U†`.
    pub fn reconstruct(&self) -> CMat {
        self.map_raw(|x| x)
    }

    /// Spectral functional calculus `U diag(f(λ)) U†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        HermitianMatrix::hermitian_part(&self.map_raw(f))
    }

    fn map_raw(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.dim();
        let mut scaled = self.basis.clone();
        for (c, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = Complex64::new(f(lambda), 0.0);
            scaled.column_mut(c).iter_mut().for_each(|z| *z *= w);
        }
        let out = scaled * self.basis.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }

    /// Projector onto the span of the eigenvectors whose eigenvalue satisfies `select`.
    pub fn projector(&self, select: impl Fn(f64) -> bool) -> HermitianMatrix {
        self.map(|x| if select(x) { 1.0 } else { 0.0 })
    }

    pub fn count_within(&self, lambda: f64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|&&x| (x - lambda).abs() <= tol).count()
    }
}
