//! Dense complex hermitian matrices and the structural results built on
//! their spectra: power limits, shared top eigenspaces and block splittings.

mod json;
mod limits;
mod norms;
mod spectral;
mod split;

use std::fmt;
use std::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use json::MatrixJson;
pub use limits::{
    check_same_dim as check_dims,
    common_top_eigenspace_dim, eigenspace_dim, power_limit, vanishing_product_tests,
    VanishingTests,
};
pub use norms::{matrix_power, operator_norm, schatten_norm, spectral_norm};
pub use spectral::{spectral, SpectralDecomposition};
pub use split::{decompose_common_top, split_on_power_limit, CommonTopSplit, SplitDecomposition};

/// Dense complex matrix used for intermediate (not necessarily hermitian) products.
pub type CMat = DMatrix<Complex64>;

/// Absolute tolerance for the hermiticity check on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues closer than this to a target value are clustered with it.
pub const CLUSTER_TOL: f64 = 1e-9;
/// Eigenvalues below `-NEGATIVE_EIG_TOL` are genuinely negative.
pub const NEGATIVE_EIG_TOL: f64 = 1e-8;
/// Tolerance of the phone-matrix contract (spectrum in [0, 1], top eigenvalue 1).
pub const PHONE_TOL: f64 = 1e-10;

/// Square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianMatrix {
    inner: CMat,
}

impl HermitianMatrix {
    /// Validates squareness, `n >= 1` and hermiticity within [`HERMITIAN_TOL`].
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Validation(format!(
                "matrix is not square: {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::Validation("matrix dimension must be at least 1".into()));
        }
        let (worst, i, j) = worst_hermiticity_violation(&m);
        if worst > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "matrix is not hermitian: entries ({i},{j}) and ({j},{i}) violate conjugate symmetry by {worst:e}"
            )));
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(m + m†)/2` without any tolerance check. Use for products that are
    /// hermitian in exact arithmetic.
    pub fn hermitian_part(m: &CMat) -> Self {
        assert!(m.is_square() && m.nrows() > 0, "hermitian_part needs a non-empty square matrix");
        let inner = (m + m.adjoint()).scale(0.5);
        Self { inner }
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        assert!(!d.is_empty());
        let n = d.len();
        let inner = CMat::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        Self { inner }
    }

    /// Builds a real symmetric matrix from row-major entries.
    pub fn from_real_rows(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Validation(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(CMat::from_fn(n, n, |i, j| Complex64::new(entries[i * n + j], 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0);
        Self { inner: CMat::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0);
        Self { inner: CMat::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &CMat {
        &self.inner
    }

    pub fn into_matrix(self) -> CMat {
        self.inner
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { inner: self.inner.scale(c) }
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    /// `u† M u`.
    pub fn conjugated(&self, u: &CMat) -> Self {
        Self::hermitian_part(&(u.adjoint() * &self.inner * u))
    }

    pub fn direct_sum(&self, other: &HermitianMatrix) -> Self {
        Self { inner: direct_sum(&self.inner, &other.inner) }
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        SpectralDecomposition::of(self)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.inner.iter().all(|z| z.norm() <= tol)
    }
}

impl fmt::Display for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner)
    }
}

/// Positive hermitian matrix whose largest eigenvalue is 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PhoneMatrix(HermitianMatrix);

impl PhoneMatrix {
    pub fn new(m: HermitianMatrix) -> Result<Self> {
        let eig = m.spectral().eigenvalues;
        let top = eig[0];
        let bottom = eig[eig.len() - 1];
        if bottom < -PHONE_TOL || top > 1.0 + PHONE_TOL || (top - 1.0).abs() > PHONE_TOL {
            return Err(Error::Domain(format!(
                "not a phone matrix: spectrum spans [{bottom:e}, {top}], expected [0, 1] with top eigenvalue 1"
            )));
        }
        Ok(Self(m))
    }

    /// Rescales a nonzero positive hermitian matrix to unit operator norm.
    /// Eigenvalue noise slightly below zero is clipped.
    pub fn normalize(m: &HermitianMatrix) -> Result<Self> {
        let sd = m.spectral();
        let top = sd.eigenvalues[0];
        let bottom = *sd.eigenvalues.last().unwrap();
        if bottom < -NEGATIVE_EIG_TOL * top.abs().max(1.0) {
            return Err(Error::Domain(format!(
                "matrix is not positive: smallest eigenvalue {bottom:e}"
            )));
        }
        if top <= 0.0 {
            return Err(Error::Domain("cannot normalize the zero matrix".into()));
        }
        if bottom / top < -PHONE_TOL {
            let clipped = sd.map(|x| (x / top).max(0.0));
            return Ok(Self(clipped));
        }
        Ok(Self(m.scaled(1.0 / top)))
    }

    /// Wraps a matrix already known to be phone, skipping the spectral check.
    pub(crate) fn new_unchecked(m: HermitianMatrix) -> Self {
        Self(m)
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }
}

impl Deref for PhoneMatrix {
    type Target = HermitianMatrix;

    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

impl AsRef<HermitianMatrix> for PhoneMatrix {
    fn as_ref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Largest `|m_ij - conj(m_ji)|` and the pair attaining it.
pub(crate) fn worst_hermiticity_violation(m: &CMat) -> (f64, usize, usize) {
    let n = m.nrows();
    let mut worst = (0.0, 0, 0);
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst.0 {
                worst = (d, i, j);
            }
        }
    }
    worst
}

pub fn direct_sum(a: &CMat, b: &CMat) -> CMat {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = CMat::zeros(na + nb, na + nb);
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}

pub fn trace(m: &CMat) -> Complex64 {
    m.trace()
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Random-free helper: embeds real values as a complex matrix.
pub fn real_matrix(n: usize, entries: &[f64]) -> CMat {
    assert_eq!(entries.len(), n * n);
    CMat::from_fn(n, n, |i, j| Complex64::new(entries[i * n + j], 0.0))
}
