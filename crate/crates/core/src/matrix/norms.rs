use super::{CMat, HermitianMatrix, NEGATIVE_EIG_TOL};
use crate::error::{Error, Result};

/// Operator norm of a hermitian matrix: the largest eigenvalue modulus.
///
/// With `positive` set, the matrix must not have eigenvalues below
/// `-NEGATIVE_EIG_TOL`, and the result is the top eigenvalue.
pub fn operator_norm(m: &HermitianMatrix, positive: bool) -> Result<f64> {
    let eig = m.spectral().eigenvalues;
    let top = eig[0];
    let bottom = eig[eig.len() - 1];
    if positive {
        if bottom < -NEGATIVE_EIG_TOL {
            return Err(Error::Domain(format!(
                "matrix flagged positive has eigenvalue {bottom:e}"
            )));
        }
        return Ok(top.max(0.0));
    }
    Ok(top.abs().max(bottom.abs()))
}

/// Largest singular value of an arbitrary square matrix.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Schatten p-norm `(Σ λ_i^p)^{1/p}` of a positive hermitian matrix;
/// `p = f64::INFINITY` selects the operator norm.
pub fn schatten_norm(m: &HermitianMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("schatten exponent must be >= 1, got {p}")));
    }
    let eig = positive_spectrum(m)?;
    if p.is_infinite() {
        return Ok(eig[0]);
    }
    Ok(eig.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// `M^p` for positive hermitian `M` through the spectral calculus, with
/// eigenvalue noise below zero clipped before powering.
pub fn matrix_power(m: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let sd = m.spectral();
    if let Some(&bottom) = sd.eigenvalues.last() {
        if bottom < -NEGATIVE_EIG_TOL {
            return Err(Error::Domain(format!(
                "fractional power of a matrix with eigenvalue {bottom:e}"
            )));
        }
    }
    Ok(sd.map(|x| {
        let x = x.max(0.0);
        if p == 0.0 {
            1.0
        } else {
            x.powf(p)
        }
    }))
}

/// Eigenvalues (descending) clipped at zero, failing on genuine negativity.
fn positive_spectrum(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let eig = m.spectral().eigenvalues;
    let bottom = eig[eig.len() - 1];
    if bottom < -NEGATIVE_EIG_TOL {
        return Err(Error::Domain(format!("matrix is not positive: eigenvalue {bottom:e}")));
    }
    Ok(eig.into_iter().map(|x| x.max(0.0)).collect())
}
