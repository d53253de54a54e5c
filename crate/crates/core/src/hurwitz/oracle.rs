//! Reference computations that share no code path with the recursion.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigUint;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{CMat, HermitianMatrix};
use crate::words::{binomial, enumerate_words, Letter};

/// Word count above which [`hurwitz_trace_oracle`] refuses to enumerate.
pub const ORACLE_WORD_CAP: u64 = 1_000_000;
/// Largest degree accepted by [`trace_coefficients_by_interpolation`].
pub const INTERPOLATION_MAX_DEGREE: u64 = 12;

/// `tr S_{m,k}(A,B)` by summing the trace of every word, each multiplied out
/// left to right.
pub fn hurwitz_trace_oracle(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<f64> {
    crate::matrix::check_dims(a, b)?;
    if binomial(m, k as i64) > BigUint::from(ORACLE_WORD_CAP) {
        return Err(Error::Resource(format!(
            "C({m},{k}) words exceeds the oracle cap {ORACLE_WORD_CAP}"
        )));
    }
    let n = a.dim();
    let mut total = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0f64;
    for word in enumerate_words(m, k)? {
        let mut prod = CMat::identity(n, n);
        for letter in word.letters() {
            prod = match letter {
                Letter::A => prod * a.as_matrix(),
                Letter::B => prod * b.as_matrix(),
            };
        }
        let t = prod.trace();
        magnitude += t.norm();
        total += t;
    }
    if total.im.abs() > 1e-9 * magnitude.max(f64::MIN_POSITIVE) {
        return Err(Error::NumericalConsistency(format!(
            "word-sum trace has imaginary part {:e}",
            total.im
        )));
    }
    Ok(total.re)
}

/// Coefficients `c_0..c_m` of `t ↦ tr(A + tB)^m`, recovered from samples at
/// the nodes `t_j = j/m`, `j = 1..m+1`, by a pivoted Vandermonde solve.
pub fn trace_coefficients_by_interpolation(a: &HermitianMatrix, b: &HermitianMatrix, m: u64) -> Result<Vec<f64>> {
    crate::matrix::check_dims(a, b)?;
    if m > INTERPOLATION_MAX_DEGREE {
        return Err(Error::Precondition(format!(
            "interpolation degree {m} above the conditioning cap {INTERPOLATION_MAX_DEGREE}"
        )));
    }
    let size = m as usize + 1;
    let nodes: Vec<f64> = (1..=size).map(|j| if m == 0 { 1.0 } else { j as f64 / m as f64 }).collect();
    let values: Vec<f64> = nodes
        .iter()
        .map(|&t| {
            let base = a.as_matrix() + b.as_matrix().scale(t);
            let mut p = CMat::identity(a.dim(), a.dim());
            for _ in 0..m {
                p = &p * &base;
            }
            p.trace().re
        })
        .collect();
    let v = DMatrix::<f64>::from_fn(size, size, |r, c| nodes[r].powi(c as i32));
    let y = DVector::from_vec(values);
    let c = v
        .clone()
        .lu()
        .solve(&y)
        .ok_or_else(|| Error::Conditioning("Vandermonde system is singular".into()))?;
    let residual = (&v * &c - &y).amax();
    let scale = y.amax().max(f64::MIN_POSITIVE);
    if residual > 1e-6 * scale {
        return Err(Error::Conditioning(format!(
            "interpolation residual {residual:e} exceeds 1e-6 relative"
        )));
    }
    Ok(c.iter().copied().collect())
}
