//! Hurwitz products `S_{m,k}(A,B)`, the coefficient of `t^k` in `(A + tB)^m`,
//! together with their traces and normalized quotients.

mod contour;
mod oracle;
mod power;
mod quotient;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_dims, spectral_norm, CMat, HermitianMatrix};

pub use oracle::{hurwitz_trace_oracle, trace_coefficients_by_interpolation, INTERPOLATION_MAX_DEGREE, ORACLE_WORD_CAP};
#[allow(unused_imports)]
pub(crate) use quotient::{phone_quotient, phone_quotient_grid, phone_quotient_row, phone_quotient_run, PhonePair};
pub use quotient::{
    normalized_quotient, quotient_grid, quotient_row, quotient_run, quotient_sequence, QuotientSequence, POWER_ROUTE_MAX_K,
    TABLE_ROUTE_MAX_M,
};
pub use table::HurwitzTable;

/// `C(m,k)` as a double; `+inf` once it leaves the double range.
pub fn binomial_f64(m: u64, k: u64) -> f64 {
    if k > m {
        return 0.0;
    }
    let k = k.min(m - k);
    if k > 1100 {
        // C(m, k) >= C(2200, 1100) > 1e660
        return f64::INFINITY;
    }
    // each factor is >= 1 for k <= m/2, so partial products never overshoot
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

fn unit_scale(m: &HermitianMatrix) -> f64 {
    let s = spectral_norm(m.as_matrix());
    if s > 0.0 {
        s
    } else {
        1.0
    }
}

/// `S_{m,k}/(C(m,k)·‖A‖^{m-k}·‖B‖^k)`, the entries of which are bounded by 1.
fn unit_cell(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<(CMat, f64)> {
    check_dims(a, b)?;
    let (ca, cb) = (unit_scale(a), unit_scale(b));
    let cell = quotient::normalized_cell_by_recursion(
        &a.as_matrix().unscale(ca),
        &b.as_matrix().unscale(cb),
        m,
        k,
    );
    let scale = binomial_f64(m, k) * ca.powf((m - k.min(m)) as f64) * cb.powf(k as f64);
    Ok((cell, scale))
}

/// `S_{m,k}(A,B)`: the sum of the `C(m,k)` words with `m-k` letters `A` and
/// `k` letters `B`. Zero for `k > m`.
pub fn hurwitz_matrix(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<HermitianMatrix> {
    let (cell, scale) = unit_cell(a, b, m, k)?;
    let defect = crate::matrix::max_abs(&(&cell - cell.adjoint()));
    if defect > 1e-9 {
        return Err(Error::NumericalConsistency(format!(
            "S_{{{m},{k}}} lost hermiticity: defect {defect:e} relative to scale"
        )));
    }
    if !scale.is_finite() {
        return Err(Error::Resource(format!("S_{{{m},{k}}} overflows double range")));
    }
    Ok(HermitianMatrix::hermitian_part(&cell.scale(scale)))
}

/// `tr S_{m,k}(A,B)`, the coefficient of `t^k` in `tr(A + tB)^m`.
pub fn hurwitz_trace(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<f64> {
    let (cell, scale) = unit_cell(a, b, m, k)?;
    let t = cell.trace();
    if t.im.abs() > 1e-9 * a.dim() as f64 {
        return Err(Error::NumericalConsistency(format!(
            "tr S_{{{m},{k}}} has imaginary part {:e} relative to scale",
            t.im
        )));
    }
    if t.re == 0.0 {
        return Ok(0.0);
    }
    let value = t.re * scale;
    if !value.is_finite() {
        return Err(Error::Resource(format!("tr S_{{{m},{k}}} overflows double range")));
    }
    Ok(value)
}

/// One trace evaluation as emitted by the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub m: u64,
    pub k: u64,
    pub trace: f64,
    /// Present when both inputs are positive and nonzero.
    pub q: Option<f64>,
}

impl TraceRecord {
    pub fn compute(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<Self> {
        let trace = hurwitz_trace(a, b, m, k)?;
        let q = normalized_quotient(a, b, m, k).ok();
        Ok(Self { m, k, trace, q })
    }
}
