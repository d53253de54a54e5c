use serde::{Deserialize, Serialize};

use super::{a_minus_limit_norm, projected_trace_power};
use crate::error::{Error, Result};
use crate::hurwitz::phone_quotient;
use crate::matrix::{matrix_power, power_limit, spectral_norm, CMat, PhoneMatrix};
use crate::words::alternation_threshold;

/// Hard cap on the `L` search in [`prop_4_2_check`].
pub const L_SEARCH_CAP: u64 = 10_000;

/// Both sides of `‖∏ A^{l_i}B - (P_A B)^k‖ <= k‖A - P_A‖^L ‖A^L B‖^{k-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductGap {
    pub lhs: f64,
    pub rhs: f64,
}

impl ProductGap {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn lemma_4_1_gap(a: &PhoneMatrix, b: &PhoneMatrix, exponents: &[u64], l: u64) -> Result<ProductGap> {
    crate::matrix::check_dims(a, b)?;
    if l == 0 {
        return Err(Error::Precondition("L must be positive".into()));
    }
    if exponents.is_empty() {
        return Err(Error::Precondition("need at least one exponent".into()));
    }
    if let Some(&bad) = exponents.iter().find(|&&e| e < l) {
        return Err(Error::Precondition(format!("exponent {bad} is below L = {l}")));
    }
    let n = a.dim();
    let pa = power_limit(a)?;
    let pab = pa.as_matrix() * b.as_matrix();
    let mut product = CMat::identity(n, n);
    let mut limit = CMat::identity(n, n);
    for &e in exponents {
        product = product * matrix_power(a, e as f64)?.as_matrix() * b.as_matrix();
        limit = limit * &pab;
    }
    let k = exponents.len() as i32;
    let al_b = matrix_power(a, l as f64)?.as_matrix() * b.as_matrix();
    let rhs = k as f64 * a_minus_limit_norm(a)?.powf(l as f64) * spectral_norm(&al_b).powi(k - 1);
    Ok(ProductGap { lhs: spectral_norm(&(product - limit)), rhs })
}

/// Largest entrywise residual of
/// `X_1⋯X_k = X^k + Σ_i X^{i-1}(X_i - X)X_{i+1}⋯X_k`, relative to the size of
/// the left side.
pub fn telescoping_residual(factors: &[CMat], x: &CMat) -> f64 {
    let n = x.nrows();
    let k = factors.len();
    let mut lhs = CMat::identity(n, n);
    for f in factors {
        lhs = lhs * f;
    }
    // suffix[i] = X_{i+1}⋯X_k (1-based), suffix[k] = 1
    let mut suffix = vec![CMat::identity(n, n); k + 1];
    for i in (0..k).rev() {
        suffix[i] = &factors[i] * &suffix[i + 1];
    }
    let mut rhs = CMat::zeros(n, n);
    let mut x_pow = CMat::identity(n, n);
    for i in 0..k {
        rhs += &x_pow * (&factors[i] - x) * &suffix[i + 1];
        x_pow = x_pow * x;
    }
    rhs += &x_pow;
    let scale = crate::matrix::max_abs(&lhs).max(1.0);
    crate::matrix::max_abs(&(lhs - rhs)) / scale
}

/// Report of the approximation `q_{m,k} ≈ tr(P_A B)^k / n` at the `m` derived
/// from the smallest admissible `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectedTraceReport {
    pub k: u64,
    pub epsilon: f64,
    pub l: u64,
    pub m: u64,
    pub projected_trace: f64,
    pub q: f64,
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn prop_4_2_check(a: &PhoneMatrix, b: &PhoneMatrix, k: u64, epsilon: f64) -> Result<ProjectedTraceReport> {
    crate::matrix::check_dims(a, b)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let n = a.dim() as f64;
    let gap = a_minus_limit_norm(a)?;
    let l = if gap == 0.0 || k == 0 {
        1
    } else {
        let mut found = None;
        for l in 1..=L_SEARCH_CAP {
            let al_b = matrix_power(a, l as f64)?.as_matrix() * b.as_matrix();
            let value = k as f64 * gap.powf(l as f64) * spectral_norm(&al_b).powf((k - 1) as f64);
            if value < epsilon {
                found = Some(l);
                break;
            }
        }
        found.ok_or_else(|| Error::Resource(format!("no L <= {L_SEARCH_CAP} brings the product gap below {epsilon}")))?
    };
    let m_real = (1.0 + k as f64 / epsilon) * (k + k * l + l) as f64;
    let m = (m_real.ceil() as u64).max(k);
    let t = projected_trace_power(a, b, k)?;
    let q = phone_quotient(a, b, m, k)?;
    let lhs = (q - t / n).abs();
    let bound = (t / n + 2.0) * epsilon;
    let slack = bound - lhs;
    Ok(ProjectedTraceReport { k, epsilon, l, m, projected_trace: t, q, lhs, bound, slack, holds: slack >= -super::REPORT_SLACK })
}

/// Report of `|q_{m,k}| < ε + ‖AB‖^S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternationReport {
    pub s: u64,
    pub epsilon: f64,
    pub m: u64,
    pub k: u64,
    pub abs_q: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

pub fn prop_4_4_check(a: &PhoneMatrix, b: &PhoneMatrix, s: u64, epsilon: f64, m: u64, k: u64) -> Result<AlternationReport> {
    crate::matrix::check_dims(a, b)?;
    let least = alternation_threshold(s, epsilon)?;
    if m < least {
        return Err(Error::Precondition(format!("m = {m} is not above S³/ε + 2S - 1 (least admissible {least})")));
    }
    if k < s || k > m || m - k < s {
        return Err(Error::Precondition(format!("need k, m - k >= S; got m = {m}, k = {k}, S = {s}")));
    }
    let abs_q = phone_quotient(a, b, m, k)?.abs();
    let ab = spectral_norm(&(a.as_matrix() * b.as_matrix()));
    let bound = epsilon + ab.powf(s as f64);
    let slack = bound - abs_q;
    Ok(AlternationReport { s, epsilon, m, k, abs_q, bound, slack, holds: slack >= -super::REPORT_SLACK })
}
