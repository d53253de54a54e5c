use serde::{Deserialize, Serialize};

use super::contour::{contour_cost, quotient_by_contour, quotient_window_by_contour};
use super::power::normalized_row_by_powering;
use super::table::{step_window, HurwitzTable};
use crate::error::{Error, Result};
use crate::matrix::{check_dims, operator_norm, CMat, HermitianMatrix};

/// Above this `m`, interior coefficients are extracted on a contour rather
/// than by the recursion.
pub const TABLE_ROUTE_MAX_M: u64 = 2048;
/// Largest `min(k, m-k)` handled by truncated binary powering.
pub const POWER_ROUTE_MAX_K: u64 = 256;

/// `q_{m,k}` for `m = k, k+1, …` sharing a single table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientSequence {
    pub k: u64,
    /// `(m, q_{m,k})` pairs.
    pub values: Vec<(u64, f64)>,
    pub norm_a: f64,
    pub norm_b: f64,
}

impl QuotientSequence {
    pub fn q_values(&self) -> Vec<f64> {
        self.values.iter().map(|&(_, q)| q).collect()
    }
}

/// A positive pair rescaled to unit operator norm.
#[derive(Clone, Debug)]
pub(crate) struct PhonePair {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub norm_a: f64,
    pub norm_b: f64,
}

impl PhonePair {
    pub fn new(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Self> {
        check_dims(a, b)?;
        let norm_a = operator_norm(a, true)?;
        let norm_b = operator_norm(b, true)?;
        if norm_a == 0.0 || norm_b == 0.0 {
            return Err(Error::Domain("normalized quotient of a zero matrix".into()));
        }
        Ok(Self { a: a.scaled(1.0 / norm_a), b: b.scaled(1.0 / norm_b), norm_a, norm_b })
    }

    fn n(&self) -> f64 {
        self.a.dim() as f64
    }
}

/// Imaginary drift allowed in a normalized trace. Deep powering runs
/// (hundreds of cells, ~30 squarings) legitimately reach ~1e-8; a genuinely
/// non-hermitian input shows up at order one.
pub const IMAGINARY_DRIFT_TOL: f64 = 1e-6;

fn trace_over_n(cell: &CMat, n: f64) -> Result<f64> {
    let t = cell.trace();
    if t.im.abs() > IMAGINARY_DRIFT_TOL * n {
        return Err(Error::NumericalConsistency(format!(
            "normalized trace has imaginary part {:e}",
            t.im
        )));
    }
    Ok(t.re / n)
}

/// `tr S_{m,k}(A,B) / (n·‖A‖^{m-k}·‖B‖^k·C(m,k))`.
///
/// Computed on `A/‖A‖`, `B/‖B‖` from coefficients already divided by the
/// binomial, so no intermediate quantity leaves `[-n, n]`.
pub fn normalized_quotient(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<f64> {
    if k > m {
        return Err(Error::Precondition(format!("quotient needs k <= m, got m = {m}, k = {k}")));
    }
    let pair = PhonePair::new(a, b)?;
    phone_quotient(&pair.a, &pair.b, m, k)
}

/// [`normalized_quotient`] for inputs already of unit norm.
pub(crate) fn phone_quotient(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<f64> {
    // q_{m,k}(A,B) = q_{m,m-k}(B,A)
    let (a, b, k) = if 2 * k > m { (b, a, m - k) } else { (a, b, k) };
    let n = a.dim() as f64;
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let bits = (64 - m.leading_zeros()) as f64;
    let kf = (k + 1) as f64;
    let power_cost = if k <= POWER_ROUTE_MAX_K { bits * kf * kf } else { f64::INFINITY };
    let table_cost = if m <= TABLE_ROUTE_MAX_M { m as f64 * kf } else { f64::INFINITY };
    let contour_cost = if k > 0 { contour_cost(m, k) } else { f64::INFINITY };
    if power_cost <= table_cost && power_cost <= contour_cost {
        let row = normalized_row_by_powering(am, bm, m, k);
        trace_over_n(&row[k as usize], n)
    } else if table_cost <= contour_cost {
        trace_over_n(&normalized_cell_by_recursion(am, bm, m, k), n)
    } else {
        Ok(quotient_by_contour(am, bm, m, k))
    }
}

/// `q_{m,k}` for `k_lo <= k <= k_hi` at a single `m`. Interior coefficients
/// come in windows of about four standard deviations, each sharing one
/// contour.
pub(crate) fn phone_quotient_row(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k_lo: u64, k_hi: u64) -> Result<Vec<f64>> {
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let mut out = Vec::with_capacity((k_hi + 1).saturating_sub(k_lo) as usize);
    let mut k = k_lo;
    while k <= k_hi.min(m) {
        if k == 0 || k == m || m <= 64 {
            out.push(phone_quotient(a, b, m, k)?);
            k += 1;
            continue;
        }
        let p = k as f64 / m as f64;
        let h = ((2.0 * (m as f64 * p * (1.0 - p)).sqrt()).floor() as u64).max(1);
        let center = (k + h).min(m - 1);
        let hi = (center + h).min(m - 1).min(k_hi);
        out.extend(quotient_window_by_contour(am, bm, m, center, k, hi));
        k = hi + 1;
    }
    Ok(out)
}

/// `q_{m,k}` for `k_lo <= k <= k_hi` at fixed `m`.
pub fn quotient_row(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k_lo: u64, k_hi: u64) -> Result<Vec<f64>> {
    let pair = PhonePair::new(a, b)?;
    phone_quotient_row(&pair.a, &pair.b, m, k_lo, k_hi)
}

/// `S_{m,k}/C(m,k)` keeping two rows and only the columns that feed `(m, k)`.
pub(crate) fn normalized_cell_by_recursion(a: &CMat, b: &CMat, m: u64, k: u64) -> CMat {
    let n = a.nrows();
    if k > m {
        return CMat::zeros(n, n);
    }
    let mut row = vec![CMat::identity(n, n)];
    let mut lo = 0;
    for mm in 1..=m {
        let new_lo = k.saturating_sub(m - mm);
        let hi = mm.min(k);
        row = step_window(a, b, mm, &row, lo, new_lo, hi);
        lo = new_lo;
    }
    row.pop().unwrap()
}

/// `q_{k,k}, q_{k+1,k}, …, q_{k+m_count-1,k}` from one [`HurwitzTable`].
pub fn quotient_sequence(a: &HermitianMatrix, b: &HermitianMatrix, k: u64, m_count: u64) -> Result<QuotientSequence> {
    if m_count < 1 {
        return Err(Error::Precondition("quotient sequence needs at least one term".into()));
    }
    let pair = PhonePair::new(a, b)?;
    let m_max = k + m_count - 1;
    let table = HurwitzTable::with_k_limit(&pair.a, &pair.b, m_max, k);
    let values = (k..=m_max)
        .map(|m| Ok((m, trace_over_n(table.normalized_cell(m, k).unwrap(), pair.n())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuotientSequence { k, values, norm_a: pair.norm_a, norm_b: pair.norm_b })
}

/// `q_{m,k}` for `m = m_from, …, m_from + count - 1` with fixed `k`.
///
/// For small `k` the starting row is reached by binary powering and then
/// stepped forward, so `m_from` may be astronomically large.
pub fn quotient_run(a: &HermitianMatrix, b: &HermitianMatrix, k: u64, m_from: u64, count: u64) -> Result<Vec<f64>> {
    if m_from < k {
        return Err(Error::Precondition(format!("run starts at m = {m_from} below k = {k}")));
    }
    let pair = PhonePair::new(a, b)?;
    phone_quotient_run(&pair.a, &pair.b, k, m_from, count)
}

pub(crate) fn phone_quotient_run(a: &HermitianMatrix, b: &HermitianMatrix, k: u64, m_from: u64, count: u64) -> Result<Vec<f64>> {
    let n = a.dim() as f64;
    if k > POWER_ROUTE_MAX_K {
        return (m_from..m_from + count).map(|m| phone_quotient(a, b, m, k)).collect();
    }
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let mut row = normalized_row_by_powering(am, bm, m_from, k);
    let mut out = Vec::with_capacity(count as usize);
    for m in m_from..m_from + count {
        if m > m_from {
            row = step_window(am, bm, m, &row, 0, 0, m.min(k));
        }
        out.push(trace_over_n(&row[k as usize], n)?);
    }
    Ok(out)
}

/// Every `q_{m,k}`, `0 <= k <= m`, for `m_from <= m <= m_to`; row `i` holds
/// `m_from + i + 1` values. Cost grows like `m_to²`.
pub fn quotient_grid(a: &HermitianMatrix, b: &HermitianMatrix, m_from: u64, m_to: u64) -> Result<Vec<Vec<f64>>> {
    let pair = PhonePair::new(a, b)?;
    phone_quotient_grid(&pair.a, &pair.b, m_from, m_to)
}

pub(crate) fn phone_quotient_grid(a: &HermitianMatrix, b: &HermitianMatrix, m_from: u64, m_to: u64) -> Result<Vec<Vec<f64>>> {
    let n = a.dim() as f64;
    let (am, bm) = (a.as_matrix(), b.as_matrix());
    let mut row = vec![CMat::identity(a.dim(), a.dim())];
    let mut out = Vec::new();
    for m in 0..=m_to {
        if m > 0 {
            row = step_window(am, bm, m, &row, 0, 0, m);
        }
        if m >= m_from {
            out.push(row.iter().map(|c| trace_over_n(c, n)).collect::<Result<Vec<_>>>()?);
        }
    }
    Ok(out)
}
