use serde::{Deserialize, Serialize};

use super::{a_minus_limit_norm, projected_trace_power};
use crate::error::{Error, Result};
use crate::hurwitz::{phone_quotient_run, PhonePair};
use crate::matrix::{spectral_norm, split_on_power_limit, HermitianMatrix, PhoneMatrix};

/// `‖AB‖` (after normalization) at or below this counts as a vanishing product.
pub const PRODUCT_ZERO_TOL: f64 = 1e-10;
/// Projected traces at or below this are treated as zero and send `m0_bound`
/// to the splitting branch.
pub const PROJECTED_TRACE_TOL: f64 = 1e-10;
/// `‖A - P_A‖` at or below this makes `A` a projector.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Largest range [`positivity_scan`] will evaluate.
pub const SCAN_RANGE_CAP: u64 = 1_000_000;
/// Quotients above this count as positive.
pub const POSITIVE_Q_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Projector,
    NonProjector,
    SplitChain,
}

/// One block reduction `A = 1 ⊕ αA'`, `B = 0 ⊕ B'` with `A', B'` of size `l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitStep {
    pub alpha: f64,
    pub l: usize,
}

/// Explicit threshold past which `tr S_{m,k}(A,B) > 0`, with every quantity
/// that went into it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub k: u64,
    pub m0: u64,
    pub branch: Branch,
    /// Formula applied to the final block (never `SplitChain`).
    pub block_branch: Branch,
    pub chain: Vec<SplitStep>,
    /// `tr(P_A B)^k`, or `tr(AB)^k` for a projector, on the final block.
    pub trace: f64,
    pub a_minus_pa_norm: f64,
    /// Dimension of the final block.
    pub n: usize,
    /// Whether the logarithmic factor was raised to its floor of 2.
    pub clamped: bool,
    /// Threshold before rounding and the `m0 >= k + 1` floor.
    pub m0_real: f64,
}

/// Explicit `m0` with `tr S_{m,k}(A,B) > 0` for all `m >= m0`.
pub fn m0_bound(a: &HermitianMatrix, b: &HermitianMatrix, k: u64) -> Result<PositivityCertificate> {
    if k == 0 {
        return Err(Error::Precondition("positivity threshold needs k >= 1".into()));
    }
    let pair = PhonePair::new(a, b)?;
    let mut a = PhoneMatrix::normalize(&pair.a)?;
    let mut b = PhoneMatrix::normalize(&pair.b)?;
    let ab = spectral_norm(&(a.as_matrix() * b.as_matrix()));
    if ab <= PRODUCT_ZERO_TOL {
        return Err(Error::Domain(format!(
            "AB = 0 (‖AB‖ = {ab:e}): every trace with 0 < k < m vanishes, no threshold exists"
        )));
    }
    let start_dim = a.dim();
    let mut chain = Vec::new();
    loop {
        let n = a.dim();
        let t = projected_trace_power(&a, &b, k)?;
        if t <= PROJECTED_TRACE_TOL {
            if let Some(split) = split_on_power_limit(&a, &b)? {
                if !(split.alpha > 0.0 && split.alpha < 1.0) {
                    return Err(Error::Structural(format!("split produced α = {} outside (0, 1)", split.alpha)));
                }
                chain.push(SplitStep { alpha: split.alpha, l: split.l });
                if chain.len() >= start_dim {
                    return Err(Error::Structural("split chain did not terminate within n steps".into()));
                }
                a = split.a_prime;
                b = split.b_prime;
                continue;
            }
            // tr(P_A B) itself is above tolerance: the projected trace is
            // small but genuinely positive and the formula still applies
        }
        let gap = a_minus_limit_norm(&a)?;
        let kn3 = 3.0 * k as f64 * n as f64;
        let (block_branch, trace, m0_real, clamped) = if gap <= PROJECTOR_TOL {
            let tab = ab_trace_power(&a, &b, k);
            (Branch::Projector, tab, (1.0 + 2.0 * k as f64) * (1.0 + kn3 / tab), false)
        } else {
            let bracket = 2.0 + (t.ln() - kn3.ln()) / gap.ln();
            let clamped = bracket < 2.0;
            let value = (1.0 + k as f64) * (1.0 + kn3 / t) * bracket.max(2.0);
            (Branch::NonProjector, t, value, clamped)
        };
        if !m0_real.is_finite() || m0_real >= u64::MAX as f64 {
            return Err(Error::Resource(format!("threshold {m0_real:e} does not fit in 64 bits")));
        }
        let m0 = (m0_real.ceil() as u64).max(k + 1);
        let branch = if chain.is_empty() { block_branch } else { Branch::SplitChain };
        return Ok(PositivityCertificate {
            k,
            m0,
            branch,
            block_branch,
            chain,
            trace,
            a_minus_pa_norm: gap,
            n,
            clamped,
            m0_real,
        });
    }
}

fn ab_trace_power(a: &PhoneMatrix, b: &PhoneMatrix, k: u64) -> f64 {
    let ab = a.as_matrix() * b.as_matrix();
    let mut p = ab.clone();
    for _ in 1..k {
        p = &p * &ab;
    }
    p.trace().re
}

/// A value `m` at or past the threshold where the trace is not positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityViolation {
    pub m: u64,
    pub q: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityScan {
    pub k: u64,
    pub m_from: u64,
    pub m_to: u64,
    /// Least `m` in range with `q_{m,k} > 1e-12`.
    pub first_positive_m: Option<u64>,
    /// Absent when `AB = 0`.
    pub certificate: Option<PositivityCertificate>,
    pub violations: Vec<PositivityViolation>,
    pub min_q: f64,
}

/// Evaluates the sign of `tr S_{m,k}` for `m_from <= m <= m_to`, reporting
/// every non-positive value at or above the certified threshold.
pub fn positivity_scan(a: &HermitianMatrix, b: &HermitianMatrix, k: u64, m_from: u64, m_to: u64) -> Result<PositivityScan> {
    if m_from > m_to {
        return Err(Error::Precondition(format!("empty range [{m_from}, {m_to}]")));
    }
    if m_to - m_from >= SCAN_RANGE_CAP {
        return Err(Error::Resource(format!("scan range exceeds {SCAN_RANGE_CAP} values")));
    }
    let pair = PhonePair::new(a, b)?;
    let certificate = if k == 0 {
        None
    } else {
        match m0_bound(a, b, k) {
            Ok(c) => Some(c),
            Err(Error::Domain(_)) => None,
            Err(e) => return Err(e),
        }
    };
    // S_{m,k} = 0 for m < k
    let start = m_from.max(k);
    let qs = if start <= m_to {
        phone_quotient_run(&pair.a, &pair.b, k, start, m_to - start + 1)?
    } else {
        Vec::new()
    };
    let values: Vec<(u64, f64)> = (m_from..start).map(|m| (m, 0.0)).chain((start..).zip(qs)).collect();
    let first_positive_m = values.iter().find(|&&(_, q)| q > POSITIVE_Q_TOL).map(|&(m, _)| m);
    let violations = match &certificate {
        Some(c) => values
            .iter()
            .filter(|&&(m, q)| m >= c.m0 && q <= 0.0)
            .map(|&(m, q)| PositivityViolation { m, q })
            .collect(),
        None => Vec::new(),
    };
    let min_q = values.iter().map(|&(_, q)| q).fold(f64::INFINITY, f64::min);
    Ok(PositivityScan { k, m_from, m_to, first_positive_m, certificate, violations, min_q })
}
