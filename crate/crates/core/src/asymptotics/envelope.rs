use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{m0_bound, PRODUCT_ZERO_TOL};
use crate::error::{Error, Result};
use crate::hurwitz::{phone_quotient_grid, phone_quotient_row, phone_quotient_run};
use crate::matrix::{common_top_eigenspace_dim, decompose_common_top, spectral_norm, HermitianMatrix, PhoneMatrix};
use crate::words::alternation_threshold;

/// Numerical slack granted to every envelope verdict.
pub const ENVELOPE_SLACK: f64 = 1e-10;
/// Largest `k0` the envelope will search for.
pub const K0_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeCase {
    /// `A = B = 1`: `q ≡ 1`.
    Identity,
    /// No shared top eigenvector: `‖AB‖ < 1`.
    Contracting,
    /// Shared top space split off; the rest has `‖A'‖‖B'‖ = 1`, `‖A'B'‖ < 1`.
    SharedTop,
    /// Shared top space split off; the rest has `‖A'‖‖B'‖ < 1`.
    SharedTopSubunit,
}

/// Thresholds `m0`, `k0` with `d/n - ε < q_{m,k}` for `m >= m0` and all `k`,
/// and `q_{m,k} < d/n + ε` for `m >= m0`, `k0 <= k <= m - k0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientEnvelope {
    pub epsilon: f64,
    pub d: usize,
    pub n: usize,
    pub m0: u64,
    pub k0: u64,
    /// Threshold for the two-sided interior estimate alone.
    pub m0_interior: u64,
    /// Largest positivity threshold over the boundary columns `k <= k0`.
    pub m0_boundary: u64,
    pub case: EnvelopeCase,
    /// The quantity raised to the power `k0`.
    pub contraction: f64,
}

impl QuotientEnvelope {
    pub fn target(&self) -> f64 {
        self.d as f64 / self.n as f64
    }
}

/// Least `k >= 1` with `c^k < target`.
fn least_power_below(c: f64, target: f64) -> Result<u64> {
    if c < target {
        return Ok(1);
    }
    if c >= 1.0 {
        return Err(Error::Structural(format!("contraction {c} is not below 1")));
    }
    let mut k = ((target.ln() / c.ln()).floor() as u64).max(1);
    while k > 1 && c.powf((k - 1) as f64) < target {
        k -= 1;
    }
    while c.powf(k as f64) >= target {
        k += 1;
        if k > K0_CAP {
            return Err(Error::Resource(format!("k0 exceeds {K0_CAP} for contraction {c}")));
        }
    }
    Ok(k)
}

/// The pair on which the boundary positivity thresholds are computed: the
/// input itself, or the blocks left after splitting off the shared top space.
fn working_pair(a: &PhoneMatrix, b: &PhoneMatrix, d: usize) -> Result<Option<(HermitianMatrix, HermitianMatrix)>> {
    if d == 0 {
        return Ok(Some((a.as_hermitian().clone(), b.as_hermitian().clone())));
    }
    let split = decompose_common_top(a, b)?;
    Ok(split.a_prime.zip(split.b_prime))
}

pub fn theorem_4_5_envelope(a: &PhoneMatrix, b: &PhoneMatrix, epsilon: f64) -> Result<QuotientEnvelope> {
    crate::matrix::check_dims(a, b)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let n = a.dim();
    let d = common_top_eigenspace_dim(a, b)?;
    let Some((wa, wb)) = working_pair(a, b, d)? else {
        return Ok(QuotientEnvelope {
            epsilon,
            d,
            n,
            m0: 1,
            k0: 1,
            m0_interior: 1,
            m0_boundary: 1,
            case: EnvelopeCase::Identity,
            contraction: 0.0,
        });
    };
    let (case, contraction, k0) = if d == 0 {
        let c = spectral_norm(&(a.as_matrix() * b.as_matrix()));
        (EnvelopeCase::Contracting, c, least_power_below(c, epsilon / 2.0)?)
    } else {
        let product = spectral_norm(wa.as_matrix()) * spectral_norm(wb.as_matrix());
        if product < 1.0 - PRODUCT_ZERO_TOL {
            (EnvelopeCase::SharedTopSubunit, product, least_power_below(product, epsilon)?)
        } else {
            let c = spectral_norm(&(wa.as_matrix() * wb.as_matrix()));
            (EnvelopeCase::SharedTop, c, least_power_below(c, epsilon / 2.0)?)
        }
    };
    let m0_interior = alternation_threshold(k0, epsilon / 2.0)?;
    let mut m0_boundary = 0;
    let vanishing = spectral_norm(wa.as_matrix()) == 0.0
        || spectral_norm(wb.as_matrix()) == 0.0
        || spectral_norm(&(wa.as_matrix() * wb.as_matrix())) / (spectral_norm(wa.as_matrix()) * spectral_norm(wb.as_matrix()))
            <= PRODUCT_ZERO_TOL;
    if !vanishing {
        for k in 1..=k0 {
            m0_boundary = m0_boundary.max(m0_bound(&wa, &wb, k)?.m0).max(m0_bound(&wb, &wa, k)?.m0);
        }
    }
    Ok(QuotientEnvelope {
        epsilon,
        d,
        n,
        m0: m0_interior.max(m0_boundary),
        k0,
        m0_interior,
        m0_boundary,
        case,
        contraction,
    })
}

/// How densely [`check_envelope`] samples the grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeGrid {
    /// Each band covers `m0, …, m0 + span`.
    pub span: u64,
    /// Bands ending at or below this `m` use the exact recursion for every `k`.
    pub exact_max_m: u64,
    /// Above `exact_max_m`, rows at or below this `m` are still covered for
    /// every interior `k` (by contour windows); larger rows are sampled.
    pub dense_max_m: u64,
    /// Interior columns per sampled row.
    pub samples: u64,
}

impl Default for EnvelopeGrid {
    fn default() -> Self {
        Self { span: 20, exact_max_m: 3000, dense_max_m: 40_000, samples: 33 }
    }
}

/// Outcome of evaluating both envelope bounds on a finite grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub envelope: QuotientEnvelope,
    pub interior_m: (u64, u64),
    pub interior_points: u64,
    /// Whether every interior column was evaluated, rather than a sample.
    pub interior_dense: bool,
    /// Largest `|q - d/n|` over `k0 <= k <= m - k0`.
    pub max_interior_deviation: f64,
    pub boundary_m: (u64, u64),
    pub boundary_points: u64,
    /// Smallest `q - d/n` over every evaluated point.
    pub min_excess: f64,
    /// Largest `q - d/n` over every evaluated interior point.
    pub max_excess: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub interior_holds: bool,
}

fn interior_columns(m: u64, k0: u64, dense: bool, samples: u64) -> Vec<u64> {
    if k0 > m - k0.min(m) {
        return Vec::new();
    }
    let (lo, hi) = (k0, m - k0);
    if dense || hi - lo < samples {
        return (lo..=hi).collect();
    }
    let mut cols: Vec<u64> = (0..samples).map(|i| lo + (hi - lo) * i / (samples - 1)).collect();
    cols.push(m / 2);
    cols.sort_unstable();
    cols.dedup();
    cols
}

/// Evaluates the envelope on `m ∈ [m0_interior, m0_interior + span]` for the
/// interior columns and on `m ∈ [m0, m0 + span]` for the boundary columns
/// `k <= k0`, `k >= m - k0`.
pub fn check_envelope(a: &PhoneMatrix, b: &PhoneMatrix, envelope: &QuotientEnvelope, grid: &EnvelopeGrid) -> Result<EnvelopeCheck> {
    let target = envelope.target();
    let (ah, bh) = (a.as_hermitian(), b.as_hermitian());
    let k0 = envelope.k0;

    // interior band
    let i_from = envelope.m0_interior;
    let i_to = i_from + grid.span;
    let dense = i_to <= grid.dense_max_m;
    let rows: Vec<(u64, Vec<(u64, f64)>)> = if i_to <= grid.exact_max_m {
        phone_quotient_grid(ah, bh, i_from, i_to)?
            .into_iter()
            .zip(i_from..)
            .map(|(row, m)| (m, interior_columns(m, k0, true, 0).into_iter().map(|k| (k, row[k as usize])).collect()))
            .collect()
    } else {
        (i_from..=i_to)
            .into_par_iter()
            .map(|m| -> Result<(u64, Vec<(u64, f64)>)> {
                let cols = interior_columns(m, k0, dense, grid.samples);
                let values = if dense && !cols.is_empty() {
                    cols.iter().copied().zip(phone_quotient_row(ah, bh, m, cols[0], *cols.last().unwrap())?).collect()
                } else {
                    cols.iter().map(|&k| Ok((k, crate::hurwitz::phone_quotient(ah, bh, m, k)?))).collect::<Result<Vec<_>>>()?
                };
                Ok((m, values))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let interior: Vec<f64> = rows.iter().flat_map(|(_, r)| r.iter().map(|&(_, q)| q - target)).collect();

    // boundary band
    let b_from = envelope.m0;
    let b_to = b_from + grid.span;
    let boundary: Vec<f64> = if b_to <= grid.exact_max_m {
        phone_quotient_grid(ah, bh, b_from, b_to)?.into_iter().flatten().map(|q| q - target).collect()
    } else {
        let runs = (0..=k0.min(b_from))
            .into_par_iter()
            .map(|k| -> Result<Vec<f64>> {
                let mut v = phone_quotient_run(ah, bh, k, b_from, grid.span + 1)?;
                v.extend(phone_quotient_run(bh, ah, k, b_from, grid.span + 1)?);
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        runs.into_iter().flatten().map(|q| q - target).collect()
    };

    let max_dev = interior.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let max_excess = interior.iter().copied().fold(f64::MIN, f64::max);
    let min_excess = interior.iter().chain(boundary.iter()).copied().fold(f64::MAX, f64::min);
    let eps = envelope.epsilon;
    Ok(EnvelopeCheck {
        envelope: envelope.clone(),
        interior_m: (i_from, i_to),
        interior_points: interior.len() as u64,
        interior_dense: dense,
        max_interior_deviation: max_dev,
        boundary_m: (b_from, b_to),
        boundary_points: boundary.len() as u64,
        min_excess,
        max_excess,
        lower_holds: min_excess > -eps - ENVELOPE_SLACK,
        upper_holds: max_excess < eps + ENVELOPE_SLACK,
        interior_holds: max_dev < eps + ENVELOPE_SLACK,
    })
}
