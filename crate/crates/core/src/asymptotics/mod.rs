//! Quantitative large-`m` behavior of normalized Hurwitz traces: product
//! gaps against power limits, explicit positivity thresholds and the
//! two-sided envelope around `d/n`.

mod bounds;
mod certificate;
mod envelope;

pub use bounds::{
    lemma_4_1_gap, prop_4_2_check, prop_4_4_check, telescoping_residual, AlternationReport, ProductGap,
    ProjectedTraceReport, L_SEARCH_CAP,
};
pub use certificate::{
    m0_bound, positivity_scan, Branch, PositivityCertificate, PositivityScan, PositivityViolation, SplitStep,
    POSITIVE_Q_TOL, PRODUCT_ZERO_TOL, PROJECTED_TRACE_TOL, PROJECTOR_TOL, SCAN_RANGE_CAP,
};
pub use envelope::{
    check_envelope, theorem_4_5_envelope, EnvelopeCase, EnvelopeCheck, EnvelopeGrid, QuotientEnvelope, ENVELOPE_SLACK,
    K0_CAP,
};

use crate::error::Result;
use crate::matrix::{power_limit, spectral_norm, HermitianMatrix, PhoneMatrix};

/// Slack allowed on report verdicts.
pub const REPORT_SLACK: f64 = 1e-10;

/// `‖A - P_A‖`: the largest eigenvalue of `A` outside its top cluster.
pub(crate) fn a_minus_limit_norm(a: &PhoneMatrix) -> Result<f64> {
    let pa = power_limit(a)?;
    Ok(spectral_norm(&(a.as_matrix() - pa.as_matrix())))
}

/// `tr(P_A B)^k = Σ μ_i^k` over the eigenvalues of `P_A B P_A`.
pub(crate) fn projected_trace_power(a: &PhoneMatrix, b: &HermitianMatrix, k: u64) -> Result<f64> {
    let pa = power_limit(a)?;
    let sandwich = HermitianMatrix::hermitian_part(&(pa.as_matrix() * b.as_matrix() * pa.as_matrix()));
    Ok(sandwich.spectral().eigenvalues.iter().map(|&mu| mu.max(0.0).powf(k as f64)).sum())
}
