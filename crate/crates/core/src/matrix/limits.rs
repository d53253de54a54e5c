use serde::Serialize;

use super::{
    spectral_norm, CMat, HermitianMatrix, PhoneMatrix, CLUSTER_TOL, NEGATIVE_EIG_TOL,
};
use crate::error::{Error, Result};

/// `lim_{i→∞} M^i` for positive hermitian `M` with `‖M‖ ≤ 1`: the spectral
/// projector onto the eigenvalues within [`CLUSTER_TOL`] of 1.
pub fn power_limit(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let sd = m.spectral();
    let top = sd.eigenvalues[0];
    let bottom = *sd.eigenvalues.last().unwrap();
    if top > 1.0 + NEGATIVE_EIG_TOL {
        return Err(Error::Domain(format!(
            "power limit diverges: eigenvalue {top} exceeds 1"
        )));
    }
    if bottom < -NEGATIVE_EIG_TOL {
        return Err(Error::Domain(format!(
            "power limit needs a positive matrix, found eigenvalue {bottom:e}"
        )));
    }
    Ok(sd.projector(|x| (x - 1.0).abs() <= CLUSTER_TOL))
}

/// Dimension of the eigenspace of `m` for `lambda`, clustering eigenvalues
/// within [`CLUSTER_TOL`].
pub fn eigenspace_dim(m: &HermitianMatrix, lambda: f64) -> usize {
    m.spectral().count_within(lambda, CLUSTER_TOL)
}

/// `dim(I_1(A) ∩ I_1(B))`, read off as the kernel dimension of
/// `(1 - P_A) + (1 - P_B)`.
pub fn common_top_eigenspace_dim(a: &PhoneMatrix, b: &PhoneMatrix) -> Result<usize> {
    check_same_dim(a, b)?;
    let q = complement_sum(a, b)?;
    Ok(eigenspace_dim(&q, 0.0))
}

/// `(1 - P_A) + (1 - P_B)`, positive with kernel `I_1(A) ∩ I_1(B)`.
pub(crate) fn complement_sum(a: &PhoneMatrix, b: &PhoneMatrix) -> Result<HermitianMatrix> {
    let n = a.dim();
    let pa = power_limit(a)?;
    let pb = power_limit(b)?;
    let two = CMat::identity(n, n).scale(2.0);
    Ok(HermitianMatrix::hermitian_part(&(two - pa.as_matrix() - pb.as_matrix())))
}

/// The four equivalent vanishing conditions for a product of phone matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingTests {
    pub product_zero: bool,
    pub trace_zero: bool,
    pub trace_power_zero: bool,
    pub sandwich_zero: bool,
}

impl VanishingTests {
    pub fn all(&self) -> bool {
        self.product_zero && self.trace_zero && self.trace_power_zero && self.sandwich_zero
    }
}

const VANISHING_TOL: f64 = 1e-10;

/// Evaluates `AB = 0`, `tr AB = 0`, `tr (AB)^k = 0` and `ABA = 0`, each at
/// tolerance 1e-10. For phone matrices these always agree; disagreement means
/// the tolerance does not separate the input from zero.
pub fn vanishing_product_tests(a: &PhoneMatrix, b: &PhoneMatrix, k: u32) -> Result<VanishingTests> {
    check_same_dim(a, b)?;
    if k == 0 {
        return Err(Error::Precondition("vanishing tests need k >= 1".into()));
    }
    let ab = a.as_matrix() * b.as_matrix();
    let mut abk = ab.clone();
    for _ in 1..k {
        abk = &abk * &ab;
    }
    let aba = &ab * a.as_matrix();
    let tests = VanishingTests {
        product_zero: spectral_norm(&ab) <= VANISHING_TOL,
        trace_zero: ab.trace().norm() <= VANISHING_TOL,
        trace_power_zero: abk.trace().norm() <= VANISHING_TOL,
        sandwich_zero: spectral_norm(&aba) <= VANISHING_TOL,
    };
    let votes = [tests.product_zero, tests.trace_zero, tests.trace_power_zero, tests.sandwich_zero];
    if votes.iter().any(|&v| v != votes[0]) {
        return Err(Error::InternalConsistency(format!(
            "vanishing predicates disagree: {tests:?}"
        )));
    }
    Ok(tests)
}

pub fn check_same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Validation(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}
