use nalgebra::DMatrix;
use num_complex::Complex64;

use super::limits::{check_same_dim, complement_sum};
use super::{
    direct_sum, max_abs, spectral_norm, CMat, HermitianMatrix, PhoneMatrix, CLUSTER_TOL,
};
use crate::error::{Error, Result};

/// Largest allowed entrywise residual when reassembling a split.
const RECONSTRUCTION_TOL: f64 = 1e-8;
/// `tr(P_A B)` at or below this counts as zero.
pub(crate) const TRACE_ZERO_TOL: f64 = 1e-10;

/// Simultaneous block form `A = U (1_{n-l} ⊕ αA') U†`, `B = U (0_{n-l} ⊕ B') U†`.
#[derive(Clone, Debug)]
pub struct SplitDecomposition {
    pub basis: CMat,
    pub l: usize,
    pub alpha: f64,
    pub a_prime: PhoneMatrix,
    pub b_prime: PhoneMatrix,
}

impl SplitDecomposition {
    /// Rebuilds `(A, B)` from the blocks.
    pub fn reassemble(&self) -> (HermitianMatrix, HermitianMatrix) {
        let n = self.basis.nrows();
        let top = n - self.l;
        let a_blocks = direct_sum(&CMat::identity(top, top), &self.a_prime.as_matrix().scale(self.alpha));
        let b_blocks = direct_sum(&CMat::zeros(top, top), self.b_prime.as_matrix());
        let u = &self.basis;
        (
            HermitianMatrix::hermitian_part(&(u * a_blocks * u.adjoint())),
            HermitianMatrix::hermitian_part(&(u * b_blocks * u.adjoint())),
        )
    }
}

/// Splits off the top eigenspace of `A` when `tr(P_A B)` vanishes.
///
/// Returns `Ok(None)` when `tr(P_A B) > 1e-10`. The basis is the spectral
/// basis of `A` (equivalently of `P_A`) with the eigenvalue-1 vectors first.
pub fn split_on_power_limit(a: &PhoneMatrix, b: &PhoneMatrix) -> Result<Option<SplitDecomposition>> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let sd = a.spectral();
    let rank = sd.count_within(1.0, CLUSTER_TOL);
    let pa = sd.projector(|x| (x - 1.0).abs() <= CLUSTER_TOL);
    let trace = (pa.as_matrix() * b.as_matrix()).trace().re;
    if trace > TRACE_ZERO_TOL {
        return Ok(None);
    }
    if rank == n {
        return Err(Error::Structural("cannot split: power limit of A is the identity".into()));
    }
    if rank == 0 {
        return Err(Error::Structural("cannot split: A has no eigenvalue 1".into()));
    }
    let l = n - rank;
    let u = sd.basis.clone();
    let a_rot = u.adjoint() * a.as_matrix() * &u;
    let b_rot = u.adjoint() * b.as_matrix() * &u;
    let h = HermitianMatrix::hermitian_part(&lower_block(&a_rot, rank));
    let alpha = h.spectral().eigenvalues[0].max(0.0);
    let a_prime = if alpha > 0.0 {
        PhoneMatrix::normalize(&h)?
    } else {
        PhoneMatrix::new_unchecked(HermitianMatrix::identity(l))
    };
    let b_prime = PhoneMatrix::normalize(&HermitianMatrix::hermitian_part(&lower_block(&b_rot, rank)))
        .map_err(|e| Error::Structural(format!("lower block of B is not phone: {e}")))?;
    let split = SplitDecomposition { basis: u, l, alpha, a_prime, b_prime };
    let (a_re, b_re) = split.reassemble();
    let residual = max_abs(&(a_re.as_matrix() - a.as_matrix())).max(max_abs(&(b_re.as_matrix() - b.as_matrix())));
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::Structural(format!(
            "split does not reproduce the input (residual {residual:e}); tr(P_A B) = {trace:e} is not separated from zero"
        )));
    }
    Ok(Some(split))
}

/// Decomposition `A = U (A' ⊕ 1_l) U†`, `B = U (B' ⊕ 1_l) U†` with
/// `l = dim(I_1(A) ∩ I_1(B))` and `‖A'B'‖ < 1`.
#[derive(Clone, Debug)]
pub struct CommonTopSplit {
    pub basis: CMat,
    pub l: usize,
    /// `None` when `l = n`.
    pub a_prime: Option<HermitianMatrix>,
    pub b_prime: Option<HermitianMatrix>,
}

impl CommonTopSplit {
    pub fn reassemble(&self) -> (HermitianMatrix, HermitianMatrix) {
        let id = CMat::identity(self.l, self.l);
        let u = &self.basis;
        let build = |block: &Option<HermitianMatrix>| {
            let inner = match block {
                Some(m) => direct_sum(m.as_matrix(), &id),
                None => id.clone(),
            };
            HermitianMatrix::hermitian_part(&(u * inner * u.adjoint()))
        };
        (build(&self.a_prime), build(&self.b_prime))
    }
}

/// Splits off the common top eigenspace of two phone matrices.
pub fn decompose_common_top(a: &PhoneMatrix, b: &PhoneMatrix) -> Result<CommonTopSplit> {
    check_same_dim(a, b)?;
    let n = a.dim();
    let sd = complement_sum(a, b)?.spectral();
    let l = sd.count_within(0.0, CLUSTER_TOL);
    let rest = n - l;
    let u = sd.basis.clone();
    let (a_prime, b_prime) = if rest == 0 {
        (None, None)
    } else {
        let a_rot = u.adjoint() * a.as_matrix() * &u;
        let b_rot = u.adjoint() * b.as_matrix() * &u;
        let ap = HermitianMatrix::hermitian_part(&upper_block(&a_rot, rest));
        let bp = HermitianMatrix::hermitian_part(&upper_block(&b_rot, rest));
        let product = spectral_norm(&(ap.as_matrix() * bp.as_matrix()));
        if product >= 1.0 - TRACE_ZERO_TOL {
            return Err(Error::Structural(format!(
                "primed blocks still share a top direction: ‖A'B'‖ = {product}"
            )));
        }
        (Some(ap), Some(bp))
    };
    let split = CommonTopSplit { basis: u, l, a_prime, b_prime };
    let (a_re, b_re) = split.reassemble();
    let residual = max_abs(&(a_re.as_matrix() - a.as_matrix())).max(max_abs(&(b_re.as_matrix() - b.as_matrix())));
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::Structural(format!(
            "common-top split does not reproduce the input (residual {residual:e})"
        )));
    }
    Ok(split)
}

fn lower_block(m: &CMat, from: usize) -> CMat {
    let size = m.nrows() - from;
    DMatrix::<Complex64>::from(m.view((from, from), (size, size)))
}

fn upper_block(m: &CMat, size: usize) -> CMat {
    DMatrix::<Complex64>::from(m.view((0, 0), (size, size)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_phone, random_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phone(d: &[f64]) -> PhoneMatrix {
        PhoneMatrix::new(HermitianMatrix::from_real_diagonal(d)).unwrap()
    }

    #[test]
    fn already_block_diagonal() {
        let s = split_on_power_limit(&phone(&[1.0, 0.5]), &phone(&[0.0, 1.0])).unwrap().unwrap();
        assert_eq!(s.l, 1);
        assert!((s.alpha - 0.5).abs() < 1e-14);
        assert!((s.a_prime.as_matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((s.b_prime.as_matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_does_not_split() {
        let id = PhoneMatrix::new(HermitianMatrix::identity(3)).unwrap();
        assert!(split_on_power_limit(&id, &id).unwrap().is_none());
        let one = PhoneMatrix::new(HermitianMatrix::identity(1)).unwrap();
        assert!(split_on_power_limit(&one, &one).unwrap().is_none());
    }

    #[test]
    fn planted_split_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..25 {
            let n = rng.random_range(2..=5);
            let l = rng.random_range(1..n);
            let alpha = rng.random_range(0.05..0.95);
            let ap = random_phone(l, &mut rng);
            let bp = random_phone(l, &mut rng);
            let u = random_unitary(n, &mut rng);
            let a = HermitianMatrix::identity(n - l).direct_sum(&ap.scaled(alpha)).conjugated(&u.adjoint());
            let b = HermitianMatrix::zeros(n - l).direct_sum(&bp).conjugated(&u.adjoint());
            let (a, b) = (PhoneMatrix::new(a).unwrap(), PhoneMatrix::new(b).unwrap());
            let s = split_on_power_limit(&a, &b).unwrap().expect("planted split");
            assert_eq!(s.l, l);
            assert!((s.alpha - alpha).abs() < 1e-8);
            let (a_re, b_re) = s.reassemble();
            assert!(max_abs(&(a_re.as_matrix() - a.as_matrix())) < 1e-9);
            assert!(max_abs(&(b_re.as_matrix() - b.as_matrix())) < 1e-9);
        }
    }

    #[test]
    fn common_top_examples() {
        let id = PhoneMatrix::new(HermitianMatrix::identity(2)).unwrap();
        let s = decompose_common_top(&id, &id).unwrap();
        assert_eq!(s.l, 2);
        assert!(s.a_prime.is_none());

        let s = decompose_common_top(&phone(&[1.0, 0.3]), &phone(&[1.0, 0.6])).unwrap();
        assert_eq!(s.l, 1);
        assert!((s.a_prime.unwrap().as_matrix()[(0, 0)].re - 0.3).abs() < 1e-12);
        assert!((s.b_prime.unwrap().as_matrix()[(0, 0)].re - 0.6).abs() < 1e-12);
    }

    #[test]
    fn planted_common_top_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let n = rng.random_range(3..=5);
            let rest = n - 2;
            let ap = random_phone(rest, &mut rng).scaled(rng.random_range(0.2..1.0));
            let bp = random_phone(rest, &mut rng).scaled(rng.random_range(0.2..0.99));
            let u = random_unitary(n, &mut rng);
            let a = PhoneMatrix::new(ap.direct_sum(&HermitianMatrix::identity(2)).conjugated(&u)).unwrap();
            let b = PhoneMatrix::new(bp.direct_sum(&HermitianMatrix::identity(2)).conjugated(&u)).unwrap();
            let s = decompose_common_top(&a, &b).unwrap();
            assert_eq!(s.l, 2);
            let (x, y) = (s.a_prime.unwrap(), s.b_prime.unwrap());
            assert!(spectral_norm(&(x.as_matrix() * y.as_matrix())) < 1.0);
        }
    }
}
