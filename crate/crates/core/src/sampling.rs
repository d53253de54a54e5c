//! Reproducible random positive matrices.
//!
//! Every draw is a pure function of `(sub_seed, stream, position)`: the
//! generator is ChaCha20 keyed by the sub-seed, with a separate stream per
//! matrix, so no global RNG state exists.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{CMat, HermitianMatrix, PhoneMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    #[default]
    ComplexWishart,
    RealWishart,
    Diagonal,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "complex-wishart" => Ok(Ensemble::ComplexWishart),
            "real-wishart" => Ok(Ensemble::RealWishart),
            "diagonal" => Ok(Ensemble::Diagonal),
            other => Err(Error::Validation(format!(
                "unknown ensemble {other:?} (expected complex-wishart, real-wishart or diagonal)"
            ))),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::ComplexWishart => "complex-wishart",
            Ensemble::RealWishart => "real-wishart",
            Ensemble::Diagonal => "diagonal",
        })
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-sample seed derived from the master seed and the sample index.
pub fn sub_seed(master_seed: u64, sample_index: u64) -> u64 {
    mix64(mix64(master_seed ^ 0x9e37_79b9_7f4a_7c15).wrapping_add(sample_index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

fn stream_rng(sub_seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(sub_seed);
    rng.set_stream(stream);
    rng
}

/// Phone matrix drawn from `ensemble` on stream 0 of `sub_seed`.
pub fn sample_positive(n: usize, ensemble: Ensemble, sub_seed: u64) -> HermitianMatrix {
    sample_on_stream(n, ensemble, sub_seed, 0).into_hermitian()
}

/// The `attempt`-th candidate pair for a sample: streams `2·attempt` and `2·attempt + 1`.
pub fn sample_pair(n: usize, ensemble: Ensemble, sub_seed: u64, attempt: u64) -> (PhoneMatrix, PhoneMatrix) {
    (
        sample_on_stream(n, ensemble, sub_seed, 2 * attempt),
        sample_on_stream(n, ensemble, sub_seed, 2 * attempt + 1),
    )
}

fn sample_on_stream(n: usize, ensemble: Ensemble, sub_seed: u64, stream: u64) -> PhoneMatrix {
    assert!(n > 0, "dimension must be positive");
    let mut rng = stream_rng(sub_seed, stream);
    let m = match ensemble {
        Ensemble::ComplexWishart => wishart(&complex_gaussian(n, &mut rng)),
        Ensemble::RealWishart => wishart(&real_gaussian(n, &mut rng)),
        Ensemble::Diagonal => {
            let d: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            HermitianMatrix::from_real_diagonal(&d)
        }
    };
    match PhoneMatrix::normalize(&m) {
        Ok(p) => p,
        // all-zero draw: probability zero for the continuous ensembles
        Err(_) => PhoneMatrix::new_unchecked(HermitianMatrix::identity(n)),
    }
}

fn wishart(g: &CMat) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&(g.adjoint() * g))
}

/// Matrix of independent standard complex Gaussians (`E|z|² = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = Complex64::new(re * s, im * s);
        }
    }
    m
}

fn real_gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            m[(i, j)] = Complex64::new(re, 0.0);
        }
    }
    m
}

/// Hermitian matrix `(G + G†)/2` with complex Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    HermitianMatrix::hermitian_part(&complex_gaussian(n, rng))
}

/// Unnormalized complex Wishart matrix `G†G`.
pub fn random_positive<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianMatrix {
    wishart(&complex_gaussian(n, rng))
}

pub fn random_phone<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhoneMatrix {
    PhoneMatrix::normalize(&random_positive(n, rng)).expect("wishart draw is nonzero")
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let qr = complex_gaussian(n, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..n {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q.column_mut(c).iter_mut().for_each(|z| *z *= phase);
    }
    q
}
