//! Stationarity of `tr S_{m,k}` on pairs of positive matrices with unit
//! Schatten p-norm, and a projected descent that searches for such points.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurwitz::{hurwitz_matrix, hurwitz_trace};
use crate::matrix::{check_dims, matrix_power, schatten_norm, spectral_norm, CMat, HermitianMatrix};
use crate::sampling::random_positive;

/// Allowed deviation of the p-norm from 1.
pub const UNIT_NORM_TOL: f64 = 1e-8;
/// Eigenvalues below `-POSITIVITY_TOL` disqualify a candidate.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Initial descent step length.
pub const INITIAL_STEP: f64 = 1e-2;
/// The step is never halved below this.
pub const MIN_STEP: f64 = 1e-10;
/// Fresh starts attempted after a projection collapses a matrix to zero.
pub const MAX_RESTARTS: u32 = 5;

/// A feasible point: positive `A`, `B` with `‖A‖_p = ‖B‖_p = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalCandidate {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub p: f64,
    pub m: u64,
    pub k: u64,
}

impl ExtremalCandidate {
    pub fn new(a: HermitianMatrix, b: HermitianMatrix, p: f64, m: u64, k: u64) -> Result<Self> {
        check_dims(&a, &b)?;
        check_exponent(p)?;
        if !(0 < k && k < m) {
            return Err(Error::Precondition(format!("need 0 < k < m, got m = {m}, k = {k}")));
        }
        for (name, x) in [("A", &a), ("B", &b)] {
            let bottom = *x.spectral().eigenvalues.last().unwrap();
            if bottom < -POSITIVITY_TOL {
                return Err(Error::Domain(format!("{name} has eigenvalue {bottom:e}")));
            }
            let norm = schatten_norm(x, p)?;
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Validation(format!("{name} has {p}-norm {norm}, expected 1")));
            }
        }
        Ok(Self { a, b, p, m, k })
    }

    /// The scalar point `A = B = n^{-1/p}·1`.
    pub fn scalar(n: usize, p: f64, m: u64, k: u64) -> Result<Self> {
        check_exponent(p)?;
        let c = (n as f64).powf(-1.0 / p);
        let x = HermitianMatrix::identity(n).scaled(c);
        Self::new(x.clone(), x, p, m, k)
    }

    pub fn trace(&self) -> Result<f64> {
        hurwitz_trace(&self.a, &self.b, self.m, self.k)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_infinite() {
        return Err(Error::Unsupported("p = ∞ is not differentiable at the constraint and is not handled".into()));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("exponent must satisfy 1 <= p < ∞, got {p}")));
    }
    Ok(())
}

/// Violations of the stationarity equations at a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ELResiduals {
    /// `‖[S_{m-1,k}, A]‖`
    pub commutator_a: f64,
    /// `‖S_{m-1,k}·A·tr A^p - A^p·tr(S_{m-1,k}A)‖`
    pub residual_a: f64,
    /// `‖[S_{m-1,k-1}, B]‖`
    pub commutator_b: f64,
    /// `‖S_{m-1,k-1}·B·tr B^p - B^p·tr(S_{m-1,k-1}B)‖`
    pub residual_b: f64,
    /// `‖S_{m,k} - ((m-k)A^p + kB^p)/m·tr S_{m,k}‖`
    pub cor_a2: f64,
}

impl ELResiduals {
    pub fn max(&self) -> f64 {
        [self.commutator_a, self.residual_a, self.commutator_b, self.residual_b, self.cor_a2]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// `‖S·X·tr X^p - X^p·tr(S X)‖` and `‖[S, X]‖`.
fn letter_residuals(s: &CMat, x: &HermitianMatrix, xp: &HermitianMatrix) -> (f64, f64) {
    let x = x.as_matrix();
    let sx = s * x;
    let commutator = spectral_norm(&(&sx - x * s));
    let residual = spectral_norm(&(sx.scale(xp.trace()) - xp.as_matrix() * sx.trace()));
    (commutator, residual)
}

pub fn el_residuals(c: &ExtremalCandidate) -> Result<ELResiduals> {
    check_exponent(c.p)?;
    let (a, b, m, k) = (&c.a, &c.b, c.m, c.k);
    let ap = matrix_power(a, c.p)?;
    let bp = matrix_power(b, c.p)?;
    let sa = hurwitz_matrix(a, b, m - 1, k)?;
    let sb = hurwitz_matrix(a, b, m - 1, k - 1)?;
    let s = hurwitz_matrix(a, b, m, k)?;
    let (commutator_a, residual_a) = letter_residuals(sa.as_matrix(), a, &ap);
    let (commutator_b, residual_b) = letter_residuals(sb.as_matrix(), b, &bp);
    let mixed = (ap.as_matrix().scale((m - k) as f64) + bp.as_matrix().scale(k as f64)).unscale(m as f64);
    let cor_a2 = spectral_norm(&(s.as_matrix() - mixed.scale(s.trace())));
    Ok(ELResiduals { commutator_a, residual_a, commutator_b, residual_b, cor_a2 })
}

/// Gradient pair `(m·S_{m-1,k}, m·S_{m-1,k-1})` of `tr S_{m,k}`.
fn gradient(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> Result<(CMat, CMat)> {
    let ga = hurwitz_matrix(a, b, m - 1, k)?.into_matrix().scale(m as f64);
    let gb = if k == 0 {
        CMat::zeros(a.dim(), a.dim())
    } else {
        hurwitz_matrix(a, b, m - 1, k - 1)?.into_matrix().scale(m as f64)
    };
    Ok((ga, gb))
}

/// Derivative of `tr S_{m,k}(A + tH_A, B + tH_B)` at `t = 0`.
pub fn directional_derivative(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    m: u64,
    k: u64,
    ha: &HermitianMatrix,
    hb: &HermitianMatrix,
) -> Result<f64> {
    check_dims(a, b)?;
    check_dims(a, ha)?;
    check_dims(a, hb)?;
    if m == 0 {
        return Ok(0.0);
    }
    let (ga, gb) = gradient(a, b, m, k)?;
    let d = (ha.as_matrix() * ga).trace() + (hb.as_matrix() * gb).trace();
    let scale = spectral_norm(ha.as_matrix()) + spectral_norm(hb.as_matrix());
    if d.im.abs() > 1e-9 * (d.re.abs() + scale).max(1.0) {
        return Err(Error::NumericalConsistency(format!("directional derivative has imaginary part {:e}", d.im)));
    }
    Ok(d.re)
}

fn frobenius_dot(x: &CMat, y: &CMat) -> f64 {
    x.iter().zip(y.iter()).map(|(u, v)| (u.conj() * v).re).sum()
}

/// Component of `g` tangent to `{tr X^p = 1}` at `x`.
fn tangent_part(g: &CMat, x: &HermitianMatrix, p: f64) -> Result<CMat> {
    let normal = matrix_power(x, p - 1.0)?.into_matrix();
    let nn = frobenius_dot(&normal, &normal);
    if nn == 0.0 {
        return Ok(g.clone());
    }
    Ok(g - normal.scale(frobenius_dot(&normal, g) / nn))
}

/// Clips eigenvalues at zero and rescales to unit p-norm; `None` when
/// nothing positive is left.
fn project(x: &CMat, p: f64) -> Option<HermitianMatrix> {
    let clipped = HermitianMatrix::hermitian_part(x).spectral().map(|v| v.max(0.0));
    let norm = schatten_norm(&clipped, p).ok()?;
    (norm > 0.0 && norm.is_finite()).then(|| clipped.scaled(1.0 / norm))
}

/// Result of one descent run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub candidate: ExtremalCandidate,
    pub residuals: ELResiduals,
    /// Accepted steps on the final start.
    pub iterations: u64,
    pub gradient_norm: f64,
    pub converged: bool,
    pub restarts: u32,
    pub seed: u64,
}

struct DescentSettings {
    m: u64,
    k: u64,
    p: f64,
    max_iters: u64,
    tol: f64,
}

enum Descent {
    Finished { a: HermitianMatrix, b: HermitianMatrix, iterations: u64, gradient_norm: f64, converged: bool },
    Collapsed,
}

fn descend(
    mut a: HermitianMatrix,
    mut b: HermitianMatrix,
    s: &DescentSettings,
    on_iterate: &mut dyn FnMut(&HermitianMatrix, &HermitianMatrix),
) -> Result<Descent> {
    let mut f = hurwitz_trace(&a, &b, s.m, s.k)?;
    let mut step = INITIAL_STEP;
    let mut iterations = 0;
    loop {
        let (ga, gb) = gradient(&a, &b, s.m, s.k)?;
        let (ta, tb) = (tangent_part(&ga, &a, s.p)?, tangent_part(&gb, &b, s.p)?);
        let gradient_norm = (ta.norm_squared() + tb.norm_squared()).sqrt();
        if gradient_norm < s.tol || iterations >= s.max_iters {
            let converged = gradient_norm < s.tol;
            return Ok(Descent::Finished { a, b, iterations, gradient_norm, converged });
        }
        loop {
            let scale = step / gradient_norm;
            let (Some(na), Some(nb)) = (
                project(&(a.as_matrix() - ta.scale(scale)), s.p),
                project(&(b.as_matrix() - tb.scale(scale)), s.p),
            ) else {
                return Ok(Descent::Collapsed);
            };
            let nf = hurwitz_trace(&na, &nb, s.m, s.k)?;
            if nf <= f {
                a = na;
                b = nb;
                f = nf;
                iterations += 1;
                on_iterate(&a, &b);
                break;
            }
            if step / 2.0 < MIN_STEP {
                return Ok(Descent::Finished { a, b, iterations, gradient_norm, converged: false });
            }
            step /= 2.0;
        }
    }
}

/// Projected descent on `tr S_{m,k}` from a seeded random start.
pub fn minimize_trace(n: usize, m: u64, k: u64, p: f64, seed: u64, max_iters: u64, tol: f64) -> Result<SearchOutcome> {
    minimize_trace_from(None, n, m, k, p, seed, max_iters, tol, &mut |_, _| {})
}

/// As [`minimize_trace`], optionally from a given feasible start, calling
/// `on_iterate` after every accepted step.
#[allow(clippy::too_many_arguments)]
pub fn minimize_trace_from(
    start: Option<&ExtremalCandidate>,
    n: usize,
    m: u64,
    k: u64,
    p: f64,
    seed: u64,
    max_iters: u64,
    tol: f64,
    on_iterate: &mut dyn FnMut(&HermitianMatrix, &HermitianMatrix),
) -> Result<SearchOutcome> {
    check_exponent(p)?;
    if n == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    if !(0 < k && k < m) {
        return Err(Error::Precondition(format!("need 0 < k < m, got m = {m}, k = {k}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(c) = start {
        if (c.a.dim(), c.m, c.k, c.p) != (n, m, k, p) {
            return Err(Error::Precondition("start point does not match (n, m, k, p)".into()));
        }
    }
    let settings = DescentSettings { m, k, p, max_iters, tol };
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for restart in 0..=MAX_RESTARTS {
        let (a, b) = match (restart, start) {
            (0, Some(c)) => (c.a.clone(), c.b.clone()),
            _ => {
                let a = project(random_positive(n, &mut rng).as_matrix(), p);
                let b = project(random_positive(n, &mut rng).as_matrix(), p);
                match a.zip(b) {
                    Some(pair) => pair,
                    None => continue,
                }
            }
        };
        if let Descent::Finished { a, b, iterations, gradient_norm, converged } = descend(a, b, &settings, on_iterate)? {
            let candidate = ExtremalCandidate::new(a, b, p, m, k)?;
            let residuals = el_residuals(&candidate)?;
            return Ok(SearchOutcome { candidate, residuals, iterations, gradient_norm, converged, restarts: restart, seed });
        }
    }
    Err(Error::SearchFailure(format!("projection collapsed on {} consecutive starts", MAX_RESTARTS + 1)))
}
