//! Self-check runner: every invariant of the toolkit evaluated on seeded
//! random instances, reported with its worst-case slack.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    check_envelope, lemma_4_1_gap, m0_bound, positivity_scan, prop_4_2_check, prop_4_4_check, telescoping_residual,
    theorem_4_5_envelope, EnvelopeGrid, REPORT_SLACK,
};
use crate::error::{Error, Result};
use crate::extremal::{directional_derivative, el_residuals, minimize_trace_from, ExtremalCandidate};
use crate::hurwitz::{
    binomial_f64, hurwitz_matrix, hurwitz_trace, hurwitz_trace_oracle, normalized_quotient, trace_coefficients_by_interpolation,
};
use crate::matrix::{
    decompose_common_top, matrix_power, max_abs, power_limit, schatten_norm, spectral_norm, split_on_power_limit,
    vanishing_product_tests, CMat, HermitianMatrix, PhoneMatrix,
};
use crate::sampling::{complex_gaussian, random_hermitian, random_phone, random_positive, random_unitary, Ensemble};
use crate::scan::{monotonicity_violations, scan_sample, OutputFormat, ScanConfig, DEFAULT_TOLERANCE};
use crate::words::{
    alternation_threshold, binomial, count_sparse_words, count_words_with_ab, enumerate_words, lemma_3_3_holds,
    lemma_3_4_holds,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            other => Err(Error::Validation(format!("unknown level {other:?} (expected quick or full)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub name: String,
    pub passed: bool,
    pub cases: u64,
    /// Smallest `tolerance - error` seen; 0 for exact checks.
    pub worst_slack: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub level: Level,
    pub results: Vec<InvariantResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            write!(f, "{} {:<28} cases={:<7} worst_slack={:e}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.cases, r.worst_slack)?;
            if let Some(why) = &r.first_failure {
                write!(f, "  first failure: {why}")?;
            }
            writeln!(f)?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        write!(f, "{} invariants, {} failed", self.results.len(), failed)
    }
}

/// Accumulates cases of one invariant.
struct Tally {
    name: &'static str,
    cases: u64,
    failures: u64,
    worst_slack: f64,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0, failures: 0, worst_slack: f64::INFINITY, first_failure: None }
    }

    /// Records `error <= tol`.
    fn within(&mut self, error: f64, tol: f64, context: impl FnOnce() -> String) {
        self.slack(tol - error, context);
    }

    fn slack(&mut self, slack: f64, context: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN slack is a failure
        let ok = slack >= 0.0;
        self.worst_slack = if slack.is_nan() { f64::NAN } else { self.worst_slack.min(slack) };
        if !ok {
            self.fail(context());
        }
    }

    fn exact(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.slack(if ok { 0.0 } else { -1.0 }, context);
    }

    fn fail(&mut self, why: String) {
        self.failures += 1;
        self.first_failure.get_or_insert(why);
    }

    fn outcome<T>(&mut self, r: Result<T>, context: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.cases += 1;
                self.fail(format!("{}: {e}", context()));
                None
            }
        }
    }

    fn finish(self) -> InvariantResult {
        InvariantResult {
            name: self.name.into(),
            passed: self.failures == 0 && self.cases > 0,
            cases: self.cases,
            worst_slack: if self.cases == 0 { 0.0 } else { self.worst_slack },
            first_failure: self.first_failure,
        }
    }
}

/// Natural size `n·‖A‖^{m-k}·‖B‖^k·C(m,k)` of `tr S_{m,k}`.
pub fn trace_scale(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> f64 {
    let na = spectral_norm(a.as_matrix());
    let nb = spectral_norm(b.as_matrix());
    a.dim() as f64 * na.powf((m - k.min(m)) as f64) * nb.powf(k as f64) * binomial_f64(m, k)
}

/// Trace function under test in [`oracle_triangle`].
pub type TraceFn = dyn Fn(&HermitianMatrix, &HermitianMatrix, u64, u64) -> Result<f64> + Sync;

/// Compares `trace` against word enumeration (1e-9 relative) and against
/// polynomial interpolation (1e-6 relative) on `pairs` random positive
/// pairs with `n <= n_max` and all `k <= m <= m_max`.
pub fn oracle_triangle(trace: &TraceFn, pairs: usize, n_max: usize, m_max: u64, seed: u64) -> InvariantResult {
    let mut t = Tally::new("oracle-triangle");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..pairs {
        let n = rng.random_range(1..=n_max);
        let a = random_positive(n, &mut rng);
        let b = random_positive(n, &mut rng);
        // interpolate on the unit-norm pair so no coefficient is swamped by another
        let (na, nb) = (spectral_norm(a.as_matrix()), spectral_norm(b.as_matrix()));
        let (ua, ub) = (a.scaled(1.0 / na), b.scaled(1.0 / nb));
        for m in 0..=m_max {
            let Some(interp) = t.outcome(trace_coefficients_by_interpolation(&ua, &ub, m), || format!("interpolation m={m}")) else {
                continue;
            };
            let interp: Vec<f64> =
                interp.iter().enumerate().map(|(k, c)| c * na.powi((m as usize - k) as i32) * nb.powi(k as i32)).collect();
            for k in 0..=m {
                let ctx = || format!("n={n} m={m} k={k}");
                let scale = trace_scale(&a, &b, m, k);
                let (Some(x), Some(o)) = (t.outcome(trace(&a, &b, m, k), ctx), t.outcome(hurwitz_trace_oracle(&a, &b, m, k), ctx)) else {
                    continue;
                };
                t.within((x - o).abs() / scale, 1e-9, || format!("recursion {x} vs enumeration {o} at {}", ctx()));
                t.within((x - interp[k as usize]).abs() / scale, 1e-6, || format!("recursion {x} vs interpolation {} at {}", interp[k as usize], ctx()));
                t.within((o - interp[k as usize]).abs() / scale, 1e-6, || format!("enumeration vs interpolation at {}", ctx()));
            }
        }
    }
    t.finish()
}

struct Sizes {
    full: bool,
    n_max: usize,
    m_max: u64,
    instances: usize,
}

fn word_partition(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("word-class-partition");
    let m_max = if s.full { 200 } else { 60 };
    for m in 0..=m_max {
        for k in 0..=m {
            let total: BigUint = (0..=k.min(m - k)).map(|s| count_words_with_ab(m, k, s)).sum();
            t.exact(total == binomial(m, k as i64), || format!("m={m} k={k}"));
        }
    }
    t.finish()
}

fn word_enumeration(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("word-enumeration");
    let m_max = if s.full { 14 } else { 10 };
    for m in 0..=m_max {
        for k in 0..=m {
            let Some(words) = t.outcome(enumerate_words(m, k), || format!("m={m} k={k}")) else { continue };
            let mut hist = vec![0u64; (m + 1) as usize];
            let mut sparse = vec![0u64; (m + 1) as usize];
            let mut structure_ok = true;
            for w in words {
                let s_count = w.count_ab_subwords();
                hist[s_count] += 1;
                let runs = w.a_runs();
                if s_count == k as usize {
                    // every b is preceded by at least one a
                    structure_ok &= runs[..k as usize].iter().all(|&r| r > 0);
                }
                for l in 1..=m as usize {
                    if runs[..k as usize].iter().all(|&r| r > l) && runs[k as usize] >= l {
                        sparse[l] += 1;
                    }
                }
            }
            t.exact(structure_ok, || format!("no-b² structure at m={m} k={k}"));
            for s_count in 0..=m {
                t.exact(BigUint::from(hist[s_count as usize]) == count_words_with_ab(m, k, s_count), || format!("histogram m={m} k={k} s={s_count}"));
            }
            for l in 1..=m {
                t.exact(BigUint::from(sparse[l as usize]) == count_sparse_words(m, k, l), || format!("sparse m={m} k={k} L={l}"));
            }
        }
    }
    t.finish()
}

fn binomial_tail_grid() -> InvariantResult {
    let mut t = Tally::new("binomial-tail-estimate");
    for eps in [0.1, 0.5, 0.9] {
        for l in 1..=40u64 {
            for k in 0..=40u64 {
                // least admissible m: (m - L)·ε >= L·k
                let m_min = l + (l as f64 * k as f64 / eps).ceil() as u64;
                let m_min = (m_min.saturating_sub(2)..=m_min + 2)
                    .find(|&m| lemma_3_3_holds(eps, l, m, k).is_ok())
                    .unwrap_or(m_min);
                for m in (m_min..=m_min + 40).step_by(4) {
                    if let Some(ok) = t.outcome(lemma_3_3_holds(eps, l, m, k), || format!("ε={eps} L={l} m={m} k={k}")) {
                        t.exact(ok, || format!("ε={eps} L={l} m={m} k={k}"));
                    }
                }
            }
        }
    }
    t.finish()
}

fn alternation_count_grid() -> InvariantResult {
    let mut t = Tally::new("alternation-count-estimate");
    for eps in [0.1, 0.5, 0.9] {
        for s_max in 1..=40u64 {
            let Some(m_min) = t.outcome(alternation_threshold(s_max, eps), || format!("threshold S={s_max}")) else { continue };
            for m in (m_min..=m_min + 40).step_by(8) {
                for k in (s_max..=40).chain([m / 2, m - s_max]) {
                    if k > m - s_max {
                        continue;
                    }
                    if let Some(ok) = t.outcome(lemma_3_4_holds(eps, s_max, m, k), || format!("ε={eps} S={s_max} m={m} k={k}")) {
                        t.exact(ok, || format!("ε={eps} S={s_max} m={m} k={k}"));
                    }
                }
            }
        }
    }
    t.finish()
}

fn power_limits(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("power-limit");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..s.instances {
        let n = rng.random_range(1..=s.n_max.max(2));
        let mm = random_phone(n, &mut rng);
        let Some(p) = t.outcome(power_limit(&mm), || "power limit".into()) else { continue };
        let (pm, mmat) = (p.as_matrix(), mm.as_matrix());
        t.within(max_abs(&(pm * pm - pm)), 1e-9, || "idempotence".into());
        t.within(max_abs(&(mmat * pm - pm)), 1e-9, || "absorption".into());
        let gap = spectral_norm(&(mmat - pm));
        t.within(gap, 1.0 - 1e-12, || format!("‖M - P‖ = {gap}"));
        let mut power = mmat.clone();
        for k in 1..=20 {
            if k > 1 {
                power = &power * mmat;
            }
            t.within((spectral_norm(&(&power - pm)) - gap.powi(k)).abs(), 1e-8, || format!("‖M^{k} - P‖ equality"));
        }
        let u = random_unitary(n, &mut rng);
        if let Some(pc) = t.outcome(power_limit(&mm.conjugated(&u)), || "conjugated limit".into()) {
            t.within(max_abs(&(pc.as_matrix() - u.adjoint() * pm * &u)), 1e-9, || "conjugation covariance".into());
        }
        let other = random_phone(rng.random_range(1..=2), &mut rng);
        let c = rng.random_range(0.2..1.0);
        for (factor, label) in [(1.0, "unit"), (c, "contracting")] {
            let sum = mm.direct_sum(&other.scaled(factor));
            let (Some(ps), Some(po)) = (
                t.outcome(power_limit(&sum), || "direct sum limit".into()),
                t.outcome(power_limit(&other.scaled(factor)), || "block limit".into()),
            ) else {
                continue;
            };
            let want = crate::matrix::direct_sum(pm, po.as_matrix());
            t.within(max_abs(&(ps.as_matrix() - want)), 1e-9, || format!("direct-sum compatibility ({label} block)"));
        }
    }
    t.finish()
}

fn norm_inequalities(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("norm-inequalities");
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..s.instances {
        let n = rng.random_range(2..=s.n_max.max(2));
        let a = random_phone(n, &mut rng);
        let b = random_phone(n, &mut rng);
        let (am, bm) = (a.as_matrix(), b.as_matrix());
        let powers: Vec<CMat> = (0..=10).scan(CMat::identity(n, n), |acc, i| {
            if i > 0 {
                *acc = &*acc * bm;
            }
            Some(acc.clone())
        })
        .collect();
        let norms: Vec<f64> = powers.iter().map(|p| spectral_norm(&(am * p * am))).collect();
        for i in 0..=10 {
            for j in 0..=i {
                t.within(norms[i] - norms[j], 1e-10, || format!("‖AB^{i}A‖ <= ‖AB^{j}A‖"));
            }
        }
        let rank = rng.random_range(1..n);
        let proj = HermitianMatrix::from_real_diagonal(&(0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect::<Vec<_>>())
            .conjugated(&random_unitary(n, &mut rng));
        for (label, x) in [("B", bm.clone()), ("P", proj.as_matrix().clone())] {
            let xax = spectral_norm(&(&x * am * &x));
            let ax2 = am * &x * &x;
            let mut power = ax2.clone();
            for k in 1..=8 {
                if k > 1 {
                    power = &power * &ax2;
                }
                let mid = spectral_norm(&power);
                t.within(xax.powi(k + 1) - mid, 1e-10, || format!("‖{label}A{label}‖^{} <= ‖(A{label}²)^{k}‖", k + 1));
                t.within(mid - xax.powi(k - 1), 1e-10, || format!("‖(A{label}²)^{k}‖ <= ‖{label}A{label}‖^{}", k - 1));
            }
        }
    }
    t.finish()
}

/// `A = U(A' ⊕ 0)U†`, `B = U(0 ⊕ B')U†` with random positive blocks.
pub fn orthogonal_pair<R: Rng + ?Sized>(n: usize, split: usize, rng: &mut R) -> (PhoneMatrix, PhoneMatrix) {
    let u = random_unitary(n, rng);
    let a = random_positive(split, rng).direct_sum(&HermitianMatrix::zeros(n - split));
    let b = HermitianMatrix::zeros(split).direct_sum(&random_positive(n - split, rng));
    (
        PhoneMatrix::normalize(&a.conjugated(&u)).expect("nonzero block"),
        PhoneMatrix::normalize(&b.conjugated(&u)).expect("nonzero block"),
    )
}

fn vanishing_and_splits(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("vanishing-and-splits");
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..s.instances {
        let n = rng.random_range(2..=s.n_max.max(3));
        let (a, b) = orthogonal_pair(n, rng.random_range(1..n), &mut rng);
        for k in 1..=3 {
            if let Some(v) = t.outcome(vanishing_product_tests(&a, &b, k), || "orthogonal pair".into()) {
                t.exact(v.all(), || format!("orthogonal pair not flagged at k={k}: {v:?}"));
            }
        }
        let (x, y) = (random_phone(n, &mut rng), random_phone(n, &mut rng));
        if let Some(v) = t.outcome(vanishing_product_tests(&x, &y, 2), || "random pair".into()) {
            t.exact(!v.product_zero, || "random pair flagged as vanishing".into());
        }

        // planted split: A = 1 ⊕ αA', B = 0 ⊕ B'
        let l = rng.random_range(1..n);
        let alpha = rng.random_range(0.1..0.9);
        let u = random_unitary(n, &mut rng);
        let ap = random_phone(l, &mut rng);
        let bp = random_phone(l, &mut rng);
        let a = PhoneMatrix::new(HermitianMatrix::identity(n - l).direct_sum(&ap.scaled(alpha)).conjugated(&u));
        let b = PhoneMatrix::new(HermitianMatrix::zeros(n - l).direct_sum(&bp).conjugated(&u));
        if let (Some(a), Some(b)) = (t.outcome(a, || "planted A".into()), t.outcome(b, || "planted B".into())) {
            match t.outcome(split_on_power_limit(&a, &b), || "split".into()) {
                Some(Some(split)) => {
                    let (ra, rb) = split.reassemble();
                    t.within(max_abs(&(ra.as_matrix() - a.as_matrix())).max(max_abs(&(rb.as_matrix() - b.as_matrix()))), 1e-9, || "split round trip".into());
                    t.within((split.alpha - alpha).abs(), 1e-9, || format!("α = {} vs planted {alpha}", split.alpha));
                    t.exact(split.l == l, || format!("l = {} vs planted {l}", split.l));
                }
                Some(None) => t.fail("planted split not found".into()),
                None => {}
            }
        }

        // planted common top space: A = 1_d ⊕ A'', B = 1_d ⊕ B'' with ‖A''B''‖ < 1
        let d = rng.random_range(1..n);
        let u = random_unitary(n, &mut rng);
        let a = HermitianMatrix::identity(d).direct_sum(&random_phone(n - d, &mut rng).scaled(0.8)).conjugated(&u);
        let b = HermitianMatrix::identity(d).direct_sum(&random_phone(n - d, &mut rng).scaled(0.9)).conjugated(&u);
        let (a, b) = (PhoneMatrix::new(a).unwrap(), PhoneMatrix::new(b).unwrap());
        if let Some(split) = t.outcome(decompose_common_top(&a, &b), || "common top split".into()) {
            t.exact(split.l == d, || format!("common top dimension {} vs planted {d}", split.l));
            let (ra, rb) = split.reassemble();
            t.within(max_abs(&(ra.as_matrix() - a.as_matrix())).max(max_abs(&(rb.as_matrix() - b.as_matrix()))), 1e-9, || "common top round trip".into());
        }
    }
    t.finish()
}

fn zero_branch(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("zero-branch");
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let m_max = if s.full { 12 } else { 8 };
    for _ in 0..10 {
        let n = rng.random_range(2..=s.n_max.max(2));
        let (a, b) = orthogonal_pair(n, rng.random_range(1..n), &mut rng);
        for m in 2..=m_max {
            for k in 1..m {
                if let Some(x) = t.outcome(hurwitz_trace(&a, &b, m, k), || format!("m={m} k={k}")) {
                    t.within(x.abs() / trace_scale(&a, &b, m, k), 1e-10, || format!("tr S_{{{m},{k}}} = {x}"));
                }
            }
        }
        t.exact(matches!(m0_bound(&a, &b, 1), Err(Error::Domain(_))), || "threshold not refused on AB = 0".into());
    }
    t.finish()
}

fn trace_identities(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("trace-identities");
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let m_max = if s.full { 12 } else { 8 };
    for _ in 0..s.instances {
        let n = rng.random_range(1..=s.n_max.max(2));
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let (c, d) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
        let (a1, b1) = (random_positive(n, &mut rng), random_positive(n, &mut rng));
        let (a2, b2) = (random_positive(1, &mut rng), random_positive(1, &mut rng));
        let (al, be) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (sa, sb) = (a1.direct_sum(&a2.scaled(al)), b1.direct_sum(&b2.scaled(be)));
        for m in 0..=m_max {
            for k in 0..=m {
                let scale = trace_scale(&a, &b, m, k);
                let Some(x) = t.outcome(hurwitz_trace(&a, &b, m, k), || format!("m={m} k={k}")) else { continue };
                if let Some(y) = t.outcome(hurwitz_trace(&b, &a, m, m - k), || "swap".into()) {
                    t.within((x - y).abs() / scale, 1e-10, || format!("letter swap m={m} k={k}"));
                }
                if let Some(y) = t.outcome(hurwitz_trace(&a.scaled(c), &b.scaled(d), m, k), || "scaled".into()) {
                    let f = c.powi((m - k) as i32) * d.powi(k as i32);
                    t.within((y - f * x).abs() / (f * scale), 1e-10, || format!("homogeneity m={m} k={k}"));
                }
                if let (Some(l), Some(r1), Some(r2)) = (
                    t.outcome(hurwitz_trace(&sa, &sb, m, k), || "direct sum".into()),
                    t.outcome(hurwitz_trace(&a1, &b1, m, k), || "block 1".into()),
                    t.outcome(hurwitz_trace(&a2, &b2, m, k), || "block 2".into()),
                ) {
                    let r = r1 + al.powi((m - k) as i32) * be.powi(k as i32) * r2;
                    t.within((l - r).abs() / trace_scale(&sa, &sb, m, k), 1e-10, || format!("direct sum m={m} k={k}"));
                }
                if 0 < k && k < m {
                    if let (Some(ma), Some(mb)) = (
                        t.outcome(hurwitz_matrix(&a, &b, m - 1, k), || "S_{m-1,k}".into()),
                        t.outcome(hurwitz_matrix(&a, &b, m - 1, k - 1), || "S_{m-1,k-1}".into()),
                    ) {
                        let ta = (a.as_matrix() * ma.as_matrix()).trace().re;
                        let tb = (b.as_matrix() * mb.as_matrix()).trace().re;
                        let sc = scale * m as f64;
                        t.within(((m - k) as f64 * x - m as f64 * ta).abs() / sc, 1e-10, || format!("first trace identity m={m} k={k}"));
                        t.within((k as f64 * x - m as f64 * tb).abs() / sc, 1e-10, || format!("second trace identity m={m} k={k}"));
                    }
                }
            }
        }
        let k = rng.random_range(1..=6);
        let nn = rng.random_range(1..=4);
        let xs: Vec<CMat> = (0..k).map(|_| complex_gaussian(nn, &mut rng)).collect();
        t.within(telescoping_residual(&xs, &complex_gaussian(nn, &mut rng)), 1e-10, || format!("telescoping k={k}"));
    }
    t.finish()
}

fn product_gaps(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("product-gap");
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..if s.full { 100 } else { 30 } {
        let n = rng.random_range(2..=3);
        let k = rng.random_range(1..=3);
        let l = rng.random_range(1..=6);
        let a = random_phone(n, &mut rng);
        let b = random_phone(n, &mut rng);
        let exps: Vec<u64> = (0..k).map(|_| rng.random_range(l..=l + 5)).collect();
        if let Some(g) = t.outcome(lemma_4_1_gap(&a, &b, &exps, l), || format!("L={l} exponents {exps:?}")) {
            t.slack(g.rhs + 1e-10 - g.lhs, || format!("lhs {} > rhs {}", g.lhs, g.rhs));
        }
    }
    t.finish()
}

fn quotient_estimates(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("quotient-estimates");
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..if s.full { 20 } else { 4 } {
        let n = rng.random_range(2..=s.n_max.max(2));
        let a = random_phone(n, &mut rng);
        let b = random_phone(n, &mut rng);
        for eps in [0.1, 0.3] {
            for k in 1..=3 {
                if let Some(r) = t.outcome(prop_4_2_check(&a, &b, k, eps), || format!("projected trace k={k} ε={eps}")) {
                    t.slack(r.slack + REPORT_SLACK, || format!("projected trace k={k} ε={eps}: {r:?}"));
                }
            }
        }
        for (s_max, eps) in [(2, 0.2), (3, 0.1)] {
            let Some(m) = t.outcome(alternation_threshold(s_max, eps), || "threshold".into()) else { continue };
            for k in [s_max, m / 3, m / 2, m - s_max] {
                if let Some(r) = t.outcome(prop_4_4_check(&a, &b, s_max, eps, m, k), || format!("alternation S={s_max} m={m} k={k}")) {
                    t.slack(r.slack + REPORT_SLACK, || format!("alternation S={s_max} m={m} k={k}: {r:?}"));
                }
            }
        }
    }
    t.finish()
}

fn positivity_certificates(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("positivity-certificate");
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let (n, pairs) = if s.full { (3, 20) } else { (2, 4) };
    for _ in 0..pairs {
        let a = random_phone(n, &mut rng).into_hermitian();
        let b = random_phone(n, &mut rng).into_hermitian();
        for k in 1..=3 {
            let Some(c) = t.outcome(m0_bound(&a, &b, k), || format!("threshold k={k}")) else { continue };
            t.exact(c.chain.len() < n && c.chain.iter().all(|st| st.alpha > 0.0 && st.alpha < 1.0), || "split chain".into());
            if let Some(scan) = t.outcome(positivity_scan(&a, &b, k, c.m0, c.m0 + 50), || format!("scan k={k} m0={}", c.m0)) {
                t.exact(scan.violations.is_empty(), || format!("k={k} m0={}: {:?}", c.m0, scan.violations));
            }
        }
    }
    t.finish()
}

fn envelopes(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("quotient-envelope");
    let (x, y) = (0.6, 0.7);
    let a = PhoneMatrix::new(HermitianMatrix::from_real_diagonal(&[1.0, x])).unwrap();
    let b = PhoneMatrix::new(HermitianMatrix::from_real_diagonal(&[1.0, y])).unwrap();
    for m in 0..=60u64 {
        for k in 0..=m {
            if let Some(q) = t.outcome(normalized_quotient(&a, &b, m, k), || format!("m={m} k={k}")) {
                let want = (1.0 + x.powi((m - k) as i32) * y.powi(k as i32)) / 2.0;
                t.within((q - want).abs(), 1e-12, || format!("closed form m={m} k={k}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let mut pairs = vec![(a, b)];
    for _ in 0..if s.full { 5 } else { 1 } {
        let n = rng.random_range(2..=s.n_max.max(2));
        pairs.push((random_phone(n, &mut rng), random_phone(n, &mut rng)));
    }
    let epsilons: &[f64] = if s.full { &[0.1, 0.2] } else { &[0.2] };
    for (a, b) in &pairs {
        for &eps in epsilons {
            let Some(env) = t.outcome(theorem_4_5_envelope(a, b, eps), || format!("envelope ε={eps}")) else { continue };
            if let Some(c) = t.outcome(check_envelope(a, b, &env, &EnvelopeGrid::default()), || format!("grid ε={eps}")) {
                t.slack(c.min_excess + eps + REPORT_SLACK, || format!("lower bound ε={eps}: {c:?}"));
                t.slack(eps + REPORT_SLACK - c.max_interior_deviation, || format!("interior ε={eps}: {c:?}"));
            }
        }
    }
    t.finish()
}

fn gradients(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("gradient-finite-difference");
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let h = 1e-5;
    for _ in 0..if s.full { 50 } else { 15 } {
        let n = rng.random_range(1..=s.n_max.max(2).min(3));
        let m = rng.random_range(1..=s.m_max.min(8));
        let k = rng.random_range(0..=m);
        let a = random_phone(n, &mut rng).into_hermitian();
        let b = random_phone(n, &mut rng).into_hermitian();
        let (ha, hb) = (random_hermitian(n, &mut rng), random_hermitian(n, &mut rng));
        let shift = |s: f64| {
            let a = HermitianMatrix::hermitian_part(&(a.as_matrix() + ha.as_matrix().scale(s)));
            let b = HermitianMatrix::hermitian_part(&(b.as_matrix() + hb.as_matrix().scale(s)));
            hurwitz_trace(&a, &b, m, k)
        };
        let (Some(fp), Some(fm), Some(d)) = (
            t.outcome(shift(h), || "shifted trace".into()),
            t.outcome(shift(-h), || "shifted trace".into()),
            t.outcome(directional_derivative(&a, &b, m, k, &ha, &hb), || "derivative".into()),
        ) else {
            continue;
        };
        let fd = (fp - fm) / (2.0 * h);
        t.within((d - fd).abs() / d.abs().max(1.0), 1e-5, || format!("m={m} k={k}: {d} vs {fd}"));
    }
    t.finish()
}

fn stationarity(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("stationarity");
    for p in [1.0, 2.0, 3.0] {
        for n in 1..=3 {
            if let Some(r) = t.outcome(ExtremalCandidate::scalar(n, p, 5, 2).and_then(|c| el_residuals(&c)), || format!("scalar p={p}")) {
                t.within(r.max(), 1e-12, || format!("scalar point n={n} p={p}: {r:?}"));
            }
        }
    }
    let (m, k, n, p) = (5, 2, 2, 2.0);
    for seed in 0..if s.full { 5 } else { 2 } {
        let mut feasibility: f64 = 0.0;
        let out = minimize_trace_from(None, n, m, k, p, seed, 10_000, 1e-8, &mut |a, b| {
            for x in [a, b] {
                let norm = schatten_norm(x, p).unwrap_or(f64::NAN);
                feasibility = feasibility.max((norm - 1.0).abs()).max(-x.spectral().eigenvalues[n - 1]);
            }
        });
        let Some(out) = t.outcome(out, || format!("descent seed {seed}")) else { continue };
        t.within(feasibility, 1e-8, || format!("feasibility seed {seed}"));
        let r = out.residuals;
        t.within(r.residual_a.max(r.residual_b), 1e-6, || format!("descent seed {seed}: {r:?}"));
        if out.gradient_norm < 1e-8 {
            t.within(r.max(), 1e-5, || format!("stationary candidate seed {seed}: {r:?}"));
        }
        let delta = r.residual_a.max(r.residual_b).max(r.commutator_a).max(r.commutator_b);
        t.within(r.cor_a2, 10.0 * binomial_f64(m, k) * n as f64 * delta + 1e-14, || format!("corollary seed {seed}"));
        let c = &out.candidate;
        if let (Some(a2), Some(s)) = (
            t.outcome(matrix_power(&c.a, 2.0), || "square".into()),
            t.outcome(hurwitz_matrix(&c.a, &c.b, m - 1, k), || "cell".into()),
        ) {
            let sa = s.as_matrix() * c.a.as_matrix();
            let explicit = spectral_norm(&(sa.scale(a2.trace()) - a2.as_matrix() * sa.trace()));
            t.within((explicit - r.residual_a).abs(), 1e-12, || "square exponent".into());
        }
    }
    t.finish()
}

fn scanning(s: &Sizes) -> InvariantResult {
    let mut t = Tally::new("scan-records");
    let planted = monotonicity_violations(&[1.0, 0.5, 0.6], 0, DEFAULT_TOLERANCE);
    t.exact(planted.len() == 1 && planted[0].index == 1 && (planted[0].gap - 0.1).abs() < 1e-15, || format!("planted rise: {planted:?}"));
    let config = ScanConfig {
        n: 3,
        k_list: vec![1, 2, 3],
        m_count: if s.full { 60 } else { 20 },
        samples: if s.full { 40 } else { 8 },
        master_seed: 7,
        ensemble: Ensemble::ComplexWishart,
        tolerance: DEFAULT_TOLERANCE,
        output_path: std::env::temp_dir().join("unused"),
        format: OutputFormat::Jsonl,
    };
    let sequential: Vec<_> = (0..config.samples).map(|i| scan_sample(&config, i)).collect();
    let parallel: Vec<_> = (0..config.samples).into_par_iter().map(|i| scan_sample(&config, i)).collect();
    for (i, (x, y)) in sequential.into_iter().zip(parallel).enumerate() {
        let (Some(x), Some(y)) = (t.outcome(x, || format!("sample {i}")), t.outcome(y, || format!("sample {i}"))) else { continue };
        t.exact(x == y, || format!("sample {i} differs between sequential and concurrent runs"));
        for r in &x {
            t.exact(spectral_norm(&(r.a.as_matrix() * r.b.as_matrix())) > 1e-10, || format!("sample {i} has AB = 0"));
            t.exact(r.violations == monotonicity_violations(&r.q_values, r.k, config.tolerance), || format!("sample {i} violations"));
        }
    }
    t.finish()
}

/// Runs every invariant group; groups run concurrently.
pub fn run_verification_suite(level: Level) -> VerificationReport {
    let full = level == Level::Full;
    let sizes = Sizes { full, n_max: if full { 3 } else { 2 }, m_max: if full { 10 } else { 8 }, instances: if full { 50 } else { 10 } };
    type Check = Box<dyn Fn(&Sizes) -> InvariantResult + Sync + Send>;
    let mut checks: Vec<Check> = vec![
        Box::new(|s| oracle_triangle(&hurwitz_trace, if s.full { 20 } else { 6 }, s.n_max, s.m_max, 100)),
        Box::new(word_partition),
        Box::new(word_enumeration),
        Box::new(power_limits),
        Box::new(norm_inequalities),
        Box::new(vanishing_and_splits),
        Box::new(zero_branch),
        Box::new(trace_identities),
        Box::new(product_gaps),
        Box::new(quotient_estimates),
        Box::new(positivity_certificates),
        Box::new(envelopes),
        Box::new(gradients),
        Box::new(stationarity),
        Box::new(scanning),
    ];
    if full {
        checks.push(Box::new(|_| binomial_tail_grid()));
        checks.push(Box::new(|_| alternation_count_grid()));
    }
    let results = checks.par_iter().map(|c| c(&sizes)).collect();
    VerificationReport { level, results }
}
