//! End-to-end acceptance criteria. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line; exits nonzero on any FAIL.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hurwitz_core::asymptotics::{
    check_envelope, lemma_4_1_gap, m0_bound, positivity_scan, prop_4_2_check, prop_4_4_check, telescoping_residual,
    theorem_4_5_envelope, EnvelopeGrid,
};
use hurwitz_core::extremal::{directional_derivative, el_residuals, minimize_trace, ExtremalCandidate};
use hurwitz_core::hurwitz::{hurwitz_matrix, hurwitz_trace, normalized_quotient};
use hurwitz_core::matrix::{
    decompose_common_top, power_limit, split_on_power_limit, vanishing_product_tests, CMat, HermitianMatrix, PhoneMatrix,
};
use hurwitz_core::sampling::{
    complex_gaussian, random_hermitian, random_phone, random_positive, random_unitary, sample_pair, sub_seed, Ensemble,
};
use hurwitz_core::scan::monotonicity_violations;
use hurwitz_core::words::{alternation_threshold, count_words_with_ab, enumerate_words};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn norm2(m: &CMat) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn scale_of(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> f64 {
    let c = binomial_f64(m, k);
    a.dim() as f64 * norm2(a.as_matrix()).powi((m - k) as i32) * norm2(b.as_matrix()).powi(k as i32) * c
}

fn binomial_f64(m: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

fn binomial_big(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::from(0u32);
    }
    (0..k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(m - i) / BigUint::from(i + 1))
}

/// `tr S_{m,k}` as the sum over all bit patterns with `k` ones of the
/// left-to-right product.
fn word_sum_trace(a: &CMat, b: &CMat, m: u64, k: u64) -> f64 {
    let n = a.nrows();
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as u64 != k {
            continue;
        }
        let mut p = CMat::identity(n, n);
        for i in 0..m {
            p = if mask >> i & 1 == 1 { p * b } else { p * a };
        }
        total += p.trace();
    }
    total.re
}

/// Coefficients of `t ↦ tr(A + tB)^m` from Chebyshev nodes on [-1, 1].
fn chebyshev_coefficients(a: &CMat, b: &CMat, m: u64) -> Vec<f64> {
    let d = m as usize + 1;
    let nodes: Vec<f64> = (0..d).map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / d as f64).cos()).collect();
    let v = DMatrix::<f64>::from_fn(d, d, |i, j| nodes[i].powi(j as i32));
    let y = nalgebra::DVector::<f64>::from_fn(d, |i, _| {
        let x = a + b.scale(nodes[i]);
        let mut p = CMat::identity(a.nrows(), a.nrows());
        for _ in 0..m {
            p = &p * &x;
        }
        p.trace().re
    });
    v.lu().solve(&y).expect("chebyshev vandermonde is invertible").iter().copied().collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_enum, mut worst_interp): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let n = rng.random_range(2..=3);
        let a = random_positive(n, &mut rng);
        let b = random_positive(n, &mut rng);
        let (na, nb) = (norm2(a.as_matrix()), norm2(b.as_matrix()));
        for m in 0..=10u64 {
            let coeffs = chebyshev_coefficients(&a.as_matrix().unscale(na), &b.as_matrix().unscale(nb), m);
            for k in 0..=m {
                let scale = scale_of(&a, &b, m, k);
                let t = hurwitz_trace(&a, &b, m, k).map_err(|e| e.to_string())?;
                let w = word_sum_trace(a.as_matrix(), b.as_matrix(), m, k);
                let c = coeffs[k as usize] * na.powi((m - k) as i32) * nb.powi(k as i32);
                worst_enum = worst_enum.max((t - w).abs() / scale);
                worst_interp = worst_interp.max((t - c).abs() / scale);
            }
        }
    }
    ensure!(worst_enum <= 1e-9, "recursion vs enumeration {worst_enum:e}");
    ensure!(worst_interp <= 1e-6, "recursion vs interpolation {worst_interp:e}");
    ensure!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
    Ok(format!("max rel error: enumeration {worst_enum:.1e}, interpolation {worst_interp:.1e}"))
}

fn criterion_2() -> Outcome {
    for m in 0..=200u64 {
        for k in 0..=m {
            let total: BigUint = (0..=k.min(m - k)).map(|s| count_words_with_ab(m, k, s)).sum();
            ensure!(total == binomial_big(m, k), "partition fails at m={m} k={k}");
        }
    }
    let mut words = 0u64;
    for m in 0..=14u64 {
        for k in 0..=m {
            let mut hist = vec![0u64; m as usize + 1];
            for w in enumerate_words(m, k).map_err(|e| e.to_string())? {
                ensure!(w.count_b() as u64 == k, "word {w} has the wrong number of b");
                hist[w.count_ab_subwords()] += 1;
                words += 1;
            }
            for (s, &h) in hist.iter().enumerate() {
                let s = s as u64;
                let formula = binomial_big(m - k, s) * binomial_big(k, s);
                ensure!(BigUint::from(h) == formula, "histogram m={m} k={k} s={s}: {h} vs {formula}");
                ensure!(count_words_with_ab(m, k, s) == formula, "count m={m} k={k} s={s}");
            }
        }
    }
    Ok(format!("partition exact for m <= 200; {words} enumerated words match for m <= 14"))
}

fn orthogonal_pair(n: usize, split: usize, rng: &mut ChaCha8Rng) -> (HermitianMatrix, HermitianMatrix) {
    let u = random_unitary(n, rng);
    let a = random_positive(split, rng).direct_sum(&HermitianMatrix::zeros(n - split));
    let b = HermitianMatrix::zeros(split).direct_sum(&random_positive(n - split, rng));
    (a.conjugated(&u), b.conjugated(&u))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let n = 2 + i % 3;
        let (a, b) = orthogonal_pair(n, 1 + i % (n - 1), &mut rng);
        ensure!(norm2(&(a.as_matrix() * b.as_matrix())) < 1e-12, "construction has AB ≠ 0");
        for m in 2..=12 {
            for k in 1..m {
                let t = hurwitz_trace(&a, &b, m, k).map_err(|e| e.to_string())?;
                worst = worst.max(t.abs() / scale_of(&a, &b, m, k));
            }
        }
    }
    ensure!(worst <= 1e-10, "largest relative trace {worst:e}");
    Ok(format!("largest relative |tr S| {worst:.1e}"))
}

fn criterion_4() -> Outcome {
    let (mut optimal, mut total, mut largest_m0) = (0, 0, 0);
    let mut late = Vec::new();
    for sample in 0..20 {
        let (a, b) = sample_pair(3, Ensemble::ComplexWishart, sub_seed(4, sample), 0);
        for k in 1..=3 {
            let c = m0_bound(&a, &b, k).map_err(|e| e.to_string())?;
            let scan = positivity_scan(&a, &b, k, c.m0, c.m0 + 50).map_err(|e| e.to_string())?;
            ensure!(scan.violations.is_empty(), "sample {sample} k={k}: violations {:?}", scan.violations);
            let from_k = positivity_scan(&a, &b, k, 0, k + 5).map_err(|e| e.to_string())?;
            total += 1;
            largest_m0 = largest_m0.max(c.m0);
            if from_k.first_positive_m == Some(k) {
                optimal += 1;
            } else {
                late.push((sample, k, from_k.first_positive_m));
            }
        }
    }
    Ok(format!("0 violations on [m0, m0+50] (largest m0 {largest_m0}); first positive m = k on {optimal}/{total}, others {late:?}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.random_range(2..=3);
        let k = rng.random_range(1..=3);
        let l = rng.random_range(1..=6);
        let a = random_phone(n, &mut rng);
        let b = random_phone(n, &mut rng);
        let exps: Vec<u64> = (0..k).map(|_| rng.random_range(l..=l + 5)).collect();
        let g = lemma_4_1_gap(&a, &b, &exps, l).map_err(|e| e.to_string())?;
        worst = worst.min(g.rhs - g.lhs);
        ensure!(g.holds(1e-10), "product gap {g:?} for exponents {exps:?}, L={l}");
    }
    let mut checks = 0;
    for _ in 0..20 {
        let n = rng.random_range(2..=3);
        let a = random_phone(n, &mut rng);
        let b = random_phone(n, &mut rng);
        for eps in [0.1, 0.3] {
            for k in 1..=3 {
                let r = prop_4_2_check(&a, &b, k, eps).map_err(|e| e.to_string())?;
                ensure!(r.holds && r.slack >= -1e-10, "projected trace {r:?}");
                worst = worst.min(r.slack);
                checks += 1;
            }
        }
        for (s, eps) in [(2, 0.2), (3, 0.1)] {
            let m = alternation_threshold(s, eps).map_err(|e| e.to_string())?;
            for k in [s, m / 4, m / 2, m - s] {
                let r = prop_4_4_check(&a, &b, s, eps, m, k).map_err(|e| e.to_string())?;
                ensure!(r.holds && r.slack >= -1e-10, "alternation bound {r:?}");
                worst = worst.min(r.slack);
                checks += 1;
            }
        }
    }
    Ok(format!("100 product gaps and {checks} quotient estimates hold; smallest slack {worst:.1e}"))
}

fn criterion_6() -> Outcome {
    let (x, y) = (0.6f64, 0.7f64);
    let a = PhoneMatrix::new(HermitianMatrix::from_real_diagonal(&[1.0, x])).map_err(|e| e.to_string())?;
    let b = PhoneMatrix::new(HermitianMatrix::from_real_diagonal(&[1.0, y])).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for m in 0..=60u64 {
        for k in 0..=m {
            let q = normalized_quotient(&a, &b, m, k).map_err(|e| e.to_string())?;
            worst = worst.max((q - (1.0 + x.powi((m - k) as i32) * y.powi(k as i32)) / 2.0).abs());
        }
    }
    ensure!(worst <= 1e-12, "closed form deviation {worst:e}");
    let env = theorem_4_5_envelope(&a, &b, 0.1).map_err(|e| e.to_string())?;
    let check = check_envelope(&a, &b, &env, &EnvelopeGrid::default()).map_err(|e| e.to_string())?;
    ensure!(check.lower_holds && check.upper_holds && check.interior_holds, "diagonal envelope {check:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut found, mut worst_dev, mut dense) = (0, 0.0f64, 0);
    while found < 10 {
        let a = random_phone(3, &mut rng);
        let b = random_phone(3, &mut rng);
        let env = theorem_4_5_envelope(&a, &b, 0.2).map_err(|e| e.to_string())?;
        if env.d != 0 {
            continue;
        }
        found += 1;
        let check = check_envelope(&a, &b, &env, &EnvelopeGrid::default()).map_err(|e| e.to_string())?;
        ensure!(check.max_interior_deviation < 0.2 + 1e-10, "interior |q| = {} for k0={}", check.max_interior_deviation, env.k0);
        ensure!(check.lower_holds, "lower bound {check:?}");
        worst_dev = worst_dev.max(check.max_interior_deviation);
        dense += usize::from(check.interior_dense);
    }
    Ok(format!("closed form within {worst:.1e}; diagonal envelope holds; 10 random pairs max interior |q| {worst_dev:.2e} ({dense} dense grids)"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: [f64; 5] = [0.0; 5];
    for _ in 0..50 {
        let n = rng.random_range(1..=4);
        let a = random_hermitian(n, &mut rng);
        let b = random_hermitian(n, &mut rng);
        let (c, d): (f64, f64) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
        let n1 = rng.random_range(1..=3);
        let (a1, b1) = (random_positive(n1, &mut rng), random_positive(n1, &mut rng));
        let (a2, b2) = (random_positive(1, &mut rng), random_positive(1, &mut rng));
        let (al, be) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let (sa, sb) = (a1.direct_sum(&a2.scaled(al)), b1.direct_sum(&b2.scaled(be)));
        let tr = |x: &HermitianMatrix, y: &HermitianMatrix, m, k| hurwitz_trace(x, y, m, k).map_err(|e| e.to_string());
        for m in 0..=12u64 {
            for k in 0..=m {
                let scale = scale_of(&a, &b, m, k);
                let t = tr(&a, &b, m, k)?;
                let rhs = tr(&a1, &b1, m, k)? + al.powi((m - k) as i32) * be.powi(k as i32) * tr(&a2, &b2, m, k)?;
                worst[0] = worst[0].max((tr(&sa, &sb, m, k)? - rhs).abs() / scale_of(&sa, &sb, m, k));
                if 0 < k && k < m {
                    let s1 = hurwitz_matrix(&a, &b, m - 1, k).map_err(|e| e.to_string())?;
                    let s2 = hurwitz_matrix(&a, &b, m - 1, k - 1).map_err(|e| e.to_string())?;
                    let ta = (a.as_matrix() * s1.as_matrix()).trace().re;
                    let tb = (b.as_matrix() * s2.as_matrix()).trace().re;
                    let e1 = ((m - k) as f64 * t - m as f64 * ta).abs();
                    let e2 = (k as f64 * t - m as f64 * tb).abs();
                    worst[1] = worst[1].max(e1.max(e2) / (m as f64 * scale));
                }
                worst[2] = worst[2].max((t - tr(&b, &a, m, m - k)?).abs() / scale);
                let f = c.powi((m - k) as i32) * d.powi(k as i32);
                worst[3] = worst[3].max((tr(&a.scaled(c), &b.scaled(d), m, k)? - f * t).abs() / (f * scale));
            }
        }
        let kk = rng.random_range(1..=6);
        let xs: Vec<CMat> = (0..kk).map(|_| complex_gaussian(n, &mut rng)).collect();
        worst[4] = worst[4].max(telescoping_residual(&xs, &complex_gaussian(n, &mut rng)));
    }
    let names = ["direct sum", "trace identities", "letter swap", "homogeneity", "telescoping"];
    for (name, w) in names.iter().zip(worst) {
        ensure!(w <= 1e-10, "{name}: {w:e}");
    }
    Ok(names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.0e}")).collect::<Vec<_>>().join(", "))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-5;
    let mut worst_fd: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=8);
        let k = rng.random_range(0..=m);
        let a = random_phone(n, &mut rng).into_hermitian();
        let b = random_phone(n, &mut rng).into_hermitian();
        let (ha, hb) = (random_hermitian(n, &mut rng), random_hermitian(n, &mut rng));
        let at = |t: f64| {
            let x = HermitianMatrix::new(a.as_matrix() + ha.as_matrix().scale(t)).unwrap();
            let y = HermitianMatrix::new(b.as_matrix() + hb.as_matrix().scale(t)).unwrap();
            hurwitz_trace(&x, &y, m, k).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        let d = directional_derivative(&a, &b, m, k, &ha, &hb).map_err(|e| e.to_string())?;
        worst_fd = worst_fd.max((d - fd).abs() / d.abs().max(1.0));
    }
    ensure!(worst_fd <= 1e-5, "finite differences {worst_fd:e}");
    let mut worst_search: f64 = 0.0;
    for seed in 0..5 {
        let out = minimize_trace(2, 5, 2, 2.0, seed, 10_000, 1e-8).map_err(|e| e.to_string())?;
        ensure!(out.iterations <= 10_000, "iterations {}", out.iterations);
        worst_search = worst_search.max(out.residuals.residual_a).max(out.residuals.residual_b);
    }
    ensure!(worst_search <= 1e-6, "descent residual {worst_search:e}");
    let mut worst_scalar: f64 = 0.0;
    for p in [1.0, 2.0, 3.0] {
        for n in 1..=4 {
            let c = ExtremalCandidate::scalar(n, p, 5, 2).map_err(|e| e.to_string())?;
            worst_scalar = worst_scalar.max(el_residuals(&c).map_err(|e| e.to_string())?.max());
        }
    }
    ensure!(worst_scalar <= 1e-12, "scalar point residual {worst_scalar:e}");
    Ok(format!("gradient {worst_fd:.1e}, descent residuals {worst_search:.1e}, scalar point {worst_scalar:.1e}"))
}

fn criterion_9() -> Outcome {
    let planted = monotonicity_violations(&[1.0, 0.5, 0.6], 0, 1e-9);
    ensure!(planted.len() == 1 && planted[0].index == 1 && (planted[0].gap - 0.1).abs() < 1e-15, "planted detector {planted:?}");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bodies = Vec::new();
    let mut summary = String::new();
    let mut elapsed = Duration::ZERO;
    for run in 0..2 {
        let out_path = dir.path().join(format!("scan{run}.jsonl"));
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_hurwitz"))
            .args(["scan", "--n", "3", "--k-list", "1,2,3", "--m-count", "60", "--samples", "100", "--seed", "42", "--out"])
            .arg(&out_path)
            .output()
            .map_err(|e| e.to_string())?;
        elapsed = elapsed.max(start.elapsed());
        ensure!(out.status.success(), "scan failed: {}", String::from_utf8_lossy(&out.stderr));
        summary = String::from_utf8_lossy(&out.stdout).split_whitespace().collect::<Vec<_>>().join(" ");
        let text = std::fs::read_to_string(&out_path).map_err(|e| e.to_string())?;
        bodies.push(text.lines().skip(1).map(str::to_owned).collect::<Vec<_>>());
    }
    ensure!(bodies[0] == bodies[1], "two scans differ");
    ensure!(bodies[0].len() == 301, "expected 300 records and a summary, got {} lines", bodies[0].len());
    ensure!(elapsed < Duration::from_secs(600), "scan took {elapsed:?}");
    Ok(format!("byte-identical, slowest run {:.1} s, summary {summary}", elapsed.as_secs_f64()))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for i in 0..50 {
        let n = rng.random_range(2..=4);
        let mm = random_phone(n, &mut rng);
        let p = power_limit(&mm).map_err(|e| e.to_string())?;
        let (pm, m) = (p.as_matrix(), mm.as_matrix());
        let gap = norm2(&(m - pm));
        let mut power = m.clone();
        for k in 1..=20 {
            if k > 1 {
                power = &power * m;
            }
            let d = (norm2(&(&power - pm)) - gap.powi(k)).abs();
            ensure!(d <= 1e-8, "instance {i}: ‖M^{k} - P‖ differs from ‖M - P‖^{k} by {d:e}");
        }

        let a = random_phone(n, &mut rng);
        let b = random_phone(n, &mut rng);
        let (am, bm) = (a.as_matrix(), b.as_matrix());
        let mut bp = vec![CMat::identity(n, n)];
        for j in 1..=10 {
            bp.push(&bp[j - 1] * bm);
        }
        let sandwiches: Vec<f64> = bp.iter().map(|x| norm2(&(am * x * am))).collect();
        for i2 in 0..=10 {
            for j in 0..=i2 {
                ensure!(sandwiches[i2] <= sandwiches[j] + 1e-10, "instance {i}: ‖AB^{i2}A‖ > ‖AB^{j}A‖");
            }
        }
        let rank = rng.random_range(1..n);
        let proj = HermitianMatrix::from_real_diagonal(&(0..n).map(|r| if r < rank { 1.0 } else { 0.0 }).collect::<Vec<_>>())
            .conjugated(&random_unitary(n, &mut rng));
        for x in [bm.clone(), proj.as_matrix().clone()] {
            let xax = norm2(&(&x * am * &x));
            let ax2 = am * &x * &x;
            let mut pw = ax2.clone();
            for k in 1..=8 {
                if k > 1 {
                    pw = &pw * &ax2;
                }
                let mid = norm2(&pw);
                ensure!(xax.powi(k + 1) <= mid + 1e-10 && mid <= xax.powi(k - 1) + 1e-10, "instance {i}: sandwich at k={k}");
            }
        }

        let (oa, ob) = orthogonal_pair(n, rank, &mut rng);
        let (oa, ob) = (PhoneMatrix::normalize(&oa).unwrap(), PhoneMatrix::normalize(&ob).unwrap());
        for (x, y, zero) in [(&oa, &ob, true), (&a, &b, false)] {
            let t = vanishing_product_tests(x, y, 3).map_err(|e| e.to_string())?;
            let xy = x.as_matrix() * y.as_matrix();
            let local = [norm2(&xy) <= 1e-10, xy.trace().norm() <= 1e-10, (&xy * &xy * &xy).trace().norm() <= 1e-10, norm2(&(&xy * x.as_matrix())) <= 1e-10];
            ensure!(local.iter().all(|&v| v == zero), "instance {i}: independent predicates {local:?}");
            ensure!([t.product_zero, t.trace_zero, t.trace_power_zero, t.sandwich_zero] == local, "instance {i}: {t:?} vs {local:?}");
        }

        let l = rng.random_range(1..n);
        let alpha = rng.random_range(0.1..0.9);
        let u = random_unitary(n, &mut rng);
        let pa = PhoneMatrix::new(HermitianMatrix::identity(n - l).direct_sum(&random_phone(l, &mut rng).scaled(alpha)).conjugated(&u)).unwrap();
        let pb = PhoneMatrix::new(HermitianMatrix::zeros(n - l).direct_sum(&random_phone(l, &mut rng)).conjugated(&u)).unwrap();
        let split = split_on_power_limit(&pa, &pb).map_err(|e| e.to_string())?.ok_or(format!("instance {i}: planted split missed"))?;
        let (ra, rb) = split.reassemble();
        let err = (ra.as_matrix() - pa.as_matrix()).camax().max((rb.as_matrix() - pb.as_matrix()).camax());
        ensure!(err <= 1e-9 && split.l == l && (split.alpha - alpha).abs() <= 1e-9, "instance {i}: split round trip {err:e}");

        let d = rng.random_range(1..n);
        let u = random_unitary(n, &mut rng);
        let ca = PhoneMatrix::new(HermitianMatrix::identity(d).direct_sum(&random_phone(n - d, &mut rng).scaled(0.7)).conjugated(&u)).unwrap();
        let cb = PhoneMatrix::new(HermitianMatrix::identity(d).direct_sum(&random_phone(n - d, &mut rng).scaled(0.9)).conjugated(&u)).unwrap();
        let common = decompose_common_top(&ca, &cb).map_err(|e| e.to_string())?;
        let (ra, rb) = common.reassemble();
        let err = (ra.as_matrix() - ca.as_matrix()).camax().max((rb.as_matrix() - cb.as_matrix()).camax());
        ensure!(common.l == d && err <= 1e-9, "instance {i}: common top split l={} err {err:e}", common.l);
    }
    Ok("power-limit equality, monotonicity, sandwich bounds, vanishing agreement and split round trips on 50 instances".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("oracle triangle", criterion_1),
        ("word-class combinatorics", criterion_2),
        ("zero branch", criterion_3),
        ("positivity threshold", criterion_4),
        ("product gap and quotient estimates", criterion_5),
        ("quotient envelope", criterion_6),
        ("identity suite", criterion_7),
        ("stationarity", criterion_8),
        ("monotonicity scan", criterion_9),
        ("power limits and splits", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
