use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hurwitz_core::asymptotics::{m0_bound, positivity_scan};
use hurwitz_core::hurwitz::{binomial_f64, hurwitz_trace, normalized_quotient, quotient_sequence};
use hurwitz_core::matrix::{operator_norm, power_limit, spectral_norm, HermitianMatrix};
use hurwitz_core::sampling::{random_positive, random_unitary, Ensemble};
use hurwitz_core::scan::{scan_conjecture_with, scan_sample, OutputFormat, ScanConfig, ScanRecord};
use hurwitz_core::words::{binomial, count_words_with_ab};

fn pair(n: usize, seed: u64) -> (HermitianMatrix, HermitianMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_positive(n, &mut rng), random_positive(n, &mut rng))
}

fn scale(a: &HermitianMatrix, b: &HermitianMatrix, m: u64, k: u64) -> f64 {
    let na = operator_norm(a, true).unwrap();
    let nb = operator_norm(b, true).unwrap();
    a.dim() as f64 * na.powi((m - k) as i32) * nb.powi(k as i32) * binomial_f64(m, k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn traces_are_unitarily_invariant(n in 1usize..4, seed: u64, m in 0u64..14, k in 0u64..14) {
        prop_assume!(k <= m);
        let (a, b) = pair(n, seed);
        let u = random_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let t = hurwitz_trace(&a, &b, m, k).unwrap();
        let tu = hurwitz_trace(&a.conjugated(&u), &b.conjugated(&u), m, k).unwrap();
        prop_assert!((t - tu).abs() <= 1e-10 * scale(&a, &b, m, k));
    }

    #[test]
    fn row_sums_give_the_full_power(n in 1usize..4, seed: u64, m in 0u64..12) {
        let (a, b) = pair(n, seed);
        let row: f64 = (0..=m).map(|k| hurwitz_trace(&a, &b, m, k).unwrap()).sum();
        let sum = HermitianMatrix::new(a.as_matrix() + b.as_matrix()).unwrap();
        let mut p = HermitianMatrix::identity(n).into_matrix();
        for _ in 0..m {
            p *= sum.as_matrix();
        }
        let full = p.trace().re;
        prop_assert!((row - full).abs() <= 1e-10 * full.abs().max(1.0));
    }

    #[test]
    fn quotients_stay_in_the_unit_interval(n in 1usize..4, seed: u64, k in 0u64..6, m_extra in 0u64..3000) {
        let (a, b) = pair(n, seed);
        let q = normalized_quotient(&a, &b, k + m_extra, k).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&q));
    }

    #[test]
    fn quotient_sequences_match_pointwise(n in 1usize..4, seed: u64, k in 0u64..5) {
        let (a, b) = pair(n, seed);
        let seq = quotient_sequence(&a, &b, k, 30).unwrap();
        for &(m, q) in &seq.values {
            prop_assert!((q - normalized_quotient(&a, &b, m, k).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn positivity_holds_past_the_threshold(seed: u64, k in 1u64..4) {
        let (a, b) = pair(3, seed);
        let c = m0_bound(&a, &b, k).unwrap();
        let scan = positivity_scan(&a, &b, k, c.m0, c.m0 + 20).unwrap();
        prop_assert!(scan.violations.is_empty());
    }

    #[test]
    fn power_limits_are_orthogonal_projections(n in 1usize..5, seed: u64) {
        let (a, _) = pair(n, seed);
        let scaled = a.scaled(1.0 / operator_norm(&a, true).unwrap());
        let p = power_limit(&scaled).unwrap();
        let pm = p.as_matrix();
        prop_assert!(spectral_norm(&(pm * pm - pm)) <= 1e-9);
        prop_assert!(p.trace() >= 1.0 - 1e-9);
    }

    #[test]
    fn word_counts_partition_binomials(m in 0u64..400, k in 0u64..400) {
        prop_assume!(k <= m);
        let total: num_bigint::BigUint = (0..=k.min(m - k)).map(|s| count_words_with_ab(m, k, s)).sum();
        prop_assert_eq!(total, binomial(m, k as i64));
    }
}

fn config(dir: &std::path::Path, format: OutputFormat) -> ScanConfig {
    ScanConfig {
        n: 2,
        k_list: vec![1, 2],
        m_count: 20,
        samples: 8,
        master_seed: 5,
        ensemble: Ensemble::ComplexWishart,
        tolerance: 1e-9,
        output_path: dir.join(format!("out.{format}")),
        format,
    }
}

#[test]
fn serial_and_parallel_scans_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), OutputFormat::Jsonl);
    let parallel = scan_conjecture_with(&cfg, true).unwrap();
    let first = std::fs::read_to_string(&cfg.output_path).unwrap();
    let serial = scan_conjecture_with(&cfg, false).unwrap();
    let second = std::fs::read_to_string(&cfg.output_path).unwrap();
    assert_eq!(parallel, serial);
    assert_eq!(first.lines().skip(1).collect::<Vec<_>>(), second.lines().skip(1).collect::<Vec<_>>());
}

#[test]
fn jsonl_records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), OutputFormat::Jsonl);
    let summary = scan_conjecture_with(&cfg, true).unwrap();
    let text = std::fs::read_to_string(&cfg.output_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len() as u64, summary.records + 2);
    let mut expected = Vec::new();
    for i in 0..cfg.samples {
        expected.extend(scan_sample(&cfg, i).unwrap());
    }
    let parsed: Vec<ScanRecord> = lines[1..lines.len() - 1].iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(parsed, expected);
}

#[test]
fn csv_has_one_row_per_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), OutputFormat::Csv);
    let summary = scan_conjecture_with(&cfg, true).unwrap();
    let text = std::fs::read_to_string(&cfg.output_path).unwrap();
    assert_eq!(text.lines().count() as u64, summary.records + 1);
}
