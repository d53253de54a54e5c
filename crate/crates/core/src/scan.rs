//! Monotonicity scan of `m ↦ q_{m,k}` over seeded random positive pairs.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{m0_bound, PositivityCertificate, POSITIVE_Q_TOL, PRODUCT_ZERO_TOL};
use crate::error::{Error, Result};
use crate::hurwitz::quotient_sequence;
use crate::matrix::{spectral_norm, HermitianMatrix};
use crate::sampling::{sample_pair, sub_seed, Ensemble};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Draws per sample before giving up on finding a pair with `AB ≠ 0`.
pub const MAX_ATTEMPTS: u64 = 1000;
/// Samples computed together before their records are written.
const CHUNK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Jsonl,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Validation(format!("unknown format {other:?} (expected jsonl or csv)"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Jsonl => "jsonl",
            OutputFormat::Csv => "csv",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub n: usize,
    pub k_list: Vec<u64>,
    pub m_count: u64,
    pub samples: u64,
    pub master_seed: u64,
    pub ensemble: Ensemble,
    pub tolerance: f64,
    pub output_path: PathBuf,
    pub format: OutputFormat,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Validation("n must be at least 1".into()));
        }
        if self.k_list.is_empty() {
            return Err(Error::Validation("k list is empty".into()));
        }
        if self.samples < 1 {
            return Err(Error::Validation("samples must be at least 1".into()));
        }
        if self.m_count < 2 {
            return Err(Error::Validation("m_count must be at least 2".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// A step where the sequence rises: `q_{m+1} > q_m` beyond the tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    /// Position of `q_m` within the sequence.
    pub index: usize,
    pub m: u64,
    pub q_m: f64,
    pub q_next: f64,
    pub gap: f64,
}

/// Rises in `q` (the value at position `i` belonging to `m_start + i`)
/// larger than `tolerance·max(|q_m|, |q_{m+1}|, 1e-300)`.
pub fn monotonicity_violations(q: &[f64], m_start: u64, tolerance: f64) -> Vec<MonotonicityViolation> {
    q.windows(2)
        .enumerate()
        .filter_map(|(index, w)| {
            let gap = w[1] - w[0];
            let scale = w[0].abs().max(w[1].abs()).max(1e-300);
            (gap > tolerance * scale).then_some(MonotonicityViolation {
                index,
                m: m_start + index as u64,
                q_m: w[0],
                q_next: w[1],
                gap,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub sample_index: u64,
    pub sub_seed: u64,
    /// Draws needed to get `‖AB‖ > 1e-10` (1 = first draw).
    pub attempts: u64,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub k: u64,
    /// `q_{k,k}, q_{k+1,k}, …`
    pub q_values: Vec<f64>,
    pub violations: Vec<MonotonicityViolation>,
    pub first_positive_m: Option<u64>,
    pub m0_certificate: Option<PositivityCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0_error: Option<String>,
}

impl ScanRecord {
    pub fn min_q(&self) -> f64 {
        self.q_values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub records: u64,
    pub samples: u64,
    pub resamples: u64,
    pub violations: u64,
    pub records_with_violations: u64,
    pub min_q: f64,
    /// Records whose first positive `m` is not `k`.
    pub late_positive: u64,
}

impl ScanSummary {
    fn new() -> Self {
        Self { records: 0, samples: 0, resamples: 0, violations: 0, records_with_violations: 0, min_q: f64::INFINITY, late_positive: 0 }
    }

    fn absorb(&mut self, records: &[ScanRecord]) {
        if let Some(first) = records.first() {
            self.samples += 1;
            self.resamples += first.attempts - 1;
        }
        for r in records {
            self.records += 1;
            self.violations += r.violations.len() as u64;
            self.records_with_violations += u64::from(!r.violations.is_empty());
            self.min_q = self.min_q.min(r.min_q());
            self.late_positive += u64::from(r.first_positive_m != Some(r.k));
        }
    }
}

/// All records of one sample, one per entry of `k_list`.
pub fn scan_sample(config: &ScanConfig, sample_index: u64) -> Result<Vec<ScanRecord>> {
    let seed = sub_seed(config.master_seed, sample_index);
    let (a, b, attempts) = (0..MAX_ATTEMPTS)
        .map(|attempt| (sample_pair(config.n, config.ensemble, seed, attempt), attempt + 1))
        .find(|((a, b), _)| spectral_norm(&(a.as_matrix() * b.as_matrix())) > PRODUCT_ZERO_TOL)
        .map(|((a, b), attempts)| (a.into_hermitian(), b.into_hermitian(), attempts))
        .ok_or_else(|| Error::Resource(format!("sample {sample_index}: no pair with AB ≠ 0 in {MAX_ATTEMPTS} draws")))?;
    config
        .k_list
        .iter()
        .map(|&k| {
            let q_values = quotient_sequence(&a, &b, k, config.m_count)?.q_values();
            let violations = monotonicity_violations(&q_values, k, config.tolerance);
            let first_positive_m = q_values.iter().position(|&q| q > POSITIVE_Q_TOL).map(|i| k + i as u64);
            let (m0_certificate, m0_error) = if k == 0 {
                (None, None)
            } else {
                match m0_bound(&a, &b, k) {
                    Ok(c) => (Some(c), None),
                    Err(e) => (None, Some(e.to_string())),
                }
            };
            Ok(ScanRecord {
                sample_index,
                sub_seed: seed,
                attempts,
                a: a.clone(),
                b: b.clone(),
                k,
                q_values,
                violations,
                first_positive_m,
                m0_certificate,
                m0_error,
            })
        })
        .collect()
}

/// Runs the scan and writes it to `config.output_path`.
///
/// JSON-lines output starts with a header line carrying a timestamp and
/// the configuration, then one record per line in `(sample, k)` order, then
/// a summary line. The output file is created before any computation.
pub fn scan_conjecture(config: &ScanConfig) -> Result<ScanSummary> {
    scan_conjecture_with(config, true)
}

/// As [`scan_conjecture`], with samples computed concurrently or in order.
pub fn scan_conjecture_with(config: &ScanConfig, parallel: bool) -> Result<ScanSummary> {
    config.validate()?;
    let file = File::create(&config.output_path)?;
    let mut sink = Sink::open(config, BufWriter::new(file))?;
    let mut summary = ScanSummary::new();
    let indices: Vec<u64> = (0..config.samples).collect();
    for chunk in indices.chunks(CHUNK) {
        let batch: Vec<Vec<ScanRecord>> = if parallel {
            chunk.par_iter().map(|&i| scan_sample(config, i)).collect::<Result<_>>()?
        } else {
            chunk.iter().map(|&i| scan_sample(config, i)).collect::<Result<_>>()?
        };
        for records in &batch {
            summary.absorb(records);
            for r in records {
                sink.record(r)?;
            }
        }
    }
    sink.finish(&summary)?;
    Ok(summary)
}

#[derive(Serialize)]
struct Header<'a> {
    created_unix_seconds: u64,
    config: &'a ScanConfig,
}

#[derive(Serialize)]
struct CsvRow {
    sample: u64,
    k: u64,
    min_q: f64,
    n_violations: usize,
    first_positive_m: Option<u64>,
    m0: Option<u64>,
}

enum Sink<W: Write> {
    Jsonl(W),
    Csv(csv::Writer<W>),
}

impl<W: Write> Sink<W> {
    fn open(config: &ScanConfig, mut w: W) -> Result<Self> {
        match config.format {
            OutputFormat::Jsonl => {
                let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                let header = serde_json::json!({ "header": Header { created_unix_seconds: created, config } });
                writeln!(w, "{header}")?;
                Ok(Sink::Jsonl(w))
            }
            OutputFormat::Csv => Ok(Sink::Csv(csv::Writer::from_writer(w))),
        }
    }

    fn record(&mut self, r: &ScanRecord) -> Result<()> {
        match self {
            Sink::Jsonl(w) => writeln!(w, "{}", serde_json::to_string(r)?)?,
            Sink::Csv(w) => w.serialize(CsvRow {
                sample: r.sample_index,
                k: r.k,
                min_q: r.min_q(),
                n_violations: r.violations.len(),
                first_positive_m: r.first_positive_m,
                m0: r.m0_certificate.as_ref().map(|c| c.m0),
            })?,
        }
        Ok(())
    }

    fn finish(self, summary: &ScanSummary) -> Result<()> {
        match self {
            Sink::Jsonl(mut w) => {
                writeln!(w, "{}", serde_json::json!({ "summary": summary }))?;
                w.flush()?;
            }
            Sink::Csv(mut w) => w.flush()?,
        }
        Ok(())
    }
}
