//! Single-coefficient extraction on a circle: for `z = r·e^{iθ}` with
//! `r = k/(m-k)`, the discrete Fourier sum of `tr((A + zB)/(1+r))^m` over `N`
//! equispaced angles equals `n·q_{m,k}·Binom(k; m, k/m)` up to aliasing from
//! coefficients `N` steps away, which the binomial weights suppress.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::matrix::CMat;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `ln n! - ln(√(2πn) (n/e)^n)`.
fn stirlerr(n: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n <= 15.0 {
        let ln_fact: f64 = (2..=n as u64).map(|i| (i as f64).ln()).sum();
        return ln_fact - ((n + 0.5) * n.ln() - n + 0.5 * LN_2PI);
    }
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated without cancellation.
fn bd0(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// Natural log of the binomial probability mass at `x` for `n` trials with
/// success probability `p`, accurate for very large `n`.
pub(crate) fn ln_binomial_pmf(x: u64, n: u64, p: f64) -> f64 {
    let (xf, nf) = (x as f64, n as f64);
    if x == 0 {
        return nf * (-p).ln_1p();
    }
    if x == n {
        return nf * p.ln();
    }
    let lc = stirlerr(nf) - stirlerr(xf) - stirlerr(nf - xf) - bd0(xf, nf * p) - bd0(nf - xf, nf * (1.0 - p));
    lc - 0.5 * (LN_2PI + xf.ln() + (-xf / nf).ln_1p())
}

fn complex_power(base: &CMat, mut e: u64) -> CMat {
    let n = base.nrows();
    let mut result = CMat::identity(n, n);
    let mut sq = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &sq;
        }
        e >>= 1;
        if e > 0 {
            sq = &sq * &sq;
        }
    }
    result
}

/// Number of angles: enough to push aliased coefficients out beyond twelve
/// standard deviations of the binomial weight, never more than `m + 1` (exact).
fn node_count(m: u64, p: f64) -> u64 {
    let sigma = (m as f64 * p * (1.0 - p)).sqrt();
    let wanted = ((12.0 * sigma).ceil() as u64 + 64).max(64);
    wanted.min(m + 1)
}

/// `q_{m,j}` for phone `a`, `b` and every `j` in `lo..=hi`, all read off one
/// circle centred on `center`. Accuracy degrades once `j` is several standard
/// deviations of `Binom(m, center/m)` away from `center`.
pub(crate) fn quotient_window_by_contour(a: &CMat, b: &CMat, m: u64, center: u64, lo: u64, hi: u64) -> Vec<f64> {
    assert!(0 < center && center < m && lo <= hi && 0 < lo && hi < m);
    let n = a.nrows();
    let r = center as f64 / (m - center) as f64;
    let p = center as f64 / m as f64;
    let nodes = node_count(m, p);
    let half = nodes / 2;
    let scale = Complex64::new(1.0 + r, 0.0);
    let traces: Vec<Complex64> = (0..=half)
        .map(|l| {
            let z = Complex64::from_polar(r, 2.0 * PI * l as f64 / nodes as f64);
            complex_power(&((a + b * z) / scale), m).trace()
        })
        .collect();
    (lo..=hi)
        .map(|j| {
            let mut sum = traces[0].re;
            for (l, t) in traces.iter().enumerate().skip(1) {
                // e^{-ijθ_l}, angle reduced exactly in integers
                let phase = 2.0 * PI * ((j as u128 * l as u128) % nodes as u128) as f64 / nodes as f64;
                let term = (t * Complex64::from_polar(1.0, -phase)).re;
                // θ = π is its own mirror image
                sum += if nodes % 2 == 0 && l as u64 == half { term } else { 2.0 * term };
            }
            let weighted = sum / nodes as f64;
            weighted / (n as f64 * ln_binomial_pmf(j, m, p).exp())
        })
        .collect()
}

/// `q_{m,k}` for phone `a`, `b` and `0 < k < m`.
pub(crate) fn quotient_by_contour(a: &CMat, b: &CMat, m: u64, k: u64) -> f64 {
    quotient_window_by_contour(a, b, m, k, k, k)[0]
}

/// Matrix products needed by [`quotient_by_contour`].
pub(crate) fn contour_cost(m: u64, k: u64) -> f64 {
    let bits = (64 - m.leading_zeros()) as f64;
    (node_count(m, k as f64 / m as f64) / 2 + 1) as f64 * 2.0 * bits
}
