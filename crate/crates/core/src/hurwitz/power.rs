//! Normalized coefficients of `(A + tB)^m` truncated at degree `K`, by binary
//! powering. Cost is `O(log m · K²)` matrix products, independent of `m`.

use crate::matrix::CMat;

/// `C(j,i)·C(j,k-i) / C(2j,k)`: the hypergeometric weight that combines two
/// normalized half-power coefficients into a normalized full-power one.
fn squaring_weight(j: u64, k: u64, i: u64, binom_k: &[f64]) -> f64 {
    if i > j || k - i > j {
        return 0.0;
    }
    let jf = j as f64;
    let mut w = binom_k[i as usize];
    for r in 0..i {
        let r = r as f64;
        w *= (jf - r) / (2.0 * jf - r);
    }
    let i_f = i as f64;
    for s in 0..(k - i) {
        let s = s as f64;
        w *= (jf - s) / (2.0 * jf - i_f - s);
    }
    w
}

fn pascal_row(k: u64) -> Vec<f64> {
    let mut row = vec![1.0];
    for i in 0..k {
        let next = row[i as usize] * (k - i) as f64 / (i + 1) as f64;
        row.push(next);
    }
    row
}

fn square(row: &[CMat], j: u64, k_max: u64) -> Vec<CMat> {
    let n = row[0].nrows();
    let len = (2 * j).min(k_max) + 1;
    let have = row.len() as u64;
    (0..len)
        .map(|k| {
            let binom_k = pascal_row(k);
            let mut acc = CMat::zeros(n, n);
            let lo = k.saturating_sub(have - 1);
            for i in lo..=k.min(have - 1) {
                let w = squaring_weight(j, k, i, &binom_k);
                if w != 0.0 {
                    acc += (&row[i as usize] * &row[(k - i) as usize]).scale(w);
                }
            }
            acc
        })
        .collect()
}

/// Right multiplication by `(A + tB)`: row `m - 1` to row `m`.
fn multiply(row: &[CMat], m: u64, a: &CMat, b: &CMat, k_max: u64) -> Vec<CMat> {
    let n = a.nrows();
    let len = m.min(k_max) + 1;
    let mf = m as f64;
    (0..len)
        .map(|k| {
            let kf = k as f64;
            let mut acc = CMat::zeros(n, n);
            if let Some(p) = row.get(k as usize) {
                if k < m {
                    acc += (p * a).scale(1.0 - kf / mf);
                }
            }
            if k >= 1 {
                if let Some(p) = row.get(k as usize - 1) {
                    acc += (p * b).scale(kf / mf);
                }
            }
            acc
        })
        .collect()
}

/// `[S_{m,0}/C(m,0), …, S_{m,K}/C(m,K)]` with `K = min(m, k_max)`.
pub(crate) fn normalized_row_by_powering(a: &CMat, b: &CMat, m: u64, k_max: u64) -> Vec<CMat> {
    let n = a.nrows();
    if m == 0 {
        return vec![CMat::identity(n, n)];
    }
    let mut row = vec![a.clone()];
    if k_max >= 1 {
        row.push(b.clone());
    }
    let mut j = 1u64;
    let bits = 64 - m.leading_zeros();
    for bit in (0..bits - 1).rev() {
        row = square(&row, j, k_max);
        j *= 2;
        if (m >> bit) & 1 == 1 {
            j += 1;
            row = multiply(&row, j, a, b, k_max);
        }
    }
    debug_assert_eq!(j, m);
    row
}
