use crate::matrix::{CMat, HermitianMatrix};

/// One step of the normalized recursion
/// `N_{m,j} = (1 - j/m)·A·N_{m-1,j} + (j/m)·B·N_{m-1,j-1}`,
/// where `N_{m,j} = S_{m,j} / C(m,j)`. Only columns `lo..=hi` are produced;
/// `prev[i]` holds column `prev_lo + i` of row `m - 1`.
pub(crate) fn step_window(
    a: &CMat,
    b: &CMat,
    m: u64,
    prev: &[CMat],
    prev_lo: u64,
    lo: u64,
    hi: u64,
) -> Vec<CMat> {
    let n = a.nrows();
    let get = |j: u64| -> Option<&CMat> {
        if j < prev_lo {
            None
        } else {
            prev.get((j - prev_lo) as usize)
        }
    };
    let mf = m as f64;
    (lo..=hi)
        .map(|j| {
            let jf = j as f64;
            let mut cell = CMat::zeros(n, n);
            if j < m {
                if let Some(p) = get(j) {
                    cell += (a * p).scale(1.0 - jf / mf);
                }
            }
            if j >= 1 {
                if let Some(p) = get(j - 1) {
                    cell += (b * p).scale(jf / mf);
                }
            }
            cell
        })
        .collect()
}

/// Memo table of Hurwitz products `S_{m',k'}(A,B)` for `m' <= m_max`,
/// `k' <= min(m', k_max)`.
///
/// Cells are stored divided by `C(m',k')`. For phone inputs every stored
/// cell is a convex combination of words and so has norm at most 1, which
/// keeps the table in range for any `m_max`.
#[derive(Clone, Debug)]
pub struct HurwitzTable {
    a: HermitianMatrix,
    b: HermitianMatrix,
    m_max: u64,
    k_max: u64,
    rows: Vec<Vec<CMat>>,
}

impl HurwitzTable {
    pub fn new(a: &HermitianMatrix, b: &HermitianMatrix, m_max: u64) -> Self {
        Self::with_k_limit(a, b, m_max, m_max)
    }

    /// Table truncated to `k' <= k_max`.
    pub fn with_k_limit(a: &HermitianMatrix, b: &HermitianMatrix, m_max: u64, k_max: u64) -> Self {
        assert_eq!(a.dim(), b.dim(), "table operands must share a dimension");
        let n = a.dim();
        let mut rows = vec![vec![CMat::identity(n, n)]];
        for m in 1..=m_max {
            let prev = rows.last().unwrap();
            rows.push(step_window(a.as_matrix(), b.as_matrix(), m, prev, 0, 0, m.min(k_max)));
        }
        Self { a: a.clone(), b: b.clone(), m_max, k_max, rows }
    }

    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn b(&self) -> &HermitianMatrix {
        &self.b
    }

    pub fn m_max(&self) -> u64 {
        self.m_max
    }

    pub fn k_max(&self) -> u64 {
        self.k_max
    }

    /// `S_{m,k} / C(m,k)`; `None` outside `0 <= k <= m` or beyond the table.
    pub fn normalized_cell(&self, m: u64, k: u64) -> Option<&CMat> {
        if m > self.m_max || k > m.min(self.k_max) {
            return None;
        }
        Some(&self.rows[m as usize][k as usize])
    }

    /// `S_{m,k}`, the zero matrix outside `0 <= k <= m`.
    ///
    /// Panics if `(m, k)` lies beyond the stored range.
    pub fn cell(&self, m: u64, k: u64) -> CMat {
        let n = self.a.dim();
        if k > m {
            return CMat::zeros(n, n);
        }
        let cell = self
            .normalized_cell(m, k)
            .unwrap_or_else(|| panic!("cell ({m},{k}) outside table ({}, {})", self.m_max, self.k_max));
        cell.scale(super::binomial_f64(m, k))
    }

    /// Largest entrywise `|N - N†|` over all stored cells.
    pub fn max_hermiticity_defect(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .map(|c| crate::matrix::max_abs(&(c - c.adjoint())))
            .fold(0.0, f64::max)
    }
}
