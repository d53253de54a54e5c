use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMat, HermitianMatrix};
use crate::error::{Error, Result};

/// Wire format for matrices: dimension plus row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let n = j.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&j.re) || !shape_ok(&j.im) {
            return Err(Error::Validation(format!(
                "matrix json: \"re\" and \"im\" must both be {n}x{n} arrays"
            )));
        }
        HermitianMatrix::new(CMat::from_fn(n, n, |r, c| Complex64::new(j.re[r][c], j.im[r][c])))
    }
}

impl From<HermitianMatrix> for MatrixJson {
    fn from(m: HermitianMatrix) -> Self {
        let n = m.dim();
        let a = m.as_matrix();
        MatrixJson {
            n,
            re: (0..n).map(|r| (0..n).map(|c| a[(r, c)].re).collect()).collect(),
            im: (0..n).map(|r| (0..n).map(|c| a[(r, c)].im).collect()).collect(),
        }
    }
}

impl HermitianMatrix {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: MatrixJson = serde_json::from_str(s)?;
        j.try_into()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self.clone())).expect("matrix json serializes")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json_string())?;
        Ok(())
    }
}
