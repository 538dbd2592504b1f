use super::{check_dim, packed_index, packed_quadratic_form, SubspaceSketch, ENTRY_BITS};
use crate::error::Result;
use crate::matrix::QueryMatrix;

/// Stores AᵀA and answers Q₂(x) = xᵀAᵀAx with no error.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSketch {
    d: usize,
    upper: Vec<f64>,
}

pub fn build_gram_sketch(a: &QueryMatrix) -> GramSketch {
    let d = a.d();
    let mut upper = vec![0.0; d * (d + 1) / 2];
    for row in a.rows() {
        for i in 0..d {
            if row[i] == 0.0 {
                continue;
            }
            for j in i..d {
                upper[packed_index(d, i, j)] += row[i] * row[j];
            }
        }
    }
    GramSketch { d, upper }
}

impl GramSketch {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.upper[packed_index(self.d, i, j)]
    }
}

impl SubspaceSketch for GramSketch {
    fn p(&self) -> f64 {
        2.0
    }

    fn epsilon(&self) -> f64 {
        0.0
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn query(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d, x)?;
        Ok(packed_quadratic_form(self.d, &self.upper, x).max(0.0))
    }

    /// d(d+1)/2 stored entries.
    fn size_bits(&self) -> u64 {
        self.upper.len() as u64 * ENTRY_BITS
    }
}
