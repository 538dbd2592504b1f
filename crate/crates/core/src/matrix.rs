//! Fixed-precision query matrices and the exact Φ(Ax) oracle.

use crate::error::{invalid, Error, Result};
use crate::kernel::KernelFunction;
use nalgebra::DMatrix;
use std::fmt::Write as _;

/// An n × d matrix whose entries are integers times a shared `grain`.
///
/// The integer payload is what gets stored; `values` is the cached real view.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryMatrix {
    n: usize,
    d: usize,
    grain: f64,
    ints: Vec<i64>,
    values: Vec<f64>,
}

impl QueryMatrix {
    pub fn from_integers(n: usize, d: usize, grain: f64, ints: Vec<i64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return invalid(format!("matrix shape {n}x{d} must be at least 1x1"));
        }
        if !(grain > 0.0 && grain.is_finite()) {
            return invalid(format!("grain must be a positive real, got {grain}"));
        }
        if ints.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                actual: ints.len(),
            });
        }
        let values = ints.iter().map(|&k| k as f64 * grain).collect();
        Ok(Self {
            n,
            d,
            grain,
            ints,
            values,
        })
    }

    /// Rounds each real entry to the nearest multiple of `grain` (ties away from zero).
    pub fn quantize(n: usize, d: usize, grain: f64, values: &[f64]) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                actual: values.len(),
            });
        }
        let mut ints = Vec::with_capacity(values.len());
        for &v in values {
            let k = (v / grain).round();
            if !k.is_finite() || k.abs() > (1u64 << 62) as f64 {
                return invalid(format!("entry {v} does not fit the grain {grain}"));
            }
            ints.push(k as i64);
        }
        Self::from_integers(n, d, grain, ints)
    }

    /// Block-diagonal composition; every block must share the same grain.
    pub fn block_diagonal(blocks: &[QueryMatrix]) -> Result<Self> {
        let Some(first) = blocks.first() else {
            return invalid("block_diagonal needs at least one block");
        };
        if blocks.iter().any(|b| b.grain != first.grain) {
            return invalid("blocks must share one grain");
        }
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let d: usize = blocks.iter().map(|b| b.d).sum();
        let mut ints = vec![0i64; n * d];
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.d {
                    ints[(r0 + i) * d + c0 + j] = b.ints[i * b.d + j];
                }
            }
            r0 += b.n;
            c0 += b.d;
        }
        Self::from_integers(n, d, first.grain, ints)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn grain(&self) -> f64 {
        self.grain
    }

    pub fn integers(&self) -> &[i64] {
        &self.ints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.d)
    }

    /// Bits per stored entry: sign plus the magnitude of the largest integer.
    pub fn entry_bits(&self) -> u32 {
        let max = self.ints.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0);
        1 + (64 - max.leading_zeros()).max(1)
    }

    /// A·x.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                actual: x.len(),
            });
        }
        Ok(self
            .rows()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.d, &self.values)
    }

    /// Text format: `n d grain`, then n lines of d integers.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {:e}", self.n, self.d, self.grain);
        for row in self.ints.chunks(self.d) {
            let line: Vec<String> = row.iter().map(|k| k.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let perr = |line: usize, message: String| Error::Parse {
            line: line + 1,
            message,
        };
        if parts.len() != 3 {
            return Err(perr(hl, "header must be 'n d grain'".into()));
        }
        let n: usize = parts[0].parse().map_err(|e| perr(hl, format!("n: {e}")))?;
        let d: usize = parts[1].parse().map_err(|e| perr(hl, format!("d: {e}")))?;
        let grain: f64 = parts[2]
            .parse()
            .map_err(|e| perr(hl, format!("grain: {e}")))?;
        let mut ints = Vec::with_capacity(n * d);
        let mut rows = 0;
        for (ln, line) in lines {
            let row: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|e| perr(ln, format!("{t}: {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != d {
                return Err(perr(ln, format!("expected {d} entries, found {}", row.len())));
            }
            ints.extend(row);
            rows += 1;
        }
        if rows != n {
            return Err(perr(0, format!("header says {n} rows, found {rows}")));
        }
        Self::from_integers(n, d, grain, ints)
    }
}

/// Σ_i φ((Ax)_i): the exact value every sketch approximates.
pub fn phi_norm(a: &QueryMatrix, x: &[f64], kernel: &KernelFunction) -> Result<f64> {
    let ax = a.apply(x)?;
    Ok(ax.iter().map(|&v| kernel.eval(v)).sum())
}

/// σ_max / σ_min; infinite when A is rank deficient.
pub fn condition_number(a: &QueryMatrix) -> f64 {
    let m = a.to_dmatrix();
    let sv = if a.n() >= a.d() {
        // the d×d Gram matrix is enough for the singular values
        let g = m.transpose() * &m;
        g.symmetric_eigenvalues()
            .iter()
            .map(|&e| e.max(0.0).sqrt())
            .collect::<Vec<_>>()
    } else {
        return f64::INFINITY;
    };
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min <= max * 1e-12 {
        f64::INFINITY
    } else {
        max / min
    }
}
