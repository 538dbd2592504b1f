use super::{check_dim, packed_index, packed_quadratic_form, SubspaceSketch, ENTRY_BITS};
use crate::error::{invalid, Result};
use crate::matrix::QueryMatrix;
use crate::spectrum::binomial;

/// Largest monomial count accepted; the Gram part grows as m²/2.
pub const MAX_MONOMIALS: usize = 5000;

/// Exact sketch for even p: with (Bx′)_i = ((Ax)_i)^{p/2}, ‖Ax‖_p^p = x′ᵀ(BᵀB)x′.
#[derive(Debug, Clone)]
pub struct EvenMomentSketch {
    p: u32,
    d: usize,
    monomials: Vec<Vec<u32>>,
    upper: Vec<f64>,
}

/// Exponent vectors α ∈ ℕ^d with |α| = k, in graded lexicographic order
/// (all share one degree, so this is lex order with x₁ largest first).
pub fn monomials(d: usize, k: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, k: u32, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            prefix.push(k);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e);
            rec(prefix, left - 1, k - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(&mut Vec::with_capacity(d), d, k, &mut out);
    }
    out
}

fn multinomial(alpha: &[u32]) -> f64 {
    let mut left: u32 = alpha.iter().sum();
    let mut c = 1.0;
    for &a in alpha {
        c *= binomial(left as usize, a as usize) as f64;
        left -= a;
    }
    c
}

fn monomial_value(alpha: &[u32], x: &[f64]) -> f64 {
    alpha
        .iter()
        .zip(x)
        .filter(|(&a, _)| a > 0)
        .map(|(&a, &v)| v.powi(a as i32))
        .product()
}

pub fn build_even_moment_sketch(a: &QueryMatrix, p: u32) -> Result<EvenMomentSketch> {
    if !matches!(p, 2 | 4 | 6) {
        return invalid(format!("even-moment sketch supports p in {{2, 4, 6}}, got {p}"));
    }
    let d = a.d();
    let k = p / 2;
    let count = binomial(d + k as usize - 1, k as usize);
    if count > MAX_MONOMIALS as i128 {
        return invalid(format!(
            "{count} monomials of degree {k} in {d} variables exceed the cap of {MAX_MONOMIALS}"
        ));
    }
    let monomials = monomials(d, k);
    let m = monomials.len();
    let weights: Vec<f64> = monomials.iter().map(|al| multinomial(al)).collect();
    let mut upper = vec![0.0; m * (m + 1) / 2];
    let mut b = vec![0.0; m];
    for row in a.rows() {
        for (slot, (al, w)) in b.iter_mut().zip(monomials.iter().zip(&weights)) {
            *slot = w * monomial_value(al, row);
        }
        for i in 0..m {
            if b[i] == 0.0 {
                continue;
            }
            let base = packed_index(m, i, i);
            for j in i..m {
                upper[base + j - i] += b[i] * b[j];
            }
        }
    }
    Ok(EvenMomentSketch { p, d, monomials, upper })
}

impl EvenMomentSketch {
    pub fn monomials(&self) -> &[Vec<u32>] {
        &self.monomials
    }

    pub fn gram_entries(&self) -> usize {
        self.upper.len()
    }
}

impl SubspaceSketch for EvenMomentSketch {
    fn p(&self) -> f64 {
        self.p as f64
    }

    fn epsilon(&self) -> f64 {
        0.0
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn query(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d, x)?;
        let xp: Vec<f64> = self.monomials.iter().map(|al| monomial_value(al, x)).collect();
        Ok(packed_quadratic_form(self.monomials.len(), &self.upper, &xp).max(0.0))
    }

    /// m(m+1)/2 Gram entries; the monomial list is implied by (d, p).
    fn size_bits(&self) -> u64 {
        self.upper.len() as u64 * ENTRY_BITS
    }
}
