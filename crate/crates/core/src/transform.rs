//! Walsh–Hadamard transform and Boolean-cube enumeration.
//!
//! Index `j` of a length-2^d vector corresponds to the cube point read off the
//! binary expansion of `j`, most significant bit first: coordinate k is
//! (−1)^{bit (d−1−k) of j}. With this map the Hamming distance of two
//! cube points is `popcount(i ^ j)` and ⟨i, j⟩ = d − 2·popcount(i ^ j).

use crate::error::{invalid, Result};
use crate::matrix::QueryMatrix;

pub const MAX_CUBE_DIM: usize = 24;

/// Unnormalized in-place butterfly: v ← H v with H entries (−1)^{⟨s,z⟩}.
pub fn fwht_in_place(v: &mut [f64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Normalized transform, entries 2^{−d/2}(−1)^{⟨s,z⟩}. Orthogonal and an involution.
pub fn walsh_hadamard(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() || !v.len().is_power_of_two() {
        return invalid(format!("length {} is not a power of two", v.len()));
    }
    let mut out = v.to_vec();
    fwht_in_place(&mut out);
    let scale = 1.0 / (v.len() as f64).sqrt();
    out.iter_mut().for_each(|x| *x *= scale);
    Ok(out)
}

#[inline]
fn cube_sign(d: usize, j: usize, k: usize) -> i64 {
    if (j >> (d - 1 - k)) & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Cube point for index `j`.
pub fn cube_vector(d: usize, j: usize) -> Vec<f64> {
    (0..d).map(|k| cube_sign(d, j, k) as f64).collect()
}

/// ⟨i, j⟩ for two cube indices.
#[inline]
pub fn cube_inner(d: usize, i: usize, j: usize) -> i64 {
    d as i64 - 2 * (i ^ j).count_ones() as i64
}

/// The 2^d × d matrix whose rows are all sign vectors in canonical order.
pub fn cube_rows(d: usize) -> Result<QueryMatrix> {
    if d == 0 || d > MAX_CUBE_DIM {
        return invalid(format!("cube dimension {d} outside 1..={MAX_CUBE_DIM}"));
    }
    let n = 1usize << d;
    let mut ints = Vec::with_capacity(n * d);
    for j in 0..n {
        ints.extend((0..d).map(|k| cube_sign(d, j, k)));
    }
    QueryMatrix::from_integers(n, d, 1.0, ints)
}
