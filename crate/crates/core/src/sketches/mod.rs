//! Subspace sketches: compact stand-ins for A that answer ‖Ax‖_p^p queries.
//!
//! | sketch | p | error | stored |
//! |---|---|---|---|
//! | [`GramSketch`] | 2 | exact | upper triangle of AᵀA |
//! | [`EvenMomentSketch`] | 2, 4, 6 | exact | upper triangle of BᵀB over degree-p/2 monomials |
//! | [`StableSketch`] | (0, 2] | 1 ± ε w.h.p. | SA for a p-stable S |
//! | [`SamplingSketch`] | (0, 4) | unbiased | m Lewis-weight sampled, rescaled rows |
//!
//! Every sketch reports its size in bits; entries are counted at 64 bits.

mod even;
mod gram;
mod lewis;
mod sampling;
mod stable;

pub use even::{build_even_moment_sketch, monomials, EvenMomentSketch, MAX_MONOMIALS};
pub use gram::{build_gram_sketch, GramSketch};
pub use lewis::{compute_lewis_weights, leverage_scores, LewisWeights};
pub use sampling::{build_sampling_sketch, SamplingSketch};
pub use stable::{build_stable_sketch, median_scale, HashedCauchySketch, StableSketch, DEFAULT_ROW_CONSTANT};

use crate::error::Result;

/// Bits charged per stored real.
pub const ENTRY_BITS: u64 = 64;

/// Shared query interface.
pub trait SubspaceSketch {
    fn p(&self) -> f64;
    /// Target relative error; 0 for the exact sketches.
    fn epsilon(&self) -> f64;
    fn dim(&self) -> usize;
    /// Estimate of ‖Ax‖_p^p.
    fn query(&self, x: &[f64]) -> Result<f64>;
    fn size_bits(&self) -> u64;
}

/// Free-function form of [`SubspaceSketch::size_bits`].
pub fn size_bits(sketch: &dyn SubspaceSketch) -> u64 {
    sketch.size_bits()
}

/// Index into a packed upper triangle (row-major, i ≤ j) of an m × m matrix.
#[inline]
pub(crate) fn packed_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < m);
    i * m - i * (i + 1) / 2 + j
}

/// xᵀGx for a symmetric G stored as its packed upper triangle.
pub(crate) fn packed_quadratic_form(m: usize, upper: &[f64], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..m {
        let row = &upper[packed_index(m, i, i)..packed_index(m, i, m - 1) + 1];
        let mut acc = row[0] * x[i];
        for (k, &g) in row.iter().enumerate().skip(1) {
            acc += 2.0 * g * x[i + k];
        }
        total += x[i] * acc;
    }
    total
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(crate::Error::DimensionMismatch {
            expected,
            actual: x.len(),
        });
    }
    Ok(())
}
