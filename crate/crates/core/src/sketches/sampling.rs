use super::lewis::LewisWeights;
use super::{check_dim, SubspaceSketch, ENTRY_BITS};
use crate::error::{invalid, Error, Result};
use crate::matrix::QueryMatrix;
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::Rng;

/// m rows drawn with probability q_i = w_i/d and rescaled by (1/(m q_i))^{1/p},
/// so that E[query(x)] = ‖Ax‖_p^p.
#[derive(Debug, Clone)]
pub struct SamplingSketch {
    p: f64,
    d: usize,
    index_bits: u64,
    /// Sampled source rows, already rescaled.
    rows: Vec<Vec<f64>>,
    indices: Vec<usize>,
}

pub fn build_sampling_sketch<R: Rng + ?Sized>(
    a: &QueryMatrix,
    weights: &LewisWeights,
    m: usize,
    rng: &mut R,
) -> Result<SamplingSketch> {
    if m == 0 {
        return invalid("sample size m must be at least 1");
    }
    if weights.w.len() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            actual: weights.w.len(),
        });
    }
    let p = weights.p;
    let total: f64 = weights.w.iter().sum();
    let dist = WeightedIndex::new(&weights.w).map_err(|e| Error::InvalidInput(format!("bad weights: {e}")))?;
    let mut rows = Vec::with_capacity(m);
    let mut indices = Vec::with_capacity(m);
    for _ in 0..m {
        let i = dist.sample(rng);
        let q = weights.w[i] / total;
        let scale = (1.0 / (m as f64 * q)).powf(1.0 / p);
        rows.push(a.row(i).iter().map(|v| v * scale).collect());
        indices.push(i);
    }
    Ok(SamplingSketch {
        p,
        d: a.d(),
        index_bits: (usize::BITS - (a.n().max(2) - 1).leading_zeros()) as u64,
        rows,
        indices,
    })
}

impl SamplingSketch {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

impl SubspaceSketch for SamplingSketch {
    fn p(&self) -> f64 {
        self.p
    }

    /// Unbiased but without a worst-case guarantee at a fixed m.
    fn epsilon(&self) -> f64 {
        f64::NAN
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn query(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d, x)?;
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs().powf(self.p))
            .sum())
    }

    /// m rescaled rows of d entries, each tagged with its ⌈log₂ n⌉-bit source index.
    fn size_bits(&self) -> u64 {
        self.rows.len() as u64 * (self.d as u64 * ENTRY_BITS + self.index_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFunction;
    use crate::matrix::phi_norm;
    use crate::sketches::compute_lewis_weights;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_row_is_exact() {
        let a = QueryMatrix::from_integers(1, 3, 0.5, vec![1, -2, 3]).unwrap();
        let lw = compute_lewis_weights(&QueryMatrix::from_integers(3, 3, 1.0, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap(), 1.0).unwrap();
        // weights for a single row: any positive weight gives q = 1
        let single = LewisWeights { w: vec![lw.w[0]], ..lw };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for m in [1, 3, 7] {
            let s = build_sampling_sketch(&a, &single, m, &mut rng).unwrap();
            let x = [1.0, 1.0, 2.0];
            let truth = phi_norm(&a, &x, &KernelFunction::power(1.0)).unwrap();
            assert!((s.query(&x).unwrap() - truth).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_rows_are_exact() {
        let a = QueryMatrix::from_integers(50, 2, 1.0, [3, -1].repeat(50)).unwrap();
        let lw = LewisWeights {
            p: 1.5,
            w: vec![0.04; 50],
            iterations: 0,
            residual: 0.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = build_sampling_sketch(&a, &lw, 50, &mut rng).unwrap();
        let truth = phi_norm(&a, &[1.0, 1.0], &KernelFunction::power(1.5)).unwrap();
        assert!((s.query(&[1.0, 1.0]).unwrap() / truth - 1.0).abs() < 1e-12);
    }

    #[test]
    fn size_accounting() {
        let a = QueryMatrix::from_integers(4, 2, 1.0, vec![1, 0, 0, 1, 1, 1, 2, 1]).unwrap();
        let lw = compute_lewis_weights(&a, 1.0).unwrap();
        let s = build_sampling_sketch(&a, &lw, 5, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(s.size_bits(), 5 * (2 * 64 + 2));
    }
}
