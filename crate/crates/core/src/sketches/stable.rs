use super::{check_dim, SubspaceSketch, ENTRY_BITS};
use crate::error::{invalid, Result};
use crate::matrix::QueryMatrix;
use crate::stats::{cauchy_from_uniform, lower_median, mix64, sample_stable, unit_from_hash};
use rand::{Rng, SeedableRng};
use std::collections::HashMap;
use std::sync::Mutex;

/// r = ⌈c/ε²⌉ rows with this c unless the caller picks another.
pub const DEFAULT_ROW_CONSTANT: f64 = 10.0;

const MEDIAN_SCALE_SAMPLES: usize = 10_000_000;

/// median |X| for X standard symmetric p-stable.
///
/// Exact for p = 1 (tan(π/4) = 1) and p = 2 (X ~ N(0, 2)); other exponents
/// are estimated once from 10⁷ samples and cached for the process.
pub fn median_scale(p: f64) -> f64 {
    if p == 1.0 {
        return 1.0;
    }
    if p == 2.0 {
        return std::f64::consts::SQRT_2 * 0.674_489_750_196_081_7;
    }
    static CACHE: Mutex<Option<HashMap<u64, f64>>> = Mutex::new(None);
    let mut guard = CACHE.lock().expect("median cache poisoned");
    let cache = guard.get_or_insert_with(HashMap::new);
    *cache.entry(p.to_bits()).or_insert_with(|| {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0x5ca1e ^ p.to_bits());
        let mut samples: Vec<f64> = (0..MEDIAN_SCALE_SAMPLES)
            .map(|_| sample_stable(p, &mut rng).abs())
            .collect();
        lower_median(&mut samples).expect("non-empty")
    })
}

/// Stores only SA for an r × n matrix S of i.i.d. standard p-stable entries.
#[derive(Debug, Clone)]
pub struct StableSketch {
    p: f64,
    eps: f64,
    rows: usize,
    d: usize,
    sa: Vec<f64>,
    scale: f64,
}

/// Builds the sketch with r = ⌈c/ε²⌉ rows.
pub fn build_stable_sketch<R: Rng + ?Sized>(
    a: &QueryMatrix,
    p: f64,
    eps: f64,
    c: f64,
    rng: &mut R,
) -> Result<StableSketch> {
    if !(p > 0.0 && p <= 2.0) {
        return invalid(format!("stable sketch needs p in (0, 2], got {p}"));
    }
    if !(eps > 0.0 && eps < 1.0) || !(c > 0.0) {
        return invalid(format!("need 0 < eps < 1 and c > 0, got eps={eps}, c={c}"));
    }
    let rows = ((c / (eps * eps)).ceil() as usize).max(1);
    let d = a.d();
    let mut sa = vec![0.0; rows * d];
    for out in sa.chunks_mut(d) {
        for row in a.rows() {
            let s = sample_stable(p, rng);
            for (o, &v) in out.iter_mut().zip(row) {
                *o += s * v;
            }
        }
    }
    Ok(StableSketch {
        p,
        eps,
        rows,
        d,
        sa,
        scale: median_scale(p),
    })
}

impl StableSketch {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn median_scale(&self) -> f64 {
        self.scale
    }
}

impl SubspaceSketch for StableSketch {
    fn p(&self) -> f64 {
        self.p
    }

    fn epsilon(&self) -> f64 {
        self.eps
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn query(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d, x)?;
        let mut y: Vec<f64> = self
            .sa
            .chunks(self.d)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>().abs())
            .collect();
        let med = lower_median(&mut y).unwrap_or(0.0);
        Ok((med / self.scale).powf(self.p))
    }

    /// r·d stored entries of SA.
    fn size_bits(&self) -> u64 {
        self.sa.len() as u64 * ENTRY_BITS
    }
}

/// Cauchy sketch of a vector whose entries are regenerated from a hash, so the
/// image of any sub-vector can be recomputed and subtracted later.
#[derive(Debug, Clone, Copy)]
pub struct HashedCauchySketch {
    rows: usize,
    seed: u64,
}

impl HashedCauchySketch {
    pub fn new(rows: usize, seed: u64) -> Self {
        assert!(rows > 0, "a sketch needs at least one row");
        Self { rows, seed }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn entry(&self, row: usize, index: usize) -> f64 {
        let h = mix64(self.seed ^ mix64(((row as u64) << 40) ^ index as u64));
        cauchy_from_uniform(unit_from_hash(h))
    }

    /// Image Cx of the sparse vector given as (index, value) pairs.
    pub fn sketch(&self, entries: impl IntoIterator<Item = (usize, f64)>) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        for (i, v) in entries {
            if v == 0.0 {
                continue;
            }
            for (r, out) in y.iter_mut().enumerate() {
                *out += self.entry(r, i) * v;
            }
        }
        y
    }

    /// median |y_r|, which estimates ‖x‖₁ when y = Cx.
    pub fn l1_estimate_from_image(&self, image: &[f64]) -> f64 {
        let mut abs: Vec<f64> = image.iter().map(|v| v.abs()).collect();
        lower_median(&mut abs).unwrap_or(0.0)
    }

    pub fn l1_estimate(&self, entries: impl IntoIterator<Item = (usize, f64)>) -> f64 {
        self.l1_estimate_from_image(&self.sketch(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFunction;
    use crate::matrix::phi_norm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, d: usize, rng: &mut ChaCha8Rng) -> QueryMatrix {
        let ints = (0..n * d).map(|_| rng.random_range(-100..=100)).collect();
        QueryMatrix::from_integers(n, d, 0.01, ints).unwrap()
    }

    #[test]
    fn zero_query_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = random_matrix(20, 3, &mut rng);
        let s = build_stable_sketch(&a, 1.0, 0.5, DEFAULT_ROW_CONSTANT, &mut rng).unwrap();
        assert_eq!(s.query(&[0.0; 3]).unwrap(), 0.0);
        assert_eq!(s.median_scale(), 1.0);
        assert_eq!(s.rows(), 40);
    }

    #[test]
    fn size_counts_sa() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(30, 10, &mut rng);
        let s = build_stable_sketch(&a, 1.0, 0.5, DEFAULT_ROW_CONSTANT, &mut rng).unwrap();
        assert_eq!(s.size_bits(), s.rows() as u64 * 10 * 64);
    }

    #[test]
    fn scale_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(50, 4, &mut rng);
        for &p in &[1.0, 2.0] {
            let s = build_stable_sketch(&a, p, 0.3, DEFAULT_ROW_CONSTANT, &mut rng).unwrap();
            let x = [0.3, -1.2, 2.0, 0.7];
            let c: f64 = -2.5;
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            let lhs = s.query(&cx).unwrap();
            let rhs = c.abs().powf(p) * s.query(&x).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }

    #[test]
    fn gaussian_case_is_accurate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(100, 3, &mut rng);
        let s = build_stable_sketch(&a, 2.0, 0.1, 20.0, &mut rng).unwrap();
        let x = [1.0, 2.0, -1.0];
        let truth = phi_norm(&a, &x, &KernelFunction::power(2.0)).unwrap();
        assert!((s.query(&x).unwrap() / truth - 1.0).abs() < 0.2);
    }

    #[test]
    fn hashed_cauchy_is_linear_and_reproducible() {
        let c = HashedCauchySketch::new(16, 7);
        let x = [(3, 1.0), (9, -2.0)];
        let y = c.sketch(x);
        let y1 = c.sketch([(3, 1.0)]);
        let y2 = c.sketch([(9, -2.0)]);
        for r in 0..16 {
            assert!((y[r] - y1[r] - y2[r]).abs() < 1e-9 * (1.0 + y[r].abs()));
        }
        assert_eq!(c.entry(2, 9), HashedCauchySketch::new(16, 7).entry(2, 9));
    }

    #[test]
    fn hashed_cauchy_estimates_l1() {
        let c = HashedCauchySketch::new(2000, 11);
        let est = c.l1_estimate((0..500).map(|i| (i, 1.0)));
        assert!((est / 500.0 - 1.0).abs() < 0.1, "{est}");
    }
}
