//! Count-Sketch heavy hitters relative to the ℓ₁ tail of the input.

use crate::sketches::HashedCauchySketch;
use crate::stats::{lower_median, mix64};
use rand::Rng;
use serde::Serialize;

/// Rows of the Cauchy sketch that estimates the tail mass.
pub const TAIL_SKETCH_ROWS: usize = 128;
/// Report i when |x̂_i| ≥ REPORT_FRACTION · β · (estimated tail).
pub const REPORT_FRACTION: f64 = 0.75;

/// Count-Sketch: `rows` independent hash rows of `buckets` signed counters.
#[derive(Debug, Clone)]
pub struct HeavyHitterSketch {
    buckets: usize,
    rows: usize,
    seed: u64,
    table: Vec<f64>,
}

impl HeavyHitterSketch {
    /// ⌈16/β⌉ buckets and max(5, 2⌈log₂ n⌉ + 1) rows for a universe of size n.
    pub fn new<R: Rng + ?Sized>(universe: usize, beta: f64, rng: &mut R) -> Self {
        let buckets = (16.0 / beta).ceil() as usize;
        let log_n = (universe.max(2) as f64).log2().ceil() as usize;
        let rows = (2 * log_n + 1).max(5);
        Self {
            buckets,
            rows,
            seed: rng.random(),
            table: vec![0.0; buckets * rows],
        }
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    fn slot(&self, row: usize, index: usize) -> (usize, f64) {
        let h = mix64(self.seed ^ mix64(((row as u64) << 40) ^ index as u64));
        let bucket = ((h >> 1) % self.buckets as u64) as usize;
        let sign = if h & 1 == 0 { 1.0 } else { -1.0 };
        (row * self.buckets + bucket, sign)
    }

    pub fn update(&mut self, index: usize, value: f64) {
        for row in 0..self.rows {
            let (slot, sign) = self.slot(row, index);
            self.table[slot] += sign * value;
        }
    }

    /// Median over rows of the signed bucket contents.
    pub fn estimate(&self, index: usize) -> f64 {
        let mut votes: Vec<f64> = (0..self.rows)
            .map(|row| {
                let (slot, sign) = self.slot(row, index);
                sign * self.table[slot]
            })
            .collect();
        lower_median(&mut votes).unwrap_or(0.0)
    }

    /// Stored counters at 64 bits each plus the hash seed.
    pub fn size_bits(&self) -> u64 {
        self.table.len() as u64 * 64 + 64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeavyHitter {
    pub index: usize,
    pub estimate: f64,
}

/// Result of one heavy-hitter pass.
#[derive(Debug, Clone, Serialize)]
pub struct HeavyHitterReport {
    pub hitters: Vec<HeavyHitter>,
    /// Estimate of ‖x_{−1/β}‖₁, the mass outside the top ⌈1/β⌉ entries.
    pub tail_estimate: f64,
    pub threshold: f64,
    pub buckets: usize,
    pub rows: usize,
}

/// β-heavy hitters of a sparse vector given as (index, value) pairs.
///
/// Both structures are linear: the Count-Sketch produces point estimates for
/// the listed indices, and a Cauchy sketch of the same vector, minus the
/// Cauchy image of the top ⌈1/β⌉ point estimates, estimates the tail mass that
/// sets the reporting threshold.
pub fn heavy_hitters_sparse<R: Rng + ?Sized>(entries: &[(usize, f64)], beta: f64, rng: &mut R) -> HeavyHitterReport {
    assert!(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1), got {beta}");
    let universe = entries.iter().map(|e| e.0 + 1).max().unwrap_or(1);
    let mut cs = HeavyHitterSketch::new(universe, beta, rng);
    let cauchy = HashedCauchySketch::new(TAIL_SKETCH_ROWS, rng.random());
    for &(i, v) in entries {
        cs.update(i, v);
    }
    let mut image = cauchy.sketch(entries.iter().copied());

    let mut estimates: Vec<HeavyHitter> = entries
        .iter()
        .map(|&(i, _)| HeavyHitter {
            index: i,
            estimate: cs.estimate(i),
        })
        .collect();
    estimates.sort_by(|a, b| b.estimate.abs().total_cmp(&a.estimate.abs()).then(a.index.cmp(&b.index)));
    let top = ((1.0 / beta).ceil() as usize).min(estimates.len());
    let top_image = cauchy.sketch(estimates[..top].iter().map(|h| (h.index, h.estimate)));
    for (y, t) in image.iter_mut().zip(&top_image) {
        *y -= t;
    }
    let tail_estimate = cauchy.l1_estimate_from_image(&image);
    let threshold = REPORT_FRACTION * beta * tail_estimate;
    let mut hitters: Vec<HeavyHitter> = estimates
        .into_iter()
        .filter(|h| h.estimate.abs() >= threshold && h.estimate != 0.0)
        .collect();
    hitters.sort_by_key(|h| h.index);
    HeavyHitterReport {
        hitters,
        tail_estimate,
        threshold,
        buckets: cs.buckets(),
        rows: cs.rows(),
    }
}

/// Dense form: every coordinate of `x` is a candidate.
pub fn heavy_hitters<R: Rng + ?Sized>(x: &[f64], beta: f64, rng: &mut R) -> Vec<HeavyHitter> {
    let entries: Vec<(usize, f64)> = x.iter().copied().enumerate().filter(|e| e.1 != 0.0).collect();
    heavy_hitters_sparse(&entries, beta, rng).hitters
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_spike_is_found() {
        let mut x = vec![0.0; 1000];
        x[1] = 1e6;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let hh = heavy_hitters(&x, 0.01, &mut rng);
        assert_eq!(hh.len(), 1);
        assert_eq!(hh[0].index, 1);
        assert!(hh[0].estimate >= 0.5e6 && hh[0].estimate <= 2e6);
    }

    #[test]
    fn uniform_small_entries_report_nothing_heavy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let x: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
            let l1: f64 = x.iter().sum();
            let beta = 0.01;
            for h in heavy_hitters(&x, beta, &mut rng) {
                assert!(x[h.index] >= 0.5 * beta * l1 * 0.5, "false positive {h:?}");
            }
        }
    }

    #[test]
    fn estimates_within_factor_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>() - 0.5).collect();
        for k in 0..5 {
            x[k * 1000 + 7] = 500.0 * (k + 1) as f64;
        }
        let hh = heavy_hitters(&x, 0.02, &mut rng);
        for k in 0..5 {
            let i = k * 1000 + 7;
            let h = hh.iter().find(|h| h.index == i).expect("spike missed");
            assert!(h.estimate >= x[i] / 2.0 && h.estimate <= 2.0 * x[i]);
        }
    }
}
