//! Small numeric helpers shared by the estimators and experiments.

use rand::Rng;
use std::f64::consts::PI;

/// Lower-middle order statistic; `None` for an empty slice.
pub fn lower_median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let k = (values.len() - 1) / 2;
    let (_, m, _) = values.select_nth_unstable_by(k, |a, b| a.total_cmp(b));
    Some(*m)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}

/// Standard symmetric p-stable sample (characteristic function e^{−|t|^p}),
/// by the Chambers–Mallows–Stuck method.
pub fn sample_stable<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    if p == 1.0 {
        return v.tan();
    }
    let w = -(1.0 - rng.random::<f64>()).ln();
    let a = (p * v).sin() / v.cos().powf(1.0 / p);
    let b = ((v * (1.0 - p)).cos() / w).powf((1.0 - p) / p);
    a * b
}

/// Standard Cauchy variate from a uniform in [0, 1).
#[inline]
pub fn cauchy_from_uniform(u: f64) -> f64 {
    (PI * (u - 0.5)).tan()
}

/// 64-bit mixer used for hash-derived pseudo-random entries.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in (0, 1) from a hash value.
#[inline]
pub fn unit_from_hash(h: u64) -> f64 {
    ((h >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn median_conventions() {
        assert_eq!(lower_median(&mut []), None);
        assert_eq!(lower_median(&mut [3.0]), Some(3.0));
        assert_eq!(lower_median(&mut [4.0, 1.0, 3.0, 2.0]), Some(2.0));
        assert_eq!(lower_median(&mut [5.0, 1.0, 3.0]), Some(3.0));
    }

    #[test]
    fn stable_samples_have_expected_median() {
        // median |Cauchy| = 1; median |N(0, 2)| = √2 · 0.67449
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut c: Vec<f64> = (0..200_000).map(|_| sample_stable(1.0, &mut rng).abs()).collect();
        assert!((lower_median(&mut c).unwrap() - 1.0).abs() < 0.02);
        let mut g: Vec<f64> = (0..200_000).map(|_| sample_stable(2.0, &mut rng).abs()).collect();
        let target = 2f64.sqrt() * 0.674_489_750_196_081_7;
        assert!((lower_median(&mut g).unwrap() - target).abs() < 0.02);
    }
}
