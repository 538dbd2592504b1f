use crate::error::{invalid, Error, Result};
use crate::matrix::QueryMatrix;
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

const MAX_ITERATIONS: usize = 500;
/// Iteration stops here; the sum Σw = d is only as tight as the distance to
/// the fixed point, which can exceed the residual by the contraction factor.
const TARGET: f64 = 1e-12;
/// Largest residual accepted when the iteration budget runs out.
const TOLERANCE: f64 = 1e-8;

/// ℓ_p Lewis weights: the fixed point w_i = (a_iᵀ(AᵀW^{1−2/p}A)^{−1}a_i)^{p/2}.
#[derive(Debug, Clone, Serialize)]
pub struct LewisWeights {
    pub p: f64,
    pub w: Vec<f64>,
    pub iterations: usize,
    /// max_i |w_i − update(w)_i| at the returned weights.
    pub residual: f64,
}

impl LewisWeights {
    pub fn sum(&self) -> f64 {
        self.w.iter().sum()
    }
}

/// One application of the fixed-point map.
fn update(a: &DMatrix<f64>, w: &[f64], p: f64) -> Result<Vec<f64>> {
    let (n, d) = a.shape();
    let mut g = DMatrix::<f64>::zeros(d, d);
    for i in 0..n {
        let s = w[i].powf(1.0 - 2.0 / p);
        let row = a.row(i);
        g += s * row.transpose() * row;
    }
    let chol = g.cholesky().ok_or(Error::RankDeficient)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let ai: DVector<f64> = a.row(i).transpose();
        let tau = ai.dot(&chol.solve(&ai)).max(0.0);
        out.push(tau.powf(p / 2.0));
    }
    Ok(out)
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Iterates the fixed-point map from w = (d/n)·1, halving the step whenever
/// the residual grows, until the residual is ≤ 1e−12 (≤ 1e−8 is accepted if
/// the iteration budget runs out first).
pub fn compute_lewis_weights(a: &QueryMatrix, p: f64) -> Result<LewisWeights> {
    if !(p > 0.0 && p < 4.0) {
        return invalid(format!("Lewis weights need p in (0, 4), got {p}"));
    }
    let (n, d) = (a.n(), a.d());
    if n < d {
        return Err(Error::RankDeficient);
    }
    let m = a.to_dmatrix();
    if m.clone().svd(false, false).singular_values.min() <= 1e-12 * m.norm() {
        return Err(Error::RankDeficient);
    }
    let mut w = vec![d as f64 / n as f64; n];
    let mut next = update(&m, &w, p)?;
    let mut residual = max_gap(&w, &next);
    let mut damped = false;
    for iteration in 1..=MAX_ITERATIONS {
        if residual <= TARGET {
            return Ok(LewisWeights {
                p,
                w,
                iterations: iteration - 1,
                residual,
            });
        }
        let candidate: Vec<f64> = if damped {
            w.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect()
        } else {
            next.clone()
        };
        let candidate_next = update(&m, &candidate, p)?;
        let candidate_residual = max_gap(&candidate, &candidate_next);
        damped = candidate_residual > residual;
        w = candidate;
        next = candidate_next;
        residual = candidate_residual;
    }
    if residual <= TOLERANCE {
        return Ok(LewisWeights {
            p,
            w,
            iterations: MAX_ITERATIONS,
            residual,
        });
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// Leverage scores ‖row i of Q‖² from a thin QR factorization A = QR.
pub fn leverage_scores(a: &QueryMatrix) -> Vec<f64> {
    let q = a.to_dmatrix().qr().q();
    (0..q.nrows()).map(|i| q.row(i).norm_squared()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, d: usize, seed: u64) -> QueryMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ints = (0..n * d).map(|_| rng.random_range(-1000..=1000)).collect();
        QueryMatrix::from_integers(n, d, 0.001, ints).unwrap()
    }

    #[test]
    fn identity_has_unit_weights() {
        let a = QueryMatrix::from_integers(3, 3, 1.0, vec![1, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        for &p in &[1.0, 2.0, 3.0] {
            let lw = compute_lewis_weights(&a, p).unwrap();
            for w in lw.w {
                assert!((w - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn p2_is_leverage() {
        let a = random_matrix(40, 4, 5);
        let lw = compute_lewis_weights(&a, 2.0).unwrap();
        for (w, l) in lw.w.iter().zip(leverage_scores(&a)) {
            assert!((w - l).abs() < 1e-8);
        }
    }

    #[test]
    fn weights_sum_to_d() {
        for (k, &p) in [0.5, 1.0, 1.5, 3.0, 3.8].iter().enumerate() {
            let lw = compute_lewis_weights(&random_matrix(60, 5, k as u64), p).unwrap();
            assert!((lw.sum() - 5.0).abs() < 1e-6, "p = {p}: {}", lw.sum());
            assert!(lw.residual <= 1e-8);
        }
    }

    #[test]
    fn rank_deficiency_and_range_are_rejected() {
        let a = QueryMatrix::from_integers(3, 2, 1.0, vec![1, 2, 2, 4, 3, 6]).unwrap();
        assert!(matches!(compute_lewis_weights(&a, 1.0), Err(Error::RankDeficient)));
        assert!(compute_lewis_weights(&random_matrix(10, 2, 1), 4.0).is_err());
    }
}
