//! ℓ₁ subspace sketch for n × 2 matrices via 1-D weighted 1-median coresets.
//!
//! Split the rows by the sign of A_{i,1}. For a row with A_{i,1} > 0 and x₂ ≠ 0,
//! |A_{i,1}x₁ + A_{i,2}x₂| = |x₂|·A_{i,1}·|x₁/x₂ − (−A_{i,2}/A_{i,1})|, so the
//! positive block is a weighted 1-median cost with center x₁/x₂; the negative
//! block is the same with |A_{i,1}|; rows with A_{i,1} = 0 contribute
//! |x₂|·|A_{i,2}|. A small coreset for each 1-D instance is therefore a sketch.

use crate::error::{invalid, Result};
use crate::matrix::QueryMatrix;
use serde::Serialize;

/// Weighted points whose 1-median cost approximates that of the input.
#[derive(Debug, Clone, Serialize)]
pub struct Coreset1D {
    pub points: Vec<(f64, f64)>,
    pub epsilon: f64,
    pub total_weight: f64,
}

impl Coreset1D {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Σ w·|p − c| over the coreset.
    pub fn cost(&self, c: f64) -> f64 {
        cost(&self.points, c)
    }

    /// Each point costs a position and a weight.
    pub fn size_bits(&self) -> u64 {
        self.points.len() as u64 * 128
    }
}

/// Σ w·|p − c|.
pub fn cost(points: &[(f64, f64)], c: f64) -> f64 {
    points.iter().map(|&(p, w)| w * (p - c).abs()).sum()
}

/// Smallest position whose cumulative weight reaches half the total.
fn weighted_median(sorted: &[(f64, f64)], total: f64) -> f64 {
    let mut acc = 0.0;
    for &(p, w) in sorted {
        acc += w;
        if acc >= 0.5 * total {
            return p;
        }
    }
    sorted.last().map(|e| e.0).unwrap_or(0.0)
}

/// Ring snapping around the weighted median m.
///
/// Points within r₀ = ε·cost(m)/(4W) of m form the inner ring on each side;
/// beyond it, ring k on each side covers distances (r₀(1+ε/4)^k, r₀(1+ε/4)^{k+1}].
/// Each ring becomes one point at its weighted mean carrying its total weight.
/// Moving a point inside its ring shifts any cost by at most its displacement,
/// which is ≤ r₀ in the inner ring and ≤ (ε/4)·|p − m| outside it. The total
/// error is then ≤ W·r₀ + (ε/4)·cost(m) = (ε/2)·cost(m) ≤ (ε/2)·cost(c) for
/// every center c, since m minimizes the cost.
pub fn build_coreset_1d(points: &[f64], weights: &[f64], eps: f64) -> Result<Coreset1D> {
    if points.len() != weights.len() {
        return Err(crate::Error::DimensionMismatch {
            expected: points.len(),
            actual: weights.len(),
        });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("coreset accuracy must lie in (0, 1), got {eps}"));
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return invalid(format!("coreset weights must be positive, got {w}"));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return invalid(format!("coreset positions must be finite, got {p}"));
    }
    let mut sorted: Vec<(f64, f64)> = points.iter().copied().zip(weights.iter().copied()).collect();
    if sorted.is_empty() {
        return Ok(Coreset1D {
            points: Vec::new(),
            epsilon: eps,
            total_weight: 0.0,
        });
    }
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = sorted.iter().map(|e| e.1).sum();
    let m = weighted_median(&sorted, total);
    let cost_m = cost(&sorted, m);
    if cost_m == 0.0 {
        return Ok(Coreset1D {
            points: vec![(m, total)],
            epsilon: eps,
            total_weight: total,
        });
    }
    let r0 = eps * cost_m / (4.0 * total);
    let growth = (1.0 + eps / 4.0).ln();
    let ring = |p: f64| -> (i8, i64) {
        let dist = (p - m).abs();
        let side = if p < m { -1 } else { 1 };
        if dist <= r0 {
            return (side, -1);
        }
        let k = ((dist / r0).ln() / growth).ceil() as i64 - 1;
        (side, k.max(0))
    };
    // sorted positions keep each ring's members contiguous on each side
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut current: Option<((i8, i64), f64, f64)> = None;
    for &(p, w) in &sorted {
        let key = ring(p);
        match current.as_mut() {
            Some((k, mass, moment)) if *k == key => {
                *mass += w;
                *moment += w * p;
            }
            _ => {
                if let Some((_, mass, moment)) = current.take() {
                    out.push((moment / mass, mass));
                }
                current = Some((key, w, w * p));
            }
        }
    }
    if let Some((_, mass, moment)) = current {
        out.push((moment / mass, mass));
    }
    Ok(Coreset1D {
        points: out,
        epsilon: eps,
        total_weight: total,
    })
}

/// Sketch of an n × 2 matrix answering ‖Ax‖₁.
#[derive(Debug, Clone, Serialize)]
pub struct L1Sketch2D {
    pub plus: Coreset1D,
    pub minus: Coreset1D,
    /// Σ |A_{i,2}| over rows with A_{i,1} = 0.
    pub zero_col2_sum: f64,
    /// Σ |A_{i,1}| over all rows, for queries with x₂ = 0.
    pub col1_abs_sum: f64,
}

impl L1Sketch2D {
    pub fn size_bits(&self) -> u64 {
        self.plus.size_bits() + self.minus.size_bits() + 128
    }

    pub fn query(&self, x: [f64; 2]) -> f64 {
        query_l1_2d(self, x)
    }
}

/// Splits A into A⁺, A⁻, A⁰ and builds one coreset for each signed block.
pub fn build_l1_2d_sketch(a: &QueryMatrix, eps: f64) -> Result<L1Sketch2D> {
    if a.d() != 2 {
        return invalid(format!("the 2-D sketch needs d = 2, got d = {}", a.d()));
    }
    let (mut pp, mut pw, mut mp, mut mw) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut zero_col2_sum = 0.0;
    let mut col1_abs_sum = 0.0;
    for row in a.rows() {
        let (a1, a2) = (row[0], row[1]);
        col1_abs_sum += a1.abs();
        if a1 > 0.0 {
            pp.push(-a2 / a1);
            pw.push(a1);
        } else if a1 < 0.0 {
            mp.push(-a2 / a1);
            mw.push(-a1);
        } else {
            zero_col2_sum += a2.abs();
        }
    }
    Ok(L1Sketch2D {
        plus: build_coreset_1d(&pp, &pw, eps)?,
        minus: build_coreset_1d(&mp, &mw, eps)?,
        zero_col2_sum,
        col1_abs_sum,
    })
}

/// |x₂|·(cost⁺(x₁/x₂) + cost⁻(x₁/x₂) + Σ|A⁰_{i,2}|), or |x₁|·Σ|A_{i,1}| when x₂ = 0.
pub fn query_l1_2d(sketch: &L1Sketch2D, x: [f64; 2]) -> f64 {
    let [x1, x2] = x;
    if x2 == 0.0 {
        return x1.abs() * sketch.col1_abs_sum;
    }
    let c = x1 / x2;
    x2.abs() * (sketch.plus.cost(c) + sketch.minus.cost(c) + sketch.zero_col2_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_point() {
        let c = build_coreset_1d(&[5.0], &[2.0], 0.1).unwrap();
        assert_eq!(c.points, vec![(5.0, 2.0)]);
        assert_eq!(c.cost(3.0), 4.0);
    }

    #[test]
    fn symmetric_pair() {
        let c = build_coreset_1d(&[-1.0, 1.0], &[1.0, 1.0], 0.1).unwrap();
        assert_eq!(c.cost(0.0), 2.0);
    }

    #[test]
    fn empty_input_is_empty_coreset() {
        let c = build_coreset_1d(&[], &[], 0.1).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.cost(1.0), 0.0);
    }

    #[test]
    fn bad_weights_are_rejected() {
        assert!(build_coreset_1d(&[1.0], &[0.0], 0.1).is_err());
        assert!(build_coreset_1d(&[1.0, 2.0], &[1.0], 0.1).is_err());
    }

    #[test]
    fn small_matrices() {
        let a = QueryMatrix::from_integers(2, 2, 1.0, vec![1, 1, 1, -1]).unwrap();
        let s = build_l1_2d_sketch(&a, 0.1).unwrap();
        assert!((s.query([2.0, 1.0]) - 4.0).abs() < 1e-12);
        assert_eq!(s.query([0.0, 0.0]), 0.0);
        let b = QueryMatrix::from_integers(1, 2, 1.0, vec![2, 7]).unwrap();
        assert_eq!(build_l1_2d_sketch(&b, 0.1).unwrap().query([1.0, 0.0]), 2.0);
        let z = QueryMatrix::from_integers(3, 2, 1.0, vec![0, 1, 0, -4, 0, 2]).unwrap();
        assert_eq!(build_l1_2d_sketch(&z, 0.1).unwrap().query([3.0, -2.0]), 14.0);
        assert!(build_l1_2d_sketch(&QueryMatrix::from_integers(1, 3, 1.0, vec![1, 2, 3]).unwrap(), 0.1).is_err());
    }

    proptest! {
        #[test]
        fn coreset_is_within_half_eps(
            pts in proptest::collection::vec((-100.0f64..100.0, 0.01f64..10.0), 1..300),
            eps in 0.02f64..0.5,
            c in -300.0f64..300.0,
        ) {
            let (p, w): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
            let core = build_coreset_1d(&p, &w, eps).unwrap();
            let exact = cost(&pts, c);
            prop_assert!((core.cost(c) - exact).abs() <= 0.5 * eps * exact + 1e-9 * exact.max(1.0));
            prop_assert!((core.total_weight - w.iter().sum::<f64>()).abs() < 1e-9 * core.total_weight);
        }

        #[test]
        fn query_is_homogeneous(
            rows in proptest::collection::vec((-50i64..50, -50i64..50), 1..60),
            x1 in -10.0f64..10.0, x2 in -10.0f64..10.0, c in -5.0f64..5.0,
        ) {
            let ints: Vec<i64> = rows.iter().flat_map(|&(a, b)| [a, b]).collect();
            let a = QueryMatrix::from_integers(rows.len(), 2, 0.1, ints).unwrap();
            let s = build_l1_2d_sketch(&a, 0.1).unwrap();
            let lhs = s.query([c * x1, c * x2]);
            let rhs = c.abs() * s.query([x1, x2]);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }
    }
}
