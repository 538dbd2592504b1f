use super::truncation::RowSource;
use crate::error::{Error, Result};
use serde::Serialize;

/// Fraction of a row's squared norm its residual must keep to be selected.
pub const KEEP_FRACTION: f64 = 0.99;

/// Rows of M̃ whose residuals against each other are nearly full length.
#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalizedRows {
    pub indices: Vec<usize>,
    /// R_i for each selected index, in selection order.
    #[serde(skip)]
    pub residuals: Vec<Vec<f64>>,
    /// Common ‖M̃_i‖₂ = σ√(r/n).
    pub row_norm: f64,
}

/// Worst violations of the two selection invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OrthogonalityReport {
    /// max over i ≠ j of |⟨R_i, R_j⟩| / (‖R_i‖‖R_j‖).
    pub max_cosine: f64,
    /// min over i of ‖R_i‖² / row_norm².
    pub min_kept_fraction: f64,
}

impl OrthogonalizedRows {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn check(&self) -> OrthogonalityReport {
        let norms: Vec<f64> = self.residuals.iter().map(|r| dot(r, r).sqrt()).collect();
        let mut max_cosine: f64 = 0.0;
        for a in 0..self.residuals.len() {
            for b in a + 1..self.residuals.len() {
                let c = dot(&self.residuals[a], &self.residuals[b]).abs() / (norms[a] * norms[b]);
                max_cosine = max_cosine.max(c);
            }
        }
        let min_kept_fraction = norms
            .iter()
            .map(|n| n * n / (self.row_norm * self.row_norm))
            .fold(f64::INFINITY, f64::min);
        OrthogonalityReport {
            max_cosine,
            min_kept_fraction,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greedy selection of ⌊r/100⌋ rows.
///
/// Scans rows in index order and keeps a row when its component orthogonal to
/// the kept residuals retains more than 99% of its squared norm. Residual norms
/// only shrink as rows are kept, so a row rejected once never qualifies later
/// and one pass returns exactly the smallest-index-first greedy choice.
pub fn orthogonalize_rows<S: RowSource + ?Sized>(source: &S, r: usize, sigma: f64) -> Result<OrthogonalizedRows> {
    let n = source.num_rows();
    let target = r / 100;
    let row_norm = sigma * (r as f64 / n as f64).sqrt();
    let mut indices = Vec::with_capacity(target);
    let mut residuals: Vec<Vec<f64>> = Vec::with_capacity(target);
    let mut units: Vec<Vec<f64>> = Vec::with_capacity(target);
    let mut i = 0;
    while indices.len() < target && i < n {
        let row = source.row(i);
        let full = dot(&row, &row);
        if full > 0.0 {
            let mut s = row;
            // two Gram–Schmidt sweeps keep the residuals orthogonal to rounding
            for _ in 0..2 {
                for u in &units {
                    let c = dot(&s, u);
                    for (x, y) in s.iter_mut().zip(u) {
                        *x -= c * y;
                    }
                }
            }
            let kept = dot(&s, &s);
            if kept > KEEP_FRACTION * full {
                let inv = 1.0 / kept.sqrt();
                units.push(s.iter().map(|v| v * inv).collect());
                residuals.push(s);
                indices.push(i);
            }
        }
        i += 1;
    }
    if indices.len() < target {
        return Err(Error::InvariantViolation(format!(
            "only {} of {target} qualifying rows among {n}",
            indices.len()
        )));
    }
    Ok(OrthogonalizedRows {
        indices,
        residuals,
        row_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardinstance::truncation::{truncate_to_level, DenseRows};
    use crate::kernel::KernelFunction;
    use crate::spectrum::fourier_spectrum;

    #[test]
    fn scaled_partial_identity() {
        // σ on the first r diagonal entries of a 512 × 512 matrix
        let (n, r, sigma) = (512usize, 300usize, 2.5);
        let mut data = vec![0.0; n * n];
        for k in 0..r {
            data[k * n + k] = sigma;
        }
        let rows = orthogonalize_rows(&DenseRows { n, data }, r, sigma).unwrap();
        assert_eq!(rows.indices, vec![0, 1, 2]);
        for (k, res) in rows.residuals.iter().enumerate() {
            assert_eq!(res[k], sigma);
        }
    }

    #[test]
    fn d10_recovery_level_satisfies_invariants() {
        let spec = fourier_spectrum(&KernelFunction::power(1.0), 10).unwrap();
        let level = spec.recovery_level().unwrap();
        let t = truncate_to_level(&spec, &level).unwrap();
        let rows = orthogonalize_rows(&t, level.multiplicity, level.sigma).unwrap();
        assert_eq!(rows.len(), level.multiplicity / 100);
        assert!(rows.len() >= 2);
        let report = rows.check();
        assert!(report.max_cosine <= 1e-8);
        assert!(report.min_kept_fraction >= 0.99);
    }

    #[test]
    fn rank_below_one_hundred_selects_nothing() {
        let spec = fourier_spectrum(&KernelFunction::power(1.0), 8).unwrap();
        let level = spec.lambda0_level().unwrap();
        let t = truncate_to_level(&spec, &level).unwrap();
        assert!(orthogonalize_rows(&t, level.multiplicity, level.sigma).unwrap().is_empty());
    }
}
