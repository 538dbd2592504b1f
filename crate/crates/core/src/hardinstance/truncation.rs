use crate::error::{invalid, Result};
use crate::spectrum::{GridSpectrum, SpectralLevel};
use crate::transform::fwht_in_place;

/// Anything that can hand out rows of an n × n matrix on demand.
pub trait RowSource {
    fn num_rows(&self) -> usize;
    fn row(&self, i: usize) -> Vec<f64>;
}

/// Dense row-major rows, mainly for tests and small examples.
#[derive(Debug, Clone)]
pub struct DenseRows {
    pub n: usize,
    pub data: Vec<f64>,
}

impl RowSource for DenseRows {
    fn num_rows(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> Vec<f64> {
        let cols = self.data.len() / self.n;
        self.data[i * cols..(i + 1) * cols].to_vec()
    }
}

/// M̃ = H·diag(λ restricted to one spectral level)·Hᵀ, never materialized.
///
/// Characters whose weight lies outside the level get eigenvalue 0; the kept
/// ones keep their signed eigenvalue, all of magnitude `level.sigma`.
#[derive(Debug, Clone)]
pub struct TruncatedKernel {
    d: usize,
    level: SpectralLevel,
    /// Kept eigenvalue per character, indexed by character.
    diag: Vec<f64>,
}

/// Truncates to the level of Λ₀; rejects spectra where Λ₀ is absent or zero.
pub fn truncate_spectrum(spec: &GridSpectrum) -> Result<TruncatedKernel> {
    if spec.d % 2 == 1 {
        return invalid(format!("spectrum truncation needs even d, got {}", spec.d));
    }
    match spec.lambda0_level() {
        Some(level) => truncate_to_level(spec, &level),
        None => invalid(format!(
            "Λ₀ vanishes at d = {} for {:?}; no level to truncate to",
            spec.d, spec.kernel
        )),
    }
}

/// Truncates to an arbitrary nonzero level of the spectrum.
pub fn truncate_to_level(spec: &GridSpectrum, level: &SpectralLevel) -> Result<TruncatedKernel> {
    if level.weights.is_empty() || level.sigma == 0.0 {
        return invalid("cannot truncate to an empty or zero level");
    }
    if spec.d > 20 {
        return invalid(format!("truncated kernels are materialized up to d = 20, got {}", spec.d));
    }
    let n = 1usize << spec.d;
    let mut keep = vec![false; spec.d + 1];
    for &w in &level.weights {
        keep[w] = true;
    }
    let diag = (0..n)
        .map(|s| {
            let w = (s as u64).count_ones() as usize;
            if keep[w] {
                spec.by_weight[w]
            } else {
                0.0
            }
        })
        .collect();
    Ok(TruncatedKernel {
        d: spec.d,
        level: level.clone(),
        diag,
    })
}

impl TruncatedKernel {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> &SpectralLevel {
        &self.level
    }

    /// Rank r = number of kept characters.
    pub fn rank(&self) -> usize {
        self.level.multiplicity
    }

    /// Common ℓ₂ norm of every row, σ·√(r/n).
    pub fn row_norm(&self) -> f64 {
        self.level.sigma * (self.rank() as f64 / self.diag.len() as f64).sqrt()
    }

    /// M̃·v with two transforms.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.diag.len(), "vector length must be 2^d");
        let n = self.diag.len() as f64;
        let mut u = v.to_vec();
        fwht_in_place(&mut u);
        for (x, &l) in u.iter_mut().zip(&self.diag) {
            *x *= l / n;
        }
        fwht_in_place(&mut u);
        u
    }
}

impl RowSource for TruncatedKernel {
    fn num_rows(&self) -> usize {
        self.diag.len()
    }

    /// Row i = M̃·e_i (M̃ is symmetric).
    fn row(&self, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.diag.len()];
        e[i] = 1.0;
        self.apply(&e)
    }
}
