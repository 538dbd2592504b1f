use super::orthogonal::{orthogonalize_rows, OrthogonalizedRows};
use super::truncation::{truncate_to_level, TruncatedKernel};
use crate::error::{invalid, Error, Result};
use crate::kernel::KernelFunction;
use crate::matrix::QueryMatrix;
use crate::spectrum::{binomial, fourier_spectrum, GridSpectrum, SpectralLevel};
use rand::Rng;
use serde::Serialize;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 16;
/// Sign draws allowed before giving up on ‖x‖_∞ ≤ 3√d.
pub const MAX_RESAMPLES: usize = 100;

/// Everything about a hard instance that does not depend on the planted signs.
///
/// Building this is the expensive part (spectrum, truncation, greedy selection);
/// it is shared by every trial at the same (d, p).
#[derive(Debug, Clone)]
pub struct HardInstanceTemplate {
    pub d: usize,
    pub p: f64,
    pub spectrum: GridSpectrum,
    /// Level the bits are planted in: Λ₀'s when nonzero, see [`GridSpectrum::recovery_level`].
    pub level: SpectralLevel,
    pub rows: OrthogonalizedRows,
    /// Δ = 5√d.
    pub shift: f64,
    /// δ, the rounding grid of ỹ.
    pub grain: f64,
    /// ⟨M_i, 1⟩, the same for every row.
    pub row_sum: f64,
    truncated: TruncatedKernel,
    units: Vec<Vec<f64>>,
    /// |d − 2k|^p indexed by Hamming distance k.
    profile: Vec<f64>,
}

/// The rounding grid δ.
///
/// Rounding y to δ moves y^p by at most p·ξ^{p−1}·δ/2 with ξ^p ∈ [2√d, 8√d];
/// ξ^{p−1} peaks at the top of that range when p ≥ 1 and at the bottom when
/// p < 1, and δ is sized so the move is at most 2^{−d−1}.
pub fn grain_for(d: usize, p: f64) -> f64 {
    let sd = (d as f64).sqrt();
    let peak = if p >= 1.0 { 8.0 * sd } else { 2.0 * sd };
    1.0 / (p * peak.powf(1.0 - 1.0 / p) * 2f64.powi(d as i32))
}

impl HardInstanceTemplate {
    pub fn new(d: usize, p: f64) -> Result<Self> {
        if d % 2 == 1 || !(MIN_DIM..=MAX_DIM).contains(&d) {
            return invalid(format!("hard instances need even d in {MIN_DIM}..={MAX_DIM}, got {d}"));
        }
        if !(p > 0.0 && p.is_finite()) || (p.fract() == 0.0 && (p as u64) % 2 == 0) {
            return invalid(format!("hard instances need p > 0 not an even integer, got {p}"));
        }
        let kernel = KernelFunction::power(p);
        let spectrum = fourier_spectrum(&kernel, d)?;
        let level = spectrum
            .recovery_level()
            .ok_or_else(|| Error::InvalidInput(format!("no nonzero spectral level at d = {d}, p = {p}")))?;
        let truncated = truncate_to_level(&spectrum, &level)?;
        let rows = orthogonalize_rows(&truncated, level.multiplicity, level.sigma)?;
        let units = rows
            .residuals
            .iter()
            .map(|r| {
                let inv = 1.0 / r.iter().map(|v| v * v).sum::<f64>().sqrt();
                r.iter().map(|v| v * inv).collect()
            })
            .collect();
        let profile: Vec<f64> = (0..=d).map(|k| kernel.eval(d as f64 - 2.0 * k as f64)).collect();
        let row_sum = profile
            .iter()
            .enumerate()
            .map(|(k, g)| binomial(d, k) as f64 * g)
            .sum();
        Ok(Self {
            d,
            p,
            spectrum,
            level,
            rows,
            shift: 5.0 * (d as f64).sqrt(),
            grain: grain_for(d, p),
            row_sum,
            truncated,
            units,
            profile,
        })
    }

    /// Planted bit positions R.
    pub fn bit_indices(&self) -> &[usize] {
        &self.rows.indices
    }

    pub fn truncated(&self) -> &TruncatedKernel {
        &self.truncated
    }

    /// Signed Λ₀ (zero when d ≡ 2 mod 4).
    pub fn lambda0(&self) -> f64 {
        match self.spectrum.lambda0 {
            Some(l) if !self.spectrum.is_negligible(l) => l,
            _ => 0.0,
        }
    }

    /// 0.1·σ·√(N/2^d): the additive error the decoder tolerates.
    pub fn additive_threshold(&self) -> f64 {
        0.1 * self.rows.row_norm
    }

    /// Largest ε for which ε·‖Ai‖_p^p stays below the additive threshold for
    /// every query, using ‖Ai‖_p^p ≤ 2^d(8d^{1.5})^p.
    pub fn multiplicative_threshold(&self) -> f64 {
        let d = self.d as f64;
        self.additive_threshold() / (2f64.powi(self.d as i32) * (8.0 * d.powf(1.5)).powf(self.p))
    }

    /// x = Σ s_i R_i/‖R_i‖ for the given signs (one per planted index).
    pub fn planted_vector(&self, signs: &[i8]) -> Vec<f64> {
        let mut x = vec![0.0; 1 << self.d];
        for (u, &s) in self.units.iter().zip(signs) {
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi += s as f64 * ui;
            }
        }
        x
    }

    /// Draws signs until ‖x‖_∞ ≤ 3√d.
    pub fn instantiate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<HardInstance> {
        for attempt in 0..MAX_RESAMPLES {
            let signs: Vec<i8> = (0..self.rows.len())
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect();
            match self.instantiate_with_signs(&signs) {
                Ok(mut inst) => {
                    inst.resamples = attempt;
                    return Ok(inst);
                }
                Err(Error::InvalidInput(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::Aborted(format!(
            "‖x‖∞ exceeded 3√d in {MAX_RESAMPLES} consecutive sign draws (d = {}, p = {})",
            self.d, self.p
        )))
    }

    pub fn instantiate_with_signs(&self, signs: &[i8]) -> Result<HardInstance> {
        if signs.len() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rows.len(),
                actual: signs.len(),
            });
        }
        let x = self.planted_vector(signs);
        let bound = 3.0 * (self.d as f64).sqrt();
        let x_inf = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if x_inf > bound {
            return invalid(format!("‖x‖∞ = {x_inf} exceeds 3√d = {bound}"));
        }
        let d = self.d;
        let mut ytilde = Vec::with_capacity(x.len());
        let mut ints = Vec::with_capacity(x.len() * d);
        for (j, &xj) in x.iter().enumerate() {
            let y = (xj + self.shift).powf(1.0 / self.p);
            let k = (y / self.grain).round() as i64;
            ytilde.push(k);
            for c in 0..d {
                let negative = (j >> (d - 1 - c)) & 1 == 1;
                ints.push(if negative { -k } else { k });
            }
        }
        let a = QueryMatrix::from_integers(x.len(), d, self.grain, ints)?;
        let ytilde_p = ytilde
            .iter()
            .map(|&k| (k as f64 * self.grain).powf(self.p))
            .collect();
        Ok(HardInstance {
            d,
            p: self.p,
            signs: self.rows.indices.iter().copied().zip(signs.iter().copied()).collect(),
            shift: self.shift,
            grain: self.grain,
            x,
            ytilde,
            ytilde_p,
            a,
            row_sum: self.row_sum,
            resamples: 0,
            profile: self.profile.clone(),
        })
    }
}

/// A planted instance: A's j-th row is ỹ_j times the j-th cube vector.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub d: usize,
    pub p: f64,
    /// (i, s_i) for every planted index, in selection order.
    pub signs: Vec<(usize, i8)>,
    pub shift: f64,
    pub grain: f64,
    pub x: Vec<f64>,
    /// ỹ_j / δ as exact integers.
    pub ytilde: Vec<i64>,
    pub a: QueryMatrix,
    pub row_sum: f64,
    /// Sign draws rejected before this one.
    pub resamples: usize,
    ytilde_p: Vec<f64>,
    profile: Vec<f64>,
}

/// Worst-case values of the instance invariants.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InstanceReport {
    pub min_ytilde_p: f64,
    pub max_ytilde_p: f64,
    pub max_rounding_error: f64,
    pub x_inf: f64,
    /// max over all 2^d cube queries of ‖Ai‖_p^p.
    pub max_query_value: f64,
    pub query_bound: f64,
    pub ok: bool,
}

impl HardInstance {
    pub fn ytilde_value(&self, j: usize) -> f64 {
        self.ytilde[j] as f64 * self.grain
    }

    /// ‖A·(cube vector i)‖_p^p = Σ_j ỹ_j^p·|⟨i, j⟩|^p.
    pub fn exact_answer(&self, i: usize) -> f64 {
        self.ytilde_p
            .iter()
            .enumerate()
            .map(|(j, y)| y * self.profile[(i ^ j).count_ones() as usize])
            .sum()
    }

    pub fn sign_of(&self, i: usize) -> Option<i8> {
        self.signs.iter().find(|e| e.0 == i).map(|e| e.1)
    }

    pub fn check(&self) -> InstanceReport {
        let d = self.d as f64;
        let sd = d.sqrt();
        let tol = 2f64.powi(-(self.d as i32));
        let mut min_y = f64::INFINITY;
        let mut max_y = 0.0f64;
        let mut max_err = 0.0f64;
        for (j, &y) in self.ytilde_p.iter().enumerate() {
            min_y = min_y.min(y);
            max_y = max_y.max(y);
            max_err = max_err.max((y - (self.x[j] + self.shift)).abs());
        }
        let x_inf = self.x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let max_query_value = (0..self.x.len()).map(|i| self.exact_answer(i)).fold(0.0, f64::max);
        let query_bound = 2f64.powi(self.d as i32) * (8.0 * d.powf(1.5)).powf(self.p);
        let ok = min_y >= 2.0 * sd
            && max_y <= 8.0 * sd + tol
            && max_err <= tol
            && x_inf <= 3.0 * sd
            && max_query_value <= query_bound;
        InstanceReport {
            min_ytilde_p: min_y,
            max_ytilde_p: max_y,
            max_rounding_error: max_err,
            x_inf,
            max_query_value,
            query_bound,
            ok,
        }
    }
}

/// sign(answer − Δ·⟨M_i, 1⟩), with a zero difference read as +1.
pub fn recover_bit(answer: f64, instance: &HardInstance, _i: usize) -> i8 {
    if answer - instance.shift * instance.row_sum >= 0.0 {
        1
    } else {
        -1
    }
}

/// Builds a template and plants one random instance.
pub fn build_hard_instance<R: Rng + ?Sized>(d: usize, p: f64, rng: &mut R) -> Result<HardInstance> {
    HardInstanceTemplate::new(d, p)?.instantiate(rng)
}

/// Block-diagonal stack of independent instances sharing (d, p) and grain.
#[derive(Debug, Clone)]
pub struct BlockInstance {
    pub blocks: Vec<HardInstance>,
    pub a: QueryMatrix,
}

impl BlockInstance {
    pub fn new(blocks: Vec<HardInstance>) -> Result<Self> {
        let mats: Vec<QueryMatrix> = blocks.iter().map(|b| b.a.clone()).collect();
        let a = QueryMatrix::block_diagonal(&mats)?;
        Ok(Self { blocks, a })
    }

    /// Cube vector i placed in block k's columns, zeros elsewhere.
    pub fn query_vector(&self, block: usize, i: usize) -> Vec<f64> {
        let d = self.blocks[0].d;
        let mut q = vec![0.0; d * self.blocks.len()];
        for c in 0..d {
            q[block * d + c] = if (i >> (d - 1 - c)) & 1 == 1 { -1.0 } else { 1.0 };
        }
        q
    }
}
