use super::instance::{recover_bit, HardInstanceTemplate};
use crate::error::Result;
use crate::matrix::condition_number;
use crate::rng::RngStream;
use rayon::prelude::*;
use serde::Serialize;

/// How the oracle's answer to ‖Ai‖_p^p is corrupted before decoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    Exact,
    /// Shift of the given magnitude, always toward the wrong decision.
    AdditiveAdversarial { magnitude: f64 },
    /// Any answer in [v, (1+ε)v]; the adversary picks the end that fights the
    /// planted sign, which only helps it when s_i = −1.
    Multiplicative { epsilon: f64 },
}

impl NoiseModel {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseModel::Exact => "exact",
            NoiseModel::AdditiveAdversarial { .. } => "additive",
            NoiseModel::Multiplicative { .. } => "multiplicative",
        }
    }

    pub fn corrupt(&self, exact: f64, sign: i8) -> f64 {
        match *self {
            NoiseModel::Exact => exact,
            NoiseModel::AdditiveAdversarial { magnitude } => exact - sign as f64 * magnitude,
            NoiseModel::Multiplicative { epsilon } => {
                if sign < 0 {
                    (1.0 + epsilon) * exact
                } else {
                    exact
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecoveryReport {
    pub d: usize,
    pub p: f64,
    pub noise_model: NoiseModel,
    pub trials: usize,
    pub per_bit_success_rate: f64,
    pub bits_per_trial: usize,
    pub bits_correct: usize,
    /// Signed Λ₀; zero when d ≡ 2 (mod 4).
    pub lambda0: f64,
    /// Multiplicity of |Λ₀| (0 when Λ₀ vanishes).
    pub multiplicity: usize,
    /// σ and N of the level actually used to plant bits.
    pub level_sigma: f64,
    pub level_multiplicity: usize,
    pub row_norm: f64,
    pub additive_threshold: f64,
    pub multiplicative_threshold: f64,
    /// κ(A) of the first trial's instance.
    pub kappa: f64,
    /// Sign redraws summed over trials.
    pub resamples: usize,
}

/// Runs `trials` independent plant-and-decode rounds in parallel.
///
/// Trial t draws its signs from `stream.trial(t)`; counts are summed, so the
/// result does not depend on scheduling.
pub fn recovery_experiment(
    template: &HardInstanceTemplate,
    noise: NoiseModel,
    trials: usize,
    stream: &RngStream,
) -> Result<RecoveryReport> {
    let per_trial: Vec<(usize, usize, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(usize, usize, f64)> {
            let inst = template.instantiate(&mut stream.trial(t as u64))?;
            let correct = inst
                .signs
                .iter()
                .filter(|&&(i, s)| recover_bit(noise.corrupt(inst.exact_answer(i), s), &inst, i) == s)
                .count();
            let kappa = if t == 0 { condition_number(&inst.a) } else { f64::NAN };
            Ok((correct, inst.resamples, kappa))
        })
        .collect::<Result<_>>()?;
    let bits = template.bit_indices().len();
    let bits_correct: usize = per_trial.iter().map(|e| e.0).sum();
    let total = bits * trials;
    Ok(RecoveryReport {
        d: template.d,
        p: template.p,
        noise_model: noise,
        trials,
        per_bit_success_rate: if total == 0 { f64::NAN } else { bits_correct as f64 / total as f64 },
        bits_per_trial: bits,
        bits_correct,
        lambda0: template.lambda0(),
        multiplicity: template.spectrum.multiplicity,
        level_sigma: template.level.sigma,
        level_multiplicity: template.level.multiplicity,
        row_norm: template.rows.row_norm,
        additive_threshold: template.additive_threshold(),
        multiplicative_threshold: template.multiplicative_threshold(),
        kappa: per_trial.first().map(|e| e.2).unwrap_or(f64::NAN),
        resamples: per_trial.iter().map(|e| e.1).sum(),
    })
}
