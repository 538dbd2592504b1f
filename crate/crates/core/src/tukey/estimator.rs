//! Sampling + heavy-hitter estimator for Φ̃(x) = Σ φ̃(x_i).

use super::band::{fit_band_polynomial, BandPolynomial};
use super::heavy::heavy_hitters_sparse;
use super::mollifier::MollifiedTukey;
use crate::error::{invalid, Result};
use crate::sketches::HashedCauchySketch;
use rand::Rng;
use serde::Serialize;
use std::collections::HashSet;

/// Band of the S₂ polynomial, in units of τ.
pub const BAND: (f64, f64) = (3.0 / 16.0, 5.0);
/// Sampling rates are powers of this base.
pub const RATE_BASE: f64 = 1.1;

/// One run of the estimator with everything needed to audit it.
#[derive(Debug, Clone, Serialize)]
pub struct TukeyEstimate {
    pub estimate: f64,
    /// Φ̃(x) from the exact scan that also serves as the coarse estimate F.
    pub exact: f64,
    pub rel_err: f64,
    /// The coarse estimate comes from an exact scan, not a sketch.
    pub oracle_assisted: bool,
    pub r: f64,
    pub beta: f64,
    pub degree: usize,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "S2")]
    pub s2: f64,
    #[serde(rename = "S3")]
    pub s3: f64,
    pub sampled: usize,
    /// Φ̃(x_L) computed exactly on the sample (audit only).
    pub sampled_mass: f64,
    pub h1: Vec<usize>,
    pub h2: Vec<usize>,
}

/// Estimator state that does not depend on x: τ, ε and the fitted polynomial.
#[derive(Debug, Clone)]
pub struct TukeyEstimator {
    tau: f64,
    eps: f64,
    phi: MollifiedTukey,
    poly: BandPolynomial,
}

impl TukeyEstimator {
    pub fn new(tau: f64, eps: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite() && eps > 0.0 && eps < 1.0) {
            return invalid(format!("need tau > 0 and 0 < eps < 1, got tau={tau}, eps={eps}"));
        }
        let poly = fit_band_polynomial(tau, BAND.0, BAND.1, eps.min(0.05))?;
        Ok(Self {
            tau,
            eps,
            phi: MollifiedTukey::new(tau),
            poly,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn beta(&self) -> f64 {
        self.eps * self.eps / 4.0
    }

    pub fn polynomial(&self) -> &BandPolynomial {
        &self.poly
    }

    /// Φ̃(x) by a full scan.
    pub fn exact(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.phi.eval(v)).sum()
    }

    /// The power of 1.1 nearest τ/(Fε²), clamped to 1; 1 when n ≤ 1/ε².
    pub fn sampling_rate(&self, n: usize, coarse: f64) -> f64 {
        if n as f64 <= 1.0 / (self.eps * self.eps) || coarse <= 0.0 {
            return 1.0;
        }
        let target = self.tau / (coarse * self.eps * self.eps);
        if target >= 1.0 {
            return 1.0;
        }
        let s = (-target.ln() / RATE_BASE.ln()).round();
        RATE_BASE.powf(-s)
    }

    /// Bernoulli(r) sample of the coordinates, as (index, value) pairs.
    pub fn sample<R: Rng + ?Sized>(&self, x: &[f64], r: f64, rng: &mut R) -> Vec<(usize, f64)> {
        if r >= 1.0 {
            return x.iter().copied().enumerate().collect();
        }
        x.iter()
            .copied()
            .enumerate()
            .filter(|_| rng.random::<f64>() < r)
            .collect()
    }

    pub fn estimate<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> TukeyEstimate {
        let tau = self.tau;
        let exact = self.exact(x);
        let r = self.sampling_rate(x.len(), exact);
        let sample = self.sample(x, r, rng);
        let sampled_mass = sample.iter().map(|&(_, v)| self.phi.eval(v)).sum();
        let nonzero: Vec<(usize, f64)> = sample.iter().copied().filter(|e| e.1 != 0.0).collect();

        let beta = self.beta();
        let report = heavy_hitters_sparse(&nonzero, beta, rng);
        let mut h1 = Vec::new();
        let mut h2 = Vec::new();
        let mut s2 = 0.0;
        for h in &report.hitters {
            let a = h.estimate.abs();
            if a >= 1.25 * tau {
                h1.push(h.index);
            } else if a >= 0.375 * tau {
                h2.push(h.index);
                s2 += self.poly.eval(a);
            }
        }
        let s1 = tau * h1.len() as f64;

        let removed: HashSet<usize> = h1.iter().chain(&h2).copied().collect();
        let rows = (4.0 / (self.eps * self.eps)).ceil() as usize;
        let cauchy = HashedCauchySketch::new(rows, rng.random());
        let s3 = cauchy.l1_estimate(nonzero.iter().copied().filter(|e| !removed.contains(&e.0)));

        let estimate = (s1 + s2 + s3) / r;
        let rel_err = if exact > 0.0 {
            (estimate - exact).abs() / exact
        } else {
            estimate.abs()
        };
        TukeyEstimate {
            estimate,
            exact,
            rel_err,
            oracle_assisted: true,
            r,
            beta,
            degree: self.poly.degree(),
            s1,
            s2,
            s3,
            sampled: sample.len(),
            sampled_mass,
            h1,
            h2,
        }
    }
}

/// One-shot estimate of Φ̃(x); builds a fresh [`TukeyEstimator`].
pub fn estimate_tukey<R: Rng + ?Sized>(x: &[f64], tau: f64, eps: f64, rng: &mut R) -> Result<f64> {
    Ok(TukeyEstimator::new(tau, eps)?.estimate(x, rng).estimate)
}
