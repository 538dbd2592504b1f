//! Chebyshev approximation of φ̃ on a band [aτ, bτ].

use super::mollifier::MollifiedTukey;
use crate::error::{invalid, Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

pub const MAX_DEGREE: usize = 4096;
pub const CERTIFICATION_POINTS: usize = 10_000;

/// Polynomial in the Chebyshev basis of [lo, hi], certified against φ̃.
#[derive(Debug, Clone, Serialize)]
pub struct BandPolynomial {
    pub lo: f64,
    pub hi: f64,
    pub tau: f64,
    pub coefficients: Vec<f64>,
    /// Largest |poly − φ̃| / φ̃ seen on the certification grid.
    pub certified_rel_error: f64,
}

impl BandPolynomial {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Clenshaw evaluation; the argument is clamped into the band.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.lo, self.hi);
        let x = (2.0 * t - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coefficients[0]
    }
}

/// Chebyshev coefficients of the interpolant through the n + 1 first-kind nodes.
fn interpolate(values: &[f64]) -> Vec<f64> {
    let m = values.len();
    let mut c: Vec<f64> = (0..m)
        .map(|j| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(k, &f)| f * (PI * j as f64 * (k as f64 + 0.5) / m as f64).cos())
                .sum();
            2.0 * s / m as f64
        })
        .collect();
    c[0] *= 0.5;
    c
}

/// Fits φ̃ on [aτ, bτ] to relative error ε, doubling the degree from 8.
pub fn fit_band_polynomial(tau: f64, a: f64, b: f64, eps: f64) -> Result<BandPolynomial> {
    if !(tau > 0.0 && tau.is_finite()) {
        return invalid(format!("tau must be positive, got {tau}"));
    }
    if !(a > 0.0 && a < 0.75 && b > 1.0 && eps > 0.0 && eps < 0.5) {
        return invalid(format!("need 0 < a < 3/4, b > 1, 0 < eps < 1/2; got a={a}, b={b}, eps={eps}"));
    }
    let phi = MollifiedTukey::new(tau);
    let (lo, hi) = (a * tau, b * tau);
    let grid: Vec<(f64, f64)> = (0..CERTIFICATION_POINTS)
        .map(|k| {
            let t = lo + (hi - lo) * k as f64 / (CERTIFICATION_POINTS - 1) as f64;
            (t, phi.eval(t))
        })
        .collect();
    let mut degree = 8;
    let mut last = f64::INFINITY;
    while degree <= MAX_DEGREE {
        let m = degree + 1;
        let values: Vec<f64> = (0..m)
            .map(|k| {
                let x = (PI * (k as f64 + 0.5) / m as f64).cos();
                phi.eval(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
            })
            .collect();
        let poly = BandPolynomial {
            lo,
            hi,
            tau,
            coefficients: interpolate(&values),
            certified_rel_error: 0.0,
        };
        let err = grid
            .iter()
            .map(|&(t, f)| (poly.eval(t) - f).abs() / f)
            .fold(0.0, f64::max);
        if err <= eps {
            return Ok(BandPolynomial {
                certified_rel_error: err,
                ..poly
            });
        }
        last = err;
        degree *= 2;
    }
    Err(Error::NoConvergence {
        iterations: MAX_DEGREE,
        residual: last,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_low_degree_polynomials() {
        let c = interpolate(&[1.0, 1.0, 1.0]);
        assert!((c[0] - 1.0).abs() < 1e-15 && c[1].abs() < 1e-15 && c[2].abs() < 1e-15);
    }

    #[test]
    fn certified_on_the_standard_band() {
        let poly = fit_band_polynomial(1.0, 3.0 / 16.0, 5.0, 0.05).unwrap();
        assert!(poly.certified_rel_error <= 0.05);
        for k in 0..=100 {
            let t = 1.25 + 3.75 * k as f64 / 100.0;
            assert!((poly.eval(t) - 1.0).abs() <= 0.05);
        }
    }

    #[test]
    fn tighter_targets_cost_more_degree() {
        let loose = fit_band_polynomial(1.0, 3.0 / 16.0, 5.0, 0.2).unwrap();
        let tight = fit_band_polynomial(1.0, 3.0 / 16.0, 5.0, 0.02).unwrap();
        assert!(loose.degree() <= tight.degree());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(fit_band_polynomial(1.0, 0.8, 5.0, 0.1).is_err());
        assert!(fit_band_polynomial(1.0, 0.2, 0.9, 0.1).is_err());
        assert!(fit_band_polynomial(-1.0, 0.2, 5.0, 0.1).is_err());
    }
}
