//! The Tukey-1 loss min(|t|, τ) smoothed by a compactly supported bump.

use crate::quadrature::integrate;
use std::sync::OnceLock;

/// Unnormalized bump ψ(u) = exp(−1/(1 − u²)) on (−1, 1).
#[inline]
fn bump(u: f64) -> f64 {
    let s = 1.0 - u * u;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// C_ψ, the constant making C_ψ·ψ integrate to one (≈ 1/0.443994).
pub fn bump_normalizer() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| 1.0 / integrate(bump, -1.0, 1.0, 1e-17, 1e-15).value)
}

/// φ̃ = min(|·|, τ) ∗ ψ_{τ/4}.
///
/// Off the band [3τ/4, 5τ/4] the convolution reproduces the loss exactly, so
/// quadrature is only spent inside the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifiedTukey {
    tau: f64,
}

impl MollifiedTukey {
    pub fn new(tau: f64) -> Self {
        assert!(tau > 0.0 && tau.is_finite(), "tau must be positive, got {tau}");
        Self { tau }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        let tau = self.tau;
        if a <= 0.75 * tau {
            return a;
        }
        if a >= 1.25 * tau {
            return tau;
        }
        // With h = τ/4 and the kink of min(·, τ) at u* = (a − τ)/h, the
        // convolution rewrites as τ − C·h·∫_{u*}^1 (u − u*) ψ(u) du, a single
        // smooth integral that stays accurate right up to both band edges.
        let h = 0.25 * tau;
        let u_star = (a - tau) / h;
        let deficit = integrate(|u| (u - u_star) * bump(u), u_star, 1.0, 1e-18, 1e-14).value;
        tau - bump_normalizer() * h * deficit
    }
}

/// Free-function form of [`MollifiedTukey::eval`].
pub fn mollified_tukey_eval(t: f64, tau: f64) -> f64 {
    MollifiedTukey::new(tau).eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizer_matches_known_integral() {
        assert!((1.0 / bump_normalizer() - 0.443_993_816_168_079_4).abs() < 1e-12);
    }

    #[test]
    fn flat_regions_are_exact() {
        let tau = 2.0;
        assert_eq!(mollified_tukey_eval(0.0, tau), 0.0);
        assert_eq!(mollified_tukey_eval(2.0 * tau, tau), tau);
        assert_eq!(mollified_tukey_eval(-tau / 2.0, tau), tau / 2.0);
        assert_eq!(mollified_tukey_eval(1.25 * tau, tau), tau);
    }

    #[test]
    fn matches_direct_convolution() {
        // brute-force (φ ∗ ψ_h)(t) with the kink split explicitly
        let tau = 1.0;
        let h = tau / 4.0;
        let c = bump_normalizer();
        for &t in &[0.8, 0.9, 1.0, 1.1, 1.2] {
            let f = |u: f64| (t - h * u).abs().min(tau) * bump(u);
            let k = ((t - tau) / h).clamp(-1.0, 1.0);
            let direct = c * (integrate(f, -1.0, k, 1e-16, 1e-14).value + integrate(f, k, 1.0, 1e-16, 1e-14).value);
            assert!((direct - mollified_tukey_eval(t, tau)).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn monotone_and_bounded() {
        let tau = 1.0;
        let mut prev = 0.0;
        for k in 0..=2000 {
            let t = k as f64 * 0.001;
            let v = mollified_tukey_eval(t, tau);
            assert!(v >= prev - 1e-15, "decrease at {t}");
            assert!(v <= t.min(tau) + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn smooth_across_band_edges() {
        let tau = 1.0;
        let f = |t: f64| mollified_tukey_eval(t, tau);
        let h = 1e-3;
        for &edge in &[0.75, 1.25] {
            let d1 = |t: f64| (f(t + h) - f(t - h)) / (2.0 * h);
            let d2 = |t: f64| (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            let (l1, r1) = (d1(edge - 2.0 * h), d1(edge + 2.0 * h));
            let (l2, r2) = (d2(edge - 2.0 * h), d2(edge + 2.0 * h));
            assert!((l1 - r1).abs() < 1e-6, "first derivative jumps at {edge}: {l1} vs {r1}");
            assert!((l2 - r2).abs() < 1e-4, "second derivative jumps at {edge}: {l2} vs {r2}");
        }
    }
}
