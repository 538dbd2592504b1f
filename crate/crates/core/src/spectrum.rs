//! Spectra of Boolean-cube kernel matrices M_{ij} = φ(⟨i, j⟩).
//!
//! M is diagonalized by the normalized Hadamard matrix, and its eigenvalue on
//! the character s depends only on the Hamming weight of s. Three routes to the
//! weight-d/2 eigenvalue Λ₀ are provided: the Krawtchouk sum (default), one
//! Walsh–Hadamard transform, and the integral representation valid for d ∈ 8ℤ.

use crate::error::{invalid, Result};
use crate::kernel::KernelFunction;
use crate::quadrature::integrate;
use crate::transform::{fwht_in_place, MAX_CUBE_DIM};
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;

/// Relative tolerance for treating two eigenvalue magnitudes as equal.
pub const LEVEL_TOL: f64 = 1e-9;

pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as i128 / (j + 1) as i128;
    }
    acc
}

/// Σ_j (−1)^j C(w, j) C(d−w, i−j): the character sum of a weight-w character
/// over all points of Hamming weight i.
pub fn krawtchouk(d: usize, w: usize, i: usize) -> i128 {
    (0..=w.min(i))
        .filter(|&j| i - j <= d - w)
        .map(|j| {
            let t = binomial(w, j) * binomial(d - w, i - j);
            if j % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum()
}

/// g(i) = φ(d − 2i): the matrix entry for two cube points at Hamming distance i.
pub fn kernel_profile(kernel: &KernelFunction, d: usize) -> Vec<f64> {
    (0..=d).map(|i| kernel.eval(d as f64 - 2.0 * i as f64)).collect()
}

/// A set of character weights sharing one eigenvalue magnitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralLevel {
    /// |eigenvalue| shared by the level.
    pub sigma: f64,
    /// Weights in the level; their eigenvalues may differ in sign.
    pub weights: Vec<usize>,
    /// Number of characters, Σ C(d, w) over the weights.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSpectrum {
    pub d: usize,
    pub kernel: KernelFunction,
    /// Entry w: the eigenvalue ĝ(s) for any character s of Hamming weight w.
    pub by_weight: Vec<f64>,
    /// Signed ĝ at weight d/2; `None` for odd d.
    pub lambda0: Option<f64>,
    /// Number of eigenvalues with magnitude |lambda0|; 0 when lambda0 is absent or zero.
    pub multiplicity: usize,
}

impl GridSpectrum {
    fn from_weights(kernel: KernelFunction, d: usize, by_weight: Vec<f64>) -> Self {
        let lambda0 = (d % 2 == 0).then(|| by_weight[d / 2]);
        let mut s = GridSpectrum {
            d,
            kernel,
            by_weight,
            lambda0,
            multiplicity: 0,
        };
        if let Some(l) = lambda0 {
            if !s.is_negligible(l) {
                s.multiplicity = s.level_of(l.abs()).multiplicity;
            }
        }
        s
    }

    fn scale(&self) -> f64 {
        self.by_weight.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// True when |v| is zero up to rounding relative to the largest eigenvalue.
    pub fn is_negligible(&self, v: f64) -> bool {
        v.abs() <= 1e-12 * self.scale().max(f64::MIN_POSITIVE)
    }

    /// All weights whose eigenvalue magnitude equals `sigma`.
    pub fn level_of(&self, sigma: f64) -> SpectralLevel {
        let tol = LEVEL_TOL * sigma.abs().max(1e-12 * self.scale());
        let weights: Vec<usize> = (0..=self.d)
            .filter(|&w| (self.by_weight[w].abs() - sigma.abs()).abs() <= tol)
            .collect();
        let multiplicity = weights.iter().map(|&w| binomial(self.d, w) as usize).sum();
        SpectralLevel {
            sigma: sigma.abs(),
            weights,
            multiplicity,
        }
    }

    /// The level containing Λ₀, if Λ₀ exists and is nonzero.
    pub fn lambda0_level(&self) -> Option<SpectralLevel> {
        let l = self.lambda0?;
        (!self.is_negligible(l)).then(|| self.level_of(l.abs()))
    }

    /// Level used to plant bits: the Λ₀ level when it is nonzero, otherwise the
    /// nonzero level of largest multiplicity (ties go to the weight nearest d/2).
    ///
    /// Λ₀ vanishes identically when d ≡ 2 (mod 4), since g(i) = g(d − i) while
    /// the weight-d/2 character sum is odd under i ↦ d − i.
    pub fn recovery_level(&self) -> Option<SpectralLevel> {
        if let Some(level) = self.lambda0_level() {
            return Some(level);
        }
        let half = self.d as f64 / 2.0;
        (0..=self.d)
            .filter(|&w| !self.is_negligible(self.by_weight[w]))
            .map(|w| self.level_of(self.by_weight[w].abs()))
            .max_by(|a, b| {
                let dist = |l: &SpectralLevel| {
                    l.weights
                        .iter()
                        .map(|&w| (w as f64 - half).abs())
                        .fold(f64::INFINITY, f64::min)
                };
                a.multiplicity
                    .cmp(&b.multiplicity)
                    .then(dist(b).total_cmp(&dist(a)))
            })
    }

    /// All eigenvalues with multiplicity, as |value| sorted descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for w in 0..=self.d {
            let c = binomial(self.d, w) as usize;
            out.extend(std::iter::repeat_n(self.by_weight[w].abs(), c));
        }
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }
}

/// Eigenvalues by weight through the Krawtchouk sums; O(d²).
pub fn fourier_spectrum(kernel: &KernelFunction, d: usize) -> Result<GridSpectrum> {
    if d == 0 || d > MAX_CUBE_DIM {
        return invalid(format!("cube dimension {d} outside 1..={MAX_CUBE_DIM}"));
    }
    kernel.validate()?;
    let g = kernel_profile(kernel, d);
    let by_weight = (0..=d)
        .map(|w| {
            (0..=d)
                .map(|i| krawtchouk(d, w, i) as f64 * g[i])
                .sum::<f64>()
        })
        .collect();
    Ok(GridSpectrum::from_weights(*kernel, d, by_weight))
}

/// Same spectrum from one transform of x ↦ g(w_H(x)); O(d·2^d).
pub fn fourier_spectrum_wht(kernel: &KernelFunction, d: usize) -> Result<GridSpectrum> {
    if d == 0 || d > MAX_CUBE_DIM {
        return invalid(format!("cube dimension {d} outside 1..={MAX_CUBE_DIM}"));
    }
    kernel.validate()?;
    let g = kernel_profile(kernel, d);
    let mut f: Vec<f64> = (0..1usize << d)
        .map(|x| g[x.count_ones() as usize])
        .collect();
    fwht_in_place(&mut f);
    // the character 2^w − 1 has weight w
    let by_weight = (0..=d).map(|w| f[(1usize << w) - 1]).collect();
    Ok(GridSpectrum::from_weights(*kernel, d, by_weight))
}

/// Σ_{even i} (−1)^{i/2} C(d/2, i/2) g(i).
pub fn lambda0_alternating_sum(kernel: &KernelFunction, d: usize) -> Result<f64> {
    if d == 0 || d % 2 == 1 {
        return invalid(format!("alternating sum needs even d, got {d}"));
    }
    let g = kernel_profile(kernel, d);
    Ok((0..=d / 2)
        .map(|j| {
            let t = binomial(d / 2, j) as f64 * g[2 * j];
            if j % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .sum())
}

/// The alternating sum for |t|^p with integer p, in exact integer arithmetic.
pub fn lambda0_alternating_sum_exact(p: u32, d: usize) -> Result<i128> {
    if d == 0 || d % 2 == 1 {
        return invalid(format!("alternating sum needs even d, got {d}"));
    }
    let mut acc: i128 = 0;
    for j in 0..=d / 2 {
        let base = (d as i128 - 4 * j as i128).abs();
        let g = if base == 0 { 0 } else { base.pow(p) };
        let t = binomial(d / 2, j) * g;
        acc += if j % 2 == 0 { t } else { -t };
    }
    Ok(acc)
}

/// Integral route with its error budget.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntegralEvaluation {
    pub value: f64,
    /// ∫₀^∞ sin^{d/2}(t) / t^{p+1} dt.
    pub integral: f64,
    pub quadrature_error: f64,
    pub tail_error: f64,
}

const TAIL_PERIODS: usize = 64;

/// ∫_T^∞ cos(ωt) t^{−a} dt for ωT ∈ 2πℤ, by the integration-by-parts series.
/// Returns (value, magnitude of the first omitted term).
fn cosine_tail(omega: f64, t: f64, a: f64) -> (f64, f64) {
    // Σ_{l≥1} (−1)^{l+1} (a)_{2l−1} / (ω^{2l} T^{a+2l−1})
    let mut rising = a; // (a)_1
    let mut term = rising / (omega * omega * t.powf(a + 1.0));
    let mut sum = 0.0;
    let mut sign = 1.0;
    for l in 1..60 {
        sum += sign * term;
        sign = -sign;
        let k = (2 * l - 1) as f64;
        rising *= (a + k) * (a + k + 1.0);
        let next = rising / (omega.powi(2 * l + 2) * t.powf(a + 2.0 * l as f64 + 1.0));
        if next >= term || next < 1e-300 {
            return (sum, next.min(term));
        }
        term = next;
    }
    (sum, term)
}

/// ∫₀^∞ sin^m(t)/t^{p+1} dt for even m and 0 < p < m.
pub fn sine_power_integral(m: usize, p: f64) -> IntegralEvaluation {
    let a = p + 1.0;
    let f = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            t.sin().powi(m as i32) / t.powf(a)
        }
    };
    let mut body = 0.0;
    let mut qerr = 0.0;
    for k in 0..TAIL_PERIODS {
        let r = integrate(f, k as f64 * PI, (k + 1) as f64 * PI, 1e-17, 1e-14);
        body += r.value;
        qerr += r.error;
    }
    let t = TAIL_PERIODS as f64 * PI;
    let half = m / 2;
    let scale = 0.5f64.powi(m as i32);
    let mut tail = binomial(m, half) as f64 * t.powf(-p) / p;
    let mut terr = 0.0;
    for k in 1..=half {
        let (jk, ek) = cosine_tail(2.0 * k as f64, t, a);
        let c = 2.0 * binomial(m, half + k) as f64;
        tail += if k % 2 == 0 { c * jk } else { -c * jk };
        terr += c * ek;
    }
    IntegralEvaluation {
        value: body + scale * tail,
        integral: body + scale * tail,
        quadrature_error: qerr,
        tail_error: scale * terr,
    }
}

/// Λ₀ for |t|^p through its integral representation; needs d ∈ 8ℤ and 0 < p < d/2.
pub fn lambda0_integral(p: f64, d: usize) -> Result<f64> {
    Ok(lambda0_integral_detailed(p, d)?.value)
}

pub fn lambda0_integral_detailed(p: f64, d: usize) -> Result<IntegralEvaluation> {
    if d == 0 || d % 8 != 0 || d > MAX_CUBE_DIM {
        return invalid(format!("integral route needs d ∈ 8ℤ up to {MAX_CUBE_DIM}, got {d}"));
    }
    let m = d / 2;
    if !(p > 0.0 && p < m as f64) {
        return invalid(format!("p = {p} outside (0, {m})"));
    }
    if p.fract() == 0.0 && (p as u64) % 2 == 0 {
        return Ok(IntegralEvaluation {
            value: 0.0,
            integral: f64::NAN,
            quadrature_error: 0.0,
            tail_error: 0.0,
        });
    }
    let ev = sine_power_integral(m, p);
    let n = d / 4;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let prefactor = sign * 2f64.powf(p + 1.0 + m as f64) * statrs::function::gamma::gamma(p + 1.0)
        / PI
        * (PI * p / 2.0).sin();
    Ok(IntegralEvaluation {
        value: prefactor * ev.integral,
        integral: ev.integral,
        quadrature_error: prefactor.abs() * ev.quadrature_error,
        tail_error: prefactor.abs() * ev.tail_error,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LowerBoundCheck {
    pub lambda0: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Compares |Λ₀| with c·2^{d/2}/√d (times |sin(pπ/2)| for power kernels).
pub fn lambda0_lower_bound_check(kernel: &KernelFunction, d: usize, c: f64) -> Result<LowerBoundCheck> {
    if d == 0 || d % 8 != 0 || d > MAX_CUBE_DIM {
        return invalid(format!("lower-bound check needs d ∈ 8ℤ up to {MAX_CUBE_DIM}, got {d}"));
    }
    let lambda0 = lambda0_alternating_sum(kernel, d)?;
    let base = c * 2f64.powf(d as f64 / 2.0) / (d as f64).sqrt();
    let bound = match kernel {
        KernelFunction::PowerP { p } => {
            let s = (PI * p / 2.0).sin().abs();
            // sin(kπ) is not exactly zero in floating point
            if p.fract() == 0.0 && (*p as u64) % 2 == 0 {
                0.0
            } else {
                base * s
            }
        }
        _ => base,
    };
    let ratio = if bound == 0.0 {
        if lambda0.abs() < 1e-9 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        lambda0.abs() / bound
    };
    Ok(LowerBoundCheck {
        lambda0,
        bound,
        ratio,
    })
}

/// The dense 2^d × 2^d matrix φ(⟨i, j⟩). Meant for small-d cross-checks.
pub fn dense_kernel_matrix(kernel: &KernelFunction, d: usize) -> Result<DMatrix<f64>> {
    if d == 0 || d > 12 {
        return invalid(format!("dense materialization limited to d ≤ 12, got {d}"));
    }
    let g = kernel_profile(kernel, d);
    let n = 1usize << d;
    Ok(DMatrix::from_fn(n, n, |i, j| g[(i ^ j).count_ones() as usize]))
}

/// Singular values of the dense matrix, sorted descending.
pub fn dense_singular_values(kernel: &KernelFunction, d: usize) -> Result<Vec<f64>> {
    let m = dense_kernel_matrix(kernel, d)?;
    let mut sv: Vec<f64> = m.symmetric_eigenvalues().iter().map(|e| e.abs()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> KernelFunction {
        KernelFunction::power(v)
    }

    #[test]
    fn profiles() {
        assert_eq!(kernel_profile(&p(1.0), 2), vec![2.0, 0.0, 2.0]);
        assert_eq!(kernel_profile(&p(2.0), 4), vec![16.0, 4.0, 0.0, 4.0, 16.0]);
        assert_eq!(
            kernel_profile(&KernelFunction::ZeroIndicator, 2),
            vec![1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn small_spectra() {
        let s = fourier_spectrum(&p(1.0), 2).unwrap();
        assert_eq!(s.by_weight, vec![4.0, 0.0, 4.0]);
        assert_eq!(s.singular_values(), vec![4.0, 4.0, 0.0, 0.0]);
        let dense = dense_singular_values(&p(1.0), 2).unwrap();
        for (a, b) in dense.iter().zip(s.singular_values()) {
            assert!((a - b).abs() < 1e-12);
        }

        let s4 = fourier_spectrum(&p(1.0), 4).unwrap();
        assert_eq!(s4.by_weight[2].abs(), 8.0);
        assert!(s4.multiplicity >= 6);

        let s6 = fourier_spectrum(&p(2.0), 6).unwrap();
        assert_eq!(s6.by_weight[3], 0.0);
    }

    #[test]
    fn alternating_sum_examples() {
        assert_eq!(lambda0_alternating_sum(&p(1.0), 4).unwrap(), 8.0);
        assert_eq!(lambda0_alternating_sum(&p(1.0), 2).unwrap(), 0.0);
        assert_eq!(lambda0_alternating_sum(&p(2.0), 8).unwrap(), 0.0);
        assert!(lambda0_alternating_sum(&p(1.0), 5).is_err());
    }

    #[test]
    fn wht_route_matches_krawtchouk() {
        for d in 1..=10 {
            for k in [p(0.5), p(1.0), p(3.0), KernelFunction::LogAbs] {
                let a = fourier_spectrum(&k, d).unwrap();
                let b = fourier_spectrum_wht(&k, d).unwrap();
                for (x, y) in a.by_weight.iter().zip(&b.by_weight) {
                    assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "d={d} {k:?}");
                }
            }
        }
    }

    #[test]
    fn even_power_vanishes_exactly() {
        for pw in [2u32, 4] {
            for d in (2..=24).step_by(2).filter(|&d| d / 2 > pw as usize) {
                assert_eq!(lambda0_alternating_sum_exact(pw, d).unwrap(), 0, "p={pw} d={d}");
            }
        }
        assert_eq!(lambda0_alternating_sum_exact(1, 4).unwrap(), 8);
    }

    #[test]
    fn zero_indicator_closed_form() {
        for d in (4..=24).step_by(4) {
            let v = lambda0_alternating_sum(&KernelFunction::ZeroIndicator, d).unwrap();
            // Λ₀ sums both halves k < d/4 and k > d/4 of the alternating sum;
            // each half alone is ½·C(d/2, d/4)
            let half = d / 2;
            let one_sided: i128 = (1..=half / 2)
                .map(|k| if k % 2 == 1 { binomial(half, half / 2 + k) } else { -binomial(half, half / 2 + k) })
                .sum();
            assert_eq!(2 * one_sided, binomial(half, half / 2), "d={d}");
            assert_eq!(v.abs(), binomial(half, half / 2) as f64, "d={d}");
        }
    }

    #[test]
    fn integral_route_examples() {
        assert_eq!(lambda0_integral(2.0, 8).unwrap(), 0.0);
        assert_eq!(lambda0_integral(2.0, 16).unwrap(), 0.0);
        let a = lambda0_alternating_sum(&p(1.0), 8).unwrap();
        let b = lambda0_integral(1.0, 8).unwrap();
        assert!((a - b).abs() <= 1e-6 * a.abs(), "{a} vs {b}");
        let a = lambda0_alternating_sum(&p(0.5), 16).unwrap();
        let b = lambda0_integral(0.5, 16).unwrap();
        assert!((a - b).abs() <= 1e-6 * a.abs(), "{a} vs {b}");
        assert!(lambda0_integral(5.0, 8).is_err());
        assert!(lambda0_integral(0.0, 8).is_err());
        assert!(lambda0_integral(1.0, 12).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        let c = lambda0_lower_bound_check(&p(2.0), 8, 1.0).unwrap();
        assert_eq!((c.lambda0, c.bound, c.ratio), (0.0, 0.0, 1.0));
        let c = lambda0_lower_bound_check(&p(1.0), 8, 1.0).unwrap();
        assert!(c.ratio >= 0.1);
        let c = lambda0_lower_bound_check(&KernelFunction::LogAbs, 16, 1.0).unwrap();
        assert!(c.lambda0.abs() >= 0.05 * 256.0 / 4.0);
    }

    #[test]
    fn recovery_level_falls_back_when_lambda0_vanishes() {
        let s = fourier_spectrum(&p(1.0), 10).unwrap();
        assert!(s.lambda0_level().is_none());
        let level = s.recovery_level().unwrap();
        assert_eq!(level.sigma, 40.0);
        assert_eq!(level.weights, vec![4, 8]);
        assert_eq!(level.multiplicity, 255);

        let s = fourier_spectrum(&p(1.0), 12).unwrap();
        let level = s.recovery_level().unwrap();
        assert_eq!(level.sigma, 48.0);
        assert_eq!(level.multiplicity, 924 + 495);
        assert_eq!(s.multiplicity, 1419);
    }
}
