//! Estimating the mollified Tukey loss Σ φ̃(x_i) with a small sketch.
//!
//! [`mollifier`] defines φ̃, [`band`] fits a Chebyshev polynomial to it on the
//! transition band, [`heavy`] finds the large coordinates, and [`estimator`]
//! strings these together: subsample, peel off heavy coordinates (counted as τ
//! or through the polynomial), and sketch the ℓ₁ mass of what is left.

pub mod band;
pub mod estimator;
pub mod heavy;
pub mod mollifier;

pub use band::{fit_band_polynomial, BandPolynomial};
pub use estimator::{estimate_tukey, TukeyEstimate, TukeyEstimator};
pub use heavy::{heavy_hitters, heavy_hitters_sparse, HeavyHitter, HeavyHitterReport, HeavyHitterSketch};
pub use mollifier::{mollified_tukey_eval, MollifiedTukey};
