//! The bit-planting hard instance behind the ℓ_p subspace-sketch lower bound.
//!
//! Bits s_i are planted along nearly orthogonal rows of a spectrum-truncated
//! Boolean-cube kernel matrix M̃. The planted vector x is shifted positive,
//! raised to the 1/p power and rounded to a grid, and A's j-th row is that
//! value times the j-th cube vector. Then ‖A·i‖_p^p = ⟨M_i, x + Δ·1⟩ up to
//! rounding, so any good enough estimate of ‖A·i‖_p^p reveals s_i.
//!
//! The incoherent-set half ([`incoherent`]) covers the p > 2 regime, where
//! one planted row must stand out against a set of near-orthogonal vectors.

pub mod incoherent;
pub mod instance;
pub mod orthogonal;
pub mod recovery;
pub mod truncation;

pub use incoherent::{coherence_bound, default_rows, distinguishing_experiment, sample_incoherent_set, DistinguishingOutcome, IncoherentSet};
pub use instance::{build_hard_instance, grain_for, recover_bit, BlockInstance, HardInstance, HardInstanceTemplate, InstanceReport};
pub use orthogonal::{orthogonalize_rows, OrthogonalityReport, OrthogonalizedRows};
pub use recovery::{recovery_experiment, NoiseModel, RecoveryReport};
pub use truncation::{truncate_spectrum, truncate_to_level, DenseRows, RowSource, TruncatedKernel};
