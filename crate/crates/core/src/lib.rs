//! Subspace sketches for ℓ_p norms and M-estimators.
//!
//! Given an n × d matrix A, a subspace sketch is a compact structure answering
//! estimates of Φ(Ax) = Σ φ((Ax)_i) for query vectors x. This crate holds both
//! sides of the story:
//!
//! * the upper bounds: exact sketches for even p ([`sketches::GramSketch`],
//!   [`sketches::EvenMomentSketch`]), p-stable and Lewis-weight sampling sketches,
//!   a mollified Tukey estimator ([`tukey`]) and a two-dimensional ℓ₁ sketch
//!   built from 1-D weighted median coresets ([`median2d`]);
//! * the lower-bound machinery: spectra of Boolean-cube kernel matrices
//!   ([`spectrum`]), the bit-planting hard instance and its decoder, and the
//!   incoherent-set distinguishing experiment ([`hardinstance`]).
//!
//! All randomness flows through [`RngStream`], so every experiment is
//! reproducible from a seed.

pub mod cli;
mod error;
pub mod hardinstance;
pub mod kernel;
pub mod matrix;
pub mod median2d;
pub mod quadrature;
pub mod rng;
pub mod sketches;
pub mod spectrum;
pub mod stats;
pub mod transform;
pub mod tukey;

pub use error::{Error, Result};
pub use kernel::KernelFunction;
pub use matrix::{condition_number, phi_norm, QueryMatrix};
pub use rng::RngStream;
pub use transform::{cube_rows, walsh_hadamard};
