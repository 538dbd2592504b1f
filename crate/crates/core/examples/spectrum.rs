//! Eigenvalues of the cube kernel matrix M_ij = |⟨i, j⟩|^p, grouped by character weight.

use subsketch::spectrum::{fourier_spectrum, lambda0_alternating_sum, lambda0_integral};
use subsketch::KernelFunction;

fn main() -> subsketch::Result<()> {
    for (d, p) in [(8usize, 1.0), (12, 1.0), (16, 1.5), (10, 1.0)] {
        let spec = fourier_spectrum(&KernelFunction::power(p), d)?;
        println!("d = {d}, p = {p}");
        for (w, v) in spec.by_weight.iter().enumerate() {
            println!("  weight {w:>2}: {v:>14.6}");
        }
        let alt = lambda0_alternating_sum(&KernelFunction::power(p), d)?;
        println!("  Λ₀ by alternating sum {alt:.6}, multiplicity {}", spec.multiplicity);
        // the integral representation covers d divisible by 8
        if d % 8 == 0 {
            println!("  Λ₀ by integral {:.6}", lambda0_integral(p, d)?);
        }
        if let Some(level) = spec.recovery_level() {
            println!("  planting level: σ = {:.6}, weights {:?}, rank {}", level.sigma, level.weights, level.multiplicity);
        }
    }
    Ok(())
}
