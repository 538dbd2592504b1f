//! Lewis weights, and the row-sampling sketch built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsketch::cli::random_matrix;
use subsketch::sketches::{build_sampling_sketch, compute_lewis_weights, leverage_scores, SubspaceSketch};
use subsketch::{phi_norm, KernelFunction};

fn main() -> subsketch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_matrix(2000, 6, &mut rng);
    let lev = leverage_scores(&a);
    println!("leverage scores sum to {:.9}", lev.iter().sum::<f64>());
    for p in [1.0, 1.5, 3.0] {
        let w = compute_lewis_weights(&a, p)?;
        let s = build_sampling_sketch(&a, &w, 400, &mut rng)?;
        let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let truth = phi_norm(&a, &x, &KernelFunction::power(p))?;
        println!(
            "p = {p}: Σw = {:.9} after {} iterations; 400-row sample estimates {:.4} vs {:.4}",
            w.sum(),
            w.iterations,
            s.query(&x)?,
            truth
        );
    }
    Ok(())
}
