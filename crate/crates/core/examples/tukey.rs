//! Estimating Σ φ̃(x_i) for the mollified Tukey loss from a subsample plus heavy hitters.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subsketch::cli::mixed_vector;
use subsketch::tukey::{MollifiedTukey, TukeyEstimator};

fn main() -> subsketch::Result<()> {
    let tau = 1.0;
    let phi = MollifiedTukey::new(tau);
    for t in [0.5, 0.8, 1.0, 1.2, 2.0] {
        println!("φ̃({t}) = {:.6}", phi.eval(t));
    }
    let est = TukeyEstimator::new(tau, 0.1)?;
    println!("band polynomial degree {}", est.polynomial().degree());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = mixed_vector(100_000, 1000, tau, &mut rng);
    for _ in 0..3 {
        let e = est.estimate(&x, &mut rng);
        println!(
            "estimate {:.1} vs exact {:.1} (rel err {:.4}); sampled {} of {} at rate {:.5}, {} heavy hitters",
            e.estimate,
            e.exact,
            e.rel_err,
            e.sampled,
            x.len(),
            e.r,
            e.h1.len() + e.h2.len()
        );
    }
    Ok(())
}
