//! ‖Ax‖₁ for an n × 2 matrix from two weighted 1-D median coresets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subsketch::cli::random_matrix;
use subsketch::median2d::build_l1_2d_sketch;
use subsketch::{phi_norm, KernelFunction};

fn main() -> subsketch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let a = random_matrix(10_000, 2, &mut rng);
    for eps in [0.2, 0.1, 0.05] {
        let s = build_l1_2d_sketch(&a, eps)?;
        let mut worst: f64 = 0.0;
        for k in 0..360 {
            let th = (k as f64).to_radians();
            let x = [th.cos(), th.sin()];
            let truth = phi_norm(&a, &x, &KernelFunction::power(1.0))?;
            worst = worst.max((s.query(x) - truth).abs() / truth);
        }
        println!(
            "ε = {eps}: {} + {} coreset points ({} bits), worst relative error {worst:.2e}",
            s.plus.len(),
            s.minus.len(),
            s.size_bits()
        );
    }
    Ok(())
}
