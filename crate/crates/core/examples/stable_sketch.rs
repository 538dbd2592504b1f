use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsketch::cli::random_matrix;
use subsketch::sketches::{build_stable_sketch, SubspaceSketch, DEFAULT_ROW_CONSTANT};
use subsketch::{phi_norm, KernelFunction};

fn main() -> subsketch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_matrix(500, 5, &mut rng);
    for p in [0.5, 1.0, 1.5] {
        for eps in [0.2, 0.1] {
            let s = build_stable_sketch(&a, p, eps, DEFAULT_ROW_CONSTANT, &mut rng)?;
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let x: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                let truth = phi_norm(&a, &x, &KernelFunction::power(p))?;
                worst = worst.max((s.query(&x)? - truth).abs() / truth);
            }
            println!("p = {p}, ε = {eps}: {} rows, worst relative error over 50 queries {worst:.3}", s.rows());
        }
    }
    Ok(())
}
