//! Even p needs no approximation: ‖Ax‖_p^p is a fixed polynomial in x.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsketch::cli::random_matrix;
use subsketch::sketches::{build_even_moment_sketch, build_gram_sketch, SubspaceSketch};
use subsketch::{phi_norm, KernelFunction};

fn main() -> subsketch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_matrix(1000, 4, &mut rng);
    let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let gram = build_gram_sketch(&a);
    println!(
        "p = 2: sketch {:.6}, exact {:.6}, {} bits",
        gram.query(&x)?,
        phi_norm(&a, &x, &KernelFunction::power(2.0))?,
        gram.size_bits()
    );
    for p in [4u32, 6] {
        let s = build_even_moment_sketch(&a, p)?;
        println!(
            "p = {p}: sketch {:.6}, exact {:.6}, {} bits",
            s.query(&x)?,
            phi_norm(&a, &x, &KernelFunction::power(p as f64))?,
            s.size_bits()
        );
    }
    Ok(())
}
