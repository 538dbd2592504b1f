//! Plant random bits in a matrix and read them back from ‖A·(cube vector)‖_p^p,
//! first exactly and then through noisy answers.

use subsketch::hardinstance::{recover_bit, recovery_experiment, HardInstanceTemplate, NoiseModel};
use subsketch::RngStream;

fn main() -> subsketch::Result<()> {
    let template = HardInstanceTemplate::new(12, 1.0)?;
    let stream = RngStream::new(7, "example");
    let inst = template.instantiate(&mut stream.child("one").rng())?;
    let report = inst.check();
    println!(
        "d = 12, p = 1: {} planted bits, ỹᵖ ∈ [{:.3}, {:.3}], max query {:.0} (bound {:.0})",
        inst.signs.len(),
        report.min_ytilde_p,
        report.max_ytilde_p,
        report.max_query_value,
        report.query_bound
    );
    let correct = inst
        .signs
        .iter()
        .filter(|&&(i, s)| recover_bit(inst.exact_answer(i), &inst, i) == s)
        .count();
    println!("exact answers decode {correct}/{} bits", inst.signs.len());

    let additive = NoiseModel::AdditiveAdversarial {
        magnitude: template.additive_threshold(),
    };
    let too_coarse = NoiseModel::Multiplicative {
        epsilon: 100.0 * template.multiplicative_threshold(),
    };
    for noise in [NoiseModel::Exact, additive, too_coarse] {
        let r = recovery_experiment(&template, noise, 200, &stream)?;
        println!("{:<24} per-bit success {:.3}", noise.name(), r.per_bit_success_rate);
    }
    Ok(())
}
