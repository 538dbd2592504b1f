//! For p ≥ 2: telling whether x is a row of the matrix needs ‖Mx‖_p^p only to
//! constant accuracy, because incoherent rows contribute little.

use subsketch::hardinstance::distinguishing_experiment;
use subsketch::RngStream;

fn main() -> subsketch::Result<()> {
    for (d, p) in [(64usize, 2.0), (64, 3.0), (256, 2.0)] {
        let out = distinguishing_experiment(d, p, None, 100, &RngStream::new(1, "example"))?;
        println!(
            "d = {d}, p = {p}: R = {}, coherence {}, planted {:.0}, foreign {:.0} ≤ {:.0}, gap C = {:.2}, separated: {}",
            out.rows, out.coherence, out.planted, out.foreign, out.foreign_bound, out.gap, out.separated
        );
    }
    Ok(())
}
