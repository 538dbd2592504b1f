use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;
use rand::Rng;
use serde::Serialize;

/// ±1 vectors with small pairwise inner products.
#[derive(Debug, Clone, Serialize)]
pub struct IncoherentSet {
    pub d: usize,
    pub vectors: Vec<Vec<i8>>,
    /// max over distinct pairs of |⟨s, t⟩|.
    pub coherence: i64,
    pub rejections: usize,
}

fn inner(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| (x * y) as i64).sum()
}

/// The acceptance bound 3√(d·ln m) on |⟨s, t⟩|.
pub fn coherence_bound(d: usize, m: usize) -> f64 {
    3.0 * (d as f64 * (m.max(2) as f64).ln()).sqrt()
}

/// Rejection-samples m distinct random sign vectors with pairwise
/// |⟨s, t⟩| ≤ 3√(d·ln m).
pub fn sample_incoherent_set<R: Rng + ?Sized>(d: usize, m: usize, rng: &mut R) -> Result<IncoherentSet> {
    if d == 0 || m == 0 {
        return invalid("incoherent sets need d ≥ 1 and m ≥ 1");
    }
    if (d / 4) < 64 && (m as u128) > (1u128 << (d / 4)) {
        return invalid(format!("m = {m} exceeds 2^(d/4) for d = {d}"));
    }
    let bound = coherence_bound(d, m);
    let budget = 10 * m * m;
    let mut vectors: Vec<Vec<i8>> = Vec::with_capacity(m);
    let mut rejections = 0;
    while vectors.len() < m {
        let v: Vec<i8> = (0..d).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let fits = vectors
            .iter()
            .all(|u| *u != v && (inner(u, &v).abs() as f64) <= bound);
        if fits {
            vectors.push(v);
        } else {
            rejections += 1;
            if rejections > budget {
                return Err(Error::Aborted(format!(
                    "{rejections} rejections while sampling {m} vectors in dimension {d}"
                )));
            }
        }
    }
    let mut coherence = 0;
    for a in 0..m {
        for b in a + 1..m {
            coherence = coherence.max(inner(&vectors[a], &vectors[b]).abs());
        }
    }
    Ok(IncoherentSet {
        d,
        vectors,
        coherence,
        rejections,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguishingOutcome {
    pub d: usize,
    pub p: f64,
    pub rows: usize,
    pub coherence: i64,
    /// ‖M₁x‖_p^p, where x is a row of M₁.
    pub planted: f64,
    /// ‖M₂x‖_p^p, where M₂ swaps x for another set member.
    pub foreign: f64,
    /// R·coherence^p, the a-priori ceiling on `foreign`.
    pub foreign_bound: f64,
    /// d / foreign^{1/p}: the gap factor C with foreign = (d/C)^p.
    pub gap: f64,
    pub separated: bool,
}

/// R = max(1, ⌊d^{p/2} / (3·coherence/√d)^p⌋).
pub fn default_rows(d: usize, p: f64, coherence: i64) -> usize {
    let d = d as f64;
    let r = d.powf(p / 2.0) / (3.0 * coherence as f64 / d.sqrt()).powf(p);
    (r.floor() as usize).max(1)
}

/// Plants x = s₀ as a row of M₁ (rows s₀..s_{R−1}) and not of M₂ (rows
/// s₁..s_R), then checks ‖M₁x‖_p^p ≥ d^p > ‖M₂x‖_p^p.
pub fn distinguishing_experiment(
    d: usize,
    p: f64,
    rows: Option<usize>,
    set_size: usize,
    stream: &RngStream,
) -> Result<DistinguishingOutcome> {
    if p < 2.0 {
        return invalid(format!("the distinguishing experiment needs p ≥ 2, got {p}"));
    }
    let set = sample_incoherent_set(d, set_size, &mut stream.child("set").rng())?;
    let r = rows.unwrap_or_else(|| default_rows(d, p, set.coherence));
    let df = d as f64;
    let limit = df.powf(p / 2.0) / (set.coherence as f64 / df.sqrt()).powf(p);
    if r == 0 || r as f64 > limit {
        return invalid(format!("R = {r} violates R ≤ d^(p/2)/(coherence/√d)^p = {limit:.3}"));
    }
    if r + 1 > set.vectors.len() {
        return invalid(format!("R = {r} needs at least {} set members", r + 1));
    }
    let x = &set.vectors[0];
    let norm = |rows: &[Vec<i8>]| -> f64 { rows.iter().map(|v| (inner(v, x).abs() as f64).powf(p)).sum() };
    let planted = norm(&set.vectors[..r]);
    let foreign = norm(&set.vectors[1..=r]);
    let foreign_bound = r as f64 * (set.coherence as f64).powf(p);
    let dp = df.powf(p);
    Ok(DistinguishingOutcome {
        d,
        p,
        rows: r,
        coherence: set.coherence,
        planted,
        foreign,
        foreign_bound,
        gap: if foreign > 0.0 { df / foreign.powf(1.0 / p) } else { f64::INFINITY },
        separated: planted >= dp && foreign <= foreign_bound && foreign_bound < dp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pair_is_distinct() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for d in [4usize, 8, 16] {
            let s = sample_incoherent_set(d, 2, &mut rng).unwrap();
            assert_ne!(s.vectors[0], s.vectors[1]);
            assert!(s.coherence <= d as i64);
        }
    }

    #[test]
    fn d64_coherence_bound() {
        let s = sample_incoherent_set(64, 100, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(s.coherence as f64 <= coherence_bound(64, 100));
        assert!(s.coherence < 64, "self pairs must not count");
    }

    #[test]
    fn oversized_sets_are_rejected() {
        assert!(sample_incoherent_set(8, 5, &mut ChaCha8Rng::seed_from_u64(2)).is_err());
    }

    #[test]
    fn planted_row_dominates() {
        let out = distinguishing_experiment(64, 2.0, None, 100, &RngStream::new(3, "dist")).unwrap();
        assert!(out.planted >= 4096.0);
        assert!(out.separated, "{out:?}");
        assert!(distinguishing_experiment(64, 2.0, Some(1000), 100, &RngStream::new(3, "dist")).is_err());
    }
}
