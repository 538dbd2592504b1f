use proptest::prelude::*;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subsketch::hardinstance::{truncate_to_level, BlockInstance, HardInstanceTemplate};
use subsketch::median2d::build_coreset_1d;
use subsketch::sketches::{
    build_gram_sketch, build_sampling_sketch, build_stable_sketch, compute_lewis_weights, SubspaceSketch,
};
use subsketch::spectrum::{dense_kernel_matrix, fourier_spectrum};
use subsketch::tukey::heavy_hitters;
use subsketch::{phi_norm, KernelFunction, QueryMatrix};

fn matrix_strategy(max_n: usize, max_d: usize) -> impl Strategy<Value = QueryMatrix> {
    (2..=max_d, 1..=max_n).prop_flat_map(|(d, extra)| {
        let n = d + extra;
        proptest::collection::vec(-1000i64..=1000, n * d)
            .prop_map(move |ints| QueryMatrix::from_integers(n, d, 1e-3, ints).unwrap())
    })
}

fn random_matrix(n: usize, d: usize, rng: &mut ChaCha8Rng) -> QueryMatrix {
    let ints = (0..n * d).map(|_| rng.random_range(-1000..=1000)).collect();
    QueryMatrix::from_integers(n, d, 1e-3, ints).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_sketch_is_exact(a in matrix_strategy(30, 6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..a.d()).map(|_| rng.random_range(-5.0..5.0)).collect();
        let s = build_gram_sketch(&a);
        let truth = phi_norm(&a, &x, &KernelFunction::power(2.0)).unwrap();
        prop_assert!((s.query(&x).unwrap() - truth).abs() <= 1e-9 * truth.max(1e-12));
    }

    #[test]
    fn lewis_weights_follow_row_permutations(a in matrix_strategy(25, 4), seed in any::<u64>(), p in 0.6f64..3.5) {
        let mut perm: Vec<usize> = (0..a.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let ints: Vec<i64> = perm.iter().flat_map(|&i| a.integers()[i * a.d()..(i + 1) * a.d()].to_vec()).collect();
        let b = QueryMatrix::from_integers(a.n(), a.d(), a.grain(), ints).unwrap();
        let wa = compute_lewis_weights(&a, p).unwrap();
        let wb = compute_lewis_weights(&b, p).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((wb.w[k] - wa.w[i]).abs() <= 1e-7, "row {i}: {} vs {}", wa.w[i], wb.w[k]);
        }
    }

    #[test]
    fn stable_sketch_is_scale_equivariant(seed in any::<u64>(), c in -20.0f64..20.0, p in prop_oneof![Just(0.5), Just(1.0), Just(1.5)]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(40, 3, &mut rng);
        let s = build_stable_sketch(&a, p, 0.3, 10.0, &mut rng).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let cx: Vec<f64> = x.iter().map(|v| v * c).collect();
        let expect = c.abs().powf(p) * s.query(&x).unwrap();
        prop_assert!((s.query(&cx).unwrap() - expect).abs() <= 1e-9 * expect.max(1e-300));
    }
}

#[test]
fn truncated_kernel_agrees_with_dense_kernel_on_its_eigenspace() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [4usize, 6, 8, 10, 12] {
        for p in [1.0, 1.5] {
            let k = KernelFunction::power(p);
            let spec = fourier_spectrum(&k, d).unwrap();
            let t = truncate_to_level(&spec, &spec.recovery_level().unwrap()).unwrap();
            let m = dense_kernel_matrix(&k, d).unwrap();
            let v: Vec<f64> = (0..1 << d).map(|_| rng.random_range(-1.0..1.0)).collect();
            // M̃v lies in the kept eigenspace, where M and M̃ act identically
            let x = t.apply(&v);
            let dense = &m * nalgebra::DVector::from_vec(x.clone());
            let fast = t.apply(&x);
            let scale = dense.amax().max(1e-12);
            for (a, b) in dense.iter().zip(&fast) {
                assert!((a - b).abs() <= 1e-9 * scale, "d={d} p={p}");
            }
        }
    }
}

#[test]
fn block_instances_answer_each_block_independently() {
    let template = HardInstanceTemplate::new(10, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let blocks: Vec<_> = (0..3).map(|_| template.instantiate(&mut rng).unwrap()).collect();
    let stack = BlockInstance::new(blocks).unwrap();
    assert_eq!((stack.a.n(), stack.a.d()), (3 * 1024, 30));
    let kernel = KernelFunction::power(1.0);
    for b in 0..3 {
        let block = &stack.blocks[b];
        // zero columns elsewhere contribute |0|^p = 0
        for i in [0usize, 1, 17, 513, 1023] {
            let whole = phi_norm(&stack.a, &stack.query_vector(b, i), &kernel).unwrap();
            let alone = block.exact_answer(i);
            assert!((whole - alone).abs() <= 1e-9 * alone, "block {b}, query {i}");
        }
    }
}

#[test]
fn lewis_sampling_is_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let draws = 2000;
    for pair in 0..10 {
        let p = [1.0, 1.5, 3.0][pair % 3];
        let a = random_matrix(60, 3, &mut rng);
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let truth = phi_norm(&a, &x, &KernelFunction::power(p)).unwrap();
        let w = compute_lewis_weights(&a, p).unwrap();
        let vals: Vec<f64> = (0..draws)
            .map(|_| build_sampling_sketch(&a, &w, 10, &mut rng).unwrap().query(&x).unwrap())
            .collect();
        let mean = vals.iter().sum::<f64>() / draws as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws as f64 - 1.0);
        let se = (var / draws as f64).sqrt();
        assert!((mean - truth).abs() <= 3.0 * se, "pair {pair}: mean {mean}, truth {truth}, se {se}");
    }
}

#[test]
fn heavy_hitters_find_planted_spikes() {
    let n = 100_000;
    let found_all = (0..100u64)
        .into_par_iter()
        .filter(|&run| {
            let mut rng = ChaCha8Rng::seed_from_u64(14_000 + run);
            let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut spikes: Vec<usize> = rand::seq::index::sample(&mut rng, n, 10).into_vec();
            for &i in &spikes {
                x[i] = if rng.random::<bool>() { 2000.0 } else { -2000.0 };
            }
            let mut got: Vec<usize> = heavy_hitters(&x, 0.02, &mut rng).iter().map(|h| h.index).collect();
            spikes.sort_unstable();
            got.sort_unstable();
            spikes.iter().all(|i| got.binary_search(i).is_ok())
        })
        .count();
    assert!(found_all >= 95, "all spikes found in {found_all}/100 runs");
}

#[test]
fn coreset_size_grows_polylogarithmically() {
    let eps = 0.1;
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for n in [1_000usize, 10_000, 100_000] {
        let pts: Vec<f64> = (0..n).map(|_| rng.random_range(-1000.0..1000.0)).collect();
        let wts: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
        let core = build_coreset_1d(&pts, &wts, eps).unwrap();
        let k = core.len() as f64 * eps / (n as f64).ln().powi(2);
        assert!(k <= 2.0, "n={n}: {} points, K = {k}", core.len());
        for c in [-3000.0, -10.0, 0.0, 500.0, 2500.0] {
            let exact: f64 = pts.iter().zip(&wts).map(|(p, w)| w * (p - c).abs()).sum();
            assert!((core.cost(c) - exact).abs() <= eps / 2.0 * exact, "n={n}, c={c}");
        }
    }
}
