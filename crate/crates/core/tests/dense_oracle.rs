mod common;

use common::{hamiltonian_dense, pauli_dense, randomize, shadow_dense};
use num_complex::Complex64 as C;
use shadowvar::{assemble, builtin, energy, enumerate_contiguous, sample_haar, ProductCache};

#[test]
fn correlation_matrix_matches_dense_trace() {
    let cache = ProductCache::for_sites(4).unwrap();
    let dense_basis: Vec<_> = cache.basis().iter().map(pauli_dense).collect();
    for seed in 0..3 {
        let mut bag = sample_haar::<f64>(seed, 12, 4).unwrap();
        randomize(&mut bag, 100 + seed);
        let rho = shadow_dense(&bag);
        let m = assemble(&bag, &cache).unwrap();
        for b in 0..cache.dim() {
            for a in 0..cache.dim() {
                let want = dense_basis[b].matmul(&dense_basis[a]).trace_product(&rho);
                let got = m.entry(b, a);
                assert!((got - want).norm() < 1e-10, "entry ({b}, {a}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn energy_matches_dense_trace() {
    for model in ["main", "H1", "H3"] {
        let h = builtin(model, 4).unwrap();
        let hd = hamiltonian_dense(&h);
        let mut bag = sample_haar::<f64>(9, 20, 4).unwrap();
        randomize(&mut bag, 7);
        let want = hd.trace_product(&shadow_dense(&bag));
        assert!(want.im.abs() < 1e-12);
        assert!((energy(&bag, &h).unwrap() - want.re).abs() < 1e-10, "{model}");
    }
}

#[test]
fn high_weight_estimates_match_dense_trace() {
    let mut bag = sample_haar::<f64>(4, 10, 6).unwrap();
    randomize(&mut bag, 5);
    let rho = shadow_dense(&bag);
    for k in [3, 5, 6] {
        for p in enumerate_contiguous(6, k).unwrap().iter().step_by(37) {
            let want: C = pauli_dense(p).trace_product(&rho);
            assert!((bag.estimate(p).unwrap() - want.re).abs() < 1e-9, "{p}");
        }
    }
}
