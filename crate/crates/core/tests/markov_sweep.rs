use bootstrap_core::markov::{
    check_commutation, check_product_lemma, make_markov_state, markov_decompose, read_decomposition,
    verify_projector_factorization, write_decomposition, BlockSpec, MarkovSpec, Tripartition,
};
use bootstrap_core::tensor::cmi;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random spec with `dim B <= 16` and total dimension at most 256.
fn random_spec(rng: &mut ChaCha8Rng, seed: u64) -> MarkovSpec {
    loop {
        let a_dim = rng.gen_range(2..=3);
        let c_dim = rng.gen_range(2..=3);
        let n = rng.gen_range(1..=3);
        let blocks: Vec<BlockSpec> = (0..n)
            .map(|_| BlockSpec { left: rng.gen_range(1..=3), right: rng.gen_range(1..=3), weight: rng.gen_range(0.2..1.0) })
            .collect();
        let spec = MarkovSpec { a_dim, c_dim, blocks, seed };
        if spec.b_dim() <= 16 && a_dim * c_dim * spec.b_dim() <= 256 {
            return spec;
        }
    }
}

#[test]
fn fifty_random_chains_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let parts = Tripartition::abc();
    for k in 0..50 {
        let spec = random_spec(&mut rng, 1000 + k);
        let rho = make_markov_state(&spec).unwrap();
        assert!(cmi(&rho, &["A"], &["B"], &["C"]).unwrap().abs() < 1e-10);
        let d = markov_decompose(&rho, &parts, 1e-8).unwrap_or_else(|e| panic!("spec {spec:?}: {e}"));
        let err = d.reconstruction_error(&rho).unwrap();
        assert!(err < 1e-8, "spec {spec:?}: reconstruction {err:e}");
        let inv = d.invariant_defects();
        assert!(inv.weight_sum < 1e-9 && inv.orthogonality < 1e-8, "{inv:?}");
        assert!(verify_projector_factorization(&d, &rho).unwrap().pass);
        assert!(check_commutation(&rho, &parts, 1e-8).unwrap().pass);
        assert!(check_product_lemma(&rho, &parts, 1e-8).unwrap().pass);
        let back = read_decomposition(&write_decomposition(&d)).unwrap();
        assert!(back.reconstruction_error(&rho).unwrap() < 1e-8);
    }
}

#[test]
fn multi_label_parties() {
    // Split A and C into two qubits each and list them out of order.
    let spec = MarkovSpec {
        a_dim: 4,
        c_dim: 4,
        blocks: vec![BlockSpec { left: 2, right: 1, weight: 1.0 }, BlockSpec { left: 1, right: 2, weight: 1.0 }],
        seed: 77,
    };
    let rho = make_markov_state(&spec).unwrap();
    let m = rho.matrix().clone();
    let space = bootstrap_core::tensor::FactorSpace::new([("a1", 2), ("a2", 2), ("B", 4), ("c1", 2), ("c2", 2)]).unwrap();
    let rho = bootstrap_core::tensor::DensityOperator::new(space, m).unwrap();
    let parts = Tripartition::new(["a1", "a2"], ["B"], ["c1", "c2"]);
    let d = markov_decompose(&rho, &parts, 1e-8).unwrap();
    assert_eq!(d.block_count(), 2);
    assert!(d.reconstruction_error(&rho).unwrap() < 1e-8);
}
