use std::collections::BTreeSet;

use clockforge::circuits::{
    cat_circuit, disjoint_lightcones, effect_zone_and_shadow, factorization_check, layerize, lightcone, lightcone_relation,
    parse_circuit, random::random_layered_circuit, Circuit, CircuitFile, Gate, Layering,
};
use clockforge::linalg::{pauli, random::haar_unitary, LocalTerm, RegisterShape, StateVector, TermTag, C64};
use clockforge::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

/// Four qudits, three layers: U11 on {0,1}, U12 on {2}, U13 on {3};
/// U21 on {1,2}; U31 on {2}, U32 on {3}. Gate indices follow that order.
fn worked_figure() -> Layering {
    let supports = vec![vec![0, 1], vec![2], vec![3], vec![1, 2], vec![2], vec![3]];
    Layering::from_layers(4, supports, vec![vec![0, 1, 2], vec![3], vec![4, 5]]).unwrap()
}

#[test]
fn worked_figure_lightcone_and_shadow() {
    let l = worked_figure();
    let k = lightcone(&l, &[1]).unwrap();
    // U11, U12 and U21 all lie in the backward cone of qudit 1.
    assert_eq!(k.lightcone_gates, set(&[0, 1, 3]));
    assert_eq!(k.lightcone_support, set(&[0, 1, 2]));
    let e = effect_zone_and_shadow(&l, &[1]).unwrap();
    assert_eq!(e.effect_zone_gates, set(&[0, 1, 3, 4]));
    assert_eq!(e.shadow, set(&[0, 1, 2]));
    assert!(e.lightcone_gates.is_subset(&e.effect_zone_gates));
    assert!(e.shadow.len() <= e.shadow_bound());
    assert!(disjoint_lightcones(&l, &[1], &[3]).unwrap());
    let rel = lightcone_relation(&l, &[1], &[3]).unwrap();
    assert!(rel.outside_shadow && rel.gates_disjoint);
    assert!(!disjoint_lightcones(&l, &[1], &[2]).unwrap());
}

#[test]
fn trivial_lightcones() {
    let empty = layerize(&Circuit::new(RegisterShape::qubits(3), 0).unwrap());
    assert_eq!(empty.depth(), 0);
    let k = effect_zone_and_shadow(&empty, &[1]).unwrap();
    assert!(k.lightcone_gates.is_empty());
    assert_eq!(k.lightcone_support, set(&[1]));
    assert_eq!(k.shadow, set(&[1]));

    let c = Circuit::with_gates(RegisterShape::qubits(3), 0, vec![Gate::cnot(0, 1)]).unwrap();
    let l = layerize(&c);
    assert!(lightcone(&l, &[2]).unwrap().lightcone_gates.is_empty());
    assert_eq!(effect_zone_and_shadow(&l, &[1]).unwrap().shadow, set(&[0, 1]));
    assert!(matches!(lightcone(&l, &[3]), Err(Error::SiteOutOfRange { .. })));
}

#[test]
fn cat_circuit_prepares_the_cat_state() {
    for n in 1..=6 {
        let c = cat_circuit(n).unwrap();
        let out = c.apply(&StateVector::zero(RegisterShape::qubits(n))).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let last = (1usize << n) - 1;
        for (i, a) in out.amplitudes.iter().enumerate() {
            let expect = if i == 0 || i == last { h } else { 0.0 };
            assert!((a - C64::new(expect, 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn cat_layering_is_sequential() {
    let l = layerize(&cat_circuit(3).unwrap());
    assert_eq!(l.depth(), 3);
    assert_eq!(l.layers, vec![vec![0], vec![1], vec![2]]);
}

#[test]
fn layering_is_minimal_and_non_overlapping() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let c = random_layered_circuit(6, 2, 4, &mut rng).unwrap();
        let l = layerize(&c);
        for layer in &l.layers {
            let mut seen = BTreeSet::new();
            for &g in layer {
                for &s in &c.gates[g].support {
                    assert!(seen.insert(s), "layer reuses site {s}");
                }
            }
        }
        // Greedy layering never exceeds the generator's own depth.
        assert!(l.depth() <= 4);
        // Each gate sits right after its latest predecessor on shared sites.
        for (g, gate) in c.gates.iter().enumerate() {
            let before = c.gates[..g]
                .iter()
                .enumerate()
                .filter(|(_, h)| h.support.iter().any(|s| gate.support.contains(s)))
                .map(|(h, _)| l.layer_of(h).unwrap() + 1)
                .max()
                .unwrap_or(0);
            assert_eq!(l.layer_of(g).unwrap(), before);
        }
    }
}

#[test]
fn json_round_trip_and_named_gates() {
    let text = r#"{"dims":[2,2,3],"witness_count":1,
        "gates":[{"label":"H","support":[0]},
                 {"label":"CNOT","support":[0,1]},
                 {"label":"U","support":[2],"unitary":[[0,1,0],[0,0,1],[1,0,0]]},
                 {"label":"P","support":[1],"unitary":[[1,0],[0,[0,1]]]}]}"#;
    let c = parse_circuit(text).unwrap();
    assert_eq!(c.len(), 4);
    assert_eq!(c.witness_count, 1);
    assert_eq!(c.gates[3].unitary[(1, 1)], C64::new(0.0, 1.0));
    let back = serde_json::to_string(&CircuitFile::from_circuit(&c)).unwrap();
    let again = parse_circuit(&back).unwrap();
    assert!((c.unitary(64).unwrap() - again.unitary(64).unwrap()).norm() < 1e-15);
}

#[test]
fn malformed_circuits_are_rejected() {
    let bad = [
        "{\"dims\":[2,2],\"gates\":[",
        r#"{"dims":[2],"gates":[{"label":"CNOT","support":[0,1]}]}"#,
        r#"{"dims":[2,2],"gates":[{"label":"U","support":[0],"unitary":[[1,1],[0,1]]}]}"#,
        r#"{"dims":[2,2],"gates":[{"label":"NOPE","support":[0]}]}"#,
        r#"{"dims":[2,2,2],"gates":[{"label":"U","support":[0,0],"unitary":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}]}"#,
    ];
    for text in bad {
        assert!(parse_circuit(text).is_err(), "{text}");
    }
    match parse_circuit("{\"dims\":[2,2],\n\"gates\":[}") {
        Err(Error::Parse(m)) => assert!(m.contains("line 2"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn inverse_undoes_the_circuit() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let c = random_layered_circuit(4, 3, 3, &mut rng).unwrap();
    let u = c.then(&c.inverse()).unwrap().unitary(1 << 8).unwrap();
    assert!((u - DMatrix::identity(81, 81)).norm() < 1e-12);
}

#[test]
fn factorization_on_product_and_cat_circuits() {
    let z = |s| LocalTerm::new(vec![s], pauli('Z'), TermTag::Other);
    let product = Circuit::new(RegisterShape::qubits(2), 0).unwrap();
    let f = factorization_check(&product, &z(0), &z(1), &[]).unwrap();
    assert!((f.lhs - 1.0).abs() < 1e-15 && (f.rhs - 1.0).abs() < 1e-15);
    assert!(f.lightcones_disjoint && !f.diagnostic);

    let cat = cat_circuit(3).unwrap();
    let f = factorization_check(&cat, &z(0), &z(2), &[]).unwrap();
    assert!((f.lhs - 1.0).abs() < 1e-14);
    assert!(f.rhs.abs() < 1e-14);
    assert!(f.diagnostic);
    assert!(factorization_check(&cat, &z(0), &z(0), &[]).is_err());
    assert!(factorization_check(&cat, &z(0), &z(2), &[2]).is_err());
}

fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let u = haar_unitary(d, rng);
    let diag =
        DMatrix::from_fn(d, d, |r, c| if r == c { C64::new(rng.random_range(-1.0..1.0), 0.0) } else { C64::new(0.0, 0.0) });
    let m = &u * diag * u.adjoint();
    (&m + m.adjoint()).map(|v| v * 0.5)
}

/// Sample 8-qudit circuits of depth at most 3 and operator pairs whose
/// lightcones are disjoint; returns (checked pairs, worst discrepancy,
/// worst shadow ratio).
fn factorization_sweep(circuits: usize, seed: u64) -> (usize, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut worst, mut ratio) = (0, 0.0f64, 0.0f64);
    let mut made = 0;
    while made < circuits {
        let q = rng.random_range(2..=3);
        let depth = rng.random_range(1..=3);
        let c = random_layered_circuit(8, q, depth, &mut rng).unwrap();
        let l = layerize(&c);
        let a = vec![rng.random_range(0..8)];
        let b_site = rng.random_range(0..8);
        if a.contains(&b_site) || !disjoint_lightcones(&l, &a, &[b_site]).unwrap() {
            continue;
        }
        made += 1;
        let shadow = effect_zone_and_shadow(&l, &a).unwrap();
        ratio = ratio.max(shadow.shadow.len() as f64 / shadow.shadow_bound() as f64);
        let ta = LocalTerm::new(a.clone(), random_hermitian(q, &mut rng), TermTag::Other);
        let tb = LocalTerm::new(vec![b_site], random_hermitian(q, &mut rng), TermTag::Other);
        let f = factorization_check(&c, &ta, &tb, &[]).unwrap();
        assert!(f.lightcones_disjoint);
        worst = worst.max(f.discrepancy);
        checked += 1;
    }
    (checked, worst, ratio)
}

#[test]
fn disjoint_lightcones_factorize_on_random_circuits() {
    let (checked, worst, ratio) = factorization_sweep(120, 77);
    assert_eq!(checked, 120);
    assert!(worst <= 1e-10, "discrepancy {worst}");
    assert!(ratio <= 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shadow_stays_within_its_bound(seed in any::<u64>(), depth in 0usize..=4, site in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_layered_circuit(8, 2, depth, &mut rng).unwrap();
        let l = layerize(&c);
        let r = effect_zone_and_shadow(&l, &[site]).unwrap();
        prop_assert!(r.shadow.len() <= r.shadow_bound());
        prop_assert!(r.lightcone_gates.is_subset(&r.effect_zone_gates));
        prop_assert!(r.lightcone_support.is_subset(&r.shadow));
    }

    #[test]
    fn outside_the_shadow_means_disjoint_lightcones(seed in any::<u64>(), a in 0usize..8, b in 0usize..8) {
        prop_assume!(a != b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_layered_circuit(8, 2, 3, &mut rng).unwrap();
        let rel = lightcone_relation(&layerize(&c), &[a], &[b]).unwrap();
        if rel.outside_shadow {
            prop_assert!(rel.gates_disjoint);
        }
    }

    #[test]
    fn disjoint_pairs_factorize(seed in any::<u64>(), a in 0usize..6, b in 0usize..6) {
        prop_assume!(a != b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_layered_circuit(6, 2, 2, &mut rng).unwrap();
        let ta = LocalTerm::new(vec![a], random_hermitian(2, &mut rng), TermTag::Other);
        let tb = LocalTerm::new(vec![b], random_hermitian(2, &mut rng), TermTag::Other);
        let f = factorization_check(&c, &ta, &tb, &[]).unwrap();
        if f.lightcones_disjoint {
            prop_assert!(f.discrepancy <= 1e-10);
        }
    }
}
