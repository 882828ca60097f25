use std::f64::consts::PI;

use clockforge::circuits::random::random_gate_sequence;
use clockforge::circuits::{cat_circuit, Circuit, Gate};
use clockforge::clock::{
    build_fk_hamiltonian, clock_state, closeness_to_history, ground_space_report, history_state, kitaev_yes_bound, lambda_min,
    unary_state, verify_traceorder, ClockLayout, ClockedState, FkOptions, GroundSpace,
};
use clockforge::linalg::random::{random_state, random_vector};
use clockforge::linalg::{eigensolve_hermitian, trace_distance, EigenConfig, RegisterShape, StateVector, TermTag, C64};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> EigenConfig {
    EigenConfig::default()
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `t` qubits padded with `n − t` zeros; for `t = 0`
/// just `|0…0⟩`.
fn cat_snapshot(t: usize, n: usize) -> DVector<C64> {
    let mut v = DVector::zeros(1 << n);
    if t == 0 {
        v[0] = C64::new(1.0, 0.0);
    } else {
        let s = 1.0 / 2f64.sqrt();
        v[0] = C64::new(s, 0.0);
        let ones = ((1usize << t) - 1) << (n - t);
        v[ones] += C64::new(s, 0.0);
    }
    v
}

/// Full-space cat history vector assembled bit by bit.
fn cat_history_by_hand(n: usize) -> DVector<C64> {
    let t_max = n;
    let mut out = DVector::zeros(1 << (t_max + n));
    let amp = 1.0 / ((t_max + 1) as f64).sqrt();
    for t in 0..=t_max {
        let clock = (1usize << t) - 1;
        let snap = cat_snapshot(t, n);
        for (i, a) in snap.iter().enumerate() {
            out[(clock << n) | i] += a * amp;
        }
    }
    out
}

#[test]
fn unary_examples() {
    assert_eq!(unary_state(0, 3).unwrap().label(), "000");
    assert_eq!(unary_state(2, 5).unwrap().label(), "00011");
    assert_eq!(unary_state(4, 4).unwrap().label(), "1111");
    assert!(unary_state(4, 3).is_err());
}

#[test]
fn one_dimensional_clock_is_unary() {
    for t_max in 0..=64 {
        for t in 0..=t_max {
            assert_eq!(clock_state(1, t, t_max).unwrap(), unary_state(t, t_max).unwrap());
        }
    }
}

#[test]
fn two_dimensional_clock_example() {
    let layout = ClockLayout::new(2, 8).unwrap();
    assert_eq!(layout.base, 4);
    let label = layout.label(5).unwrap();
    assert_eq!(label.digits, vec![1, 1]);
    // Reflected order: the low register runs downward on odd high digits.
    assert_eq!(label.register_values, vec![2, 1]);
    assert_eq!(clock_state(2, 0, 8).unwrap().label(), "000000");
    assert!(clock_state(2, 9, 8).is_err());
}

#[test]
fn clock_states_are_orthonormal_and_steps_flip_one_qubit() {
    for k in 1..=3 {
        for t_max in [1, 5, 8, 27, 64] {
            let layout = ClockLayout::new(k, t_max).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for t in 0..=t_max {
                let key = layout.key(t).unwrap();
                assert!(seen.insert(key), "k={k} T={t_max} t={t} repeats a clock string");
                assert_eq!(layout.time_of_key(key), Some(t));
                if t > 0 {
                    assert_eq!((key ^ layout.key(t - 1).unwrap()).count_ones(), 1);
                }
            }
        }
    }
}

#[test]
fn cat3_history_is_the_unique_ground_state() {
    let c = cat_circuit(3).unwrap();
    let fk = build_fk_hamiltonian(&c, &FkOptions::without_out(1)).unwrap();
    assert_eq!(fk.terms.dim(), 64);
    let spec = eigensolve_hermitian(&fk.terms, 2, &cfg()).unwrap();
    assert!(spec.values[0].abs() < 1e-10);
    assert_eq!(spec.ground_degeneracy(1e-8), 1);
    let expected = cat_history_by_hand(3);
    let overlap = spec.vectors[0].dotc(&expected).norm_sqr();
    assert!(overlap > 1.0 - 1e-9, "overlap {overlap}");

    let h = history_state(&c, &Circuit::no_witness(), 1).unwrap();
    let full = h.to_full(1 << 20).unwrap();
    assert!((full.amplitudes - expected).norm() < 1e-12);
}

#[test]
fn cat_snapshot_two() {
    let c = cat_circuit(3).unwrap();
    let h = history_state(&c, &Circuit::no_witness(), 1).unwrap();
    assert!((h.snapshots[2].amplitudes.clone() - cat_snapshot(2, 3)).norm() < 1e-12);
    assert!(h.recursion_error().unwrap() < 1e-12);
}

#[test]
fn empty_circuit_history_is_the_input() {
    let c = Circuit::new(RegisterShape::qubits(2), 1).unwrap();
    let w = StateVector::plus();
    let h = history_state(&c, &w, 1).unwrap();
    let full = h.to_full(1 << 10).unwrap();
    let expected = w.tensor(&StateVector::zero(RegisterShape::qubits(1)));
    assert_eq!(h.layout.num_sites(), 0);
    assert!((full.amplitudes - expected.amplitudes).norm() < 1e-15);
}

#[test]
fn locality_audit_for_higher_dimensional_clocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 1..=3 {
        for _ in 0..8 {
            let len = rng.random_range(1..=20);
            let c = random_gate_sequence(4, len, &mut rng).unwrap();
            let fk = build_fk_hamiltonian(&c, &FkOptions { clock_dimension: k, ..FkOptions::default() }).unwrap();
            assert!(fk.max_locality() <= 2 * k + 3, "k={k} len={len}: {}", fk.max_locality());
            assert_eq!(fk.locality_bound(), 2 * k + 3);
        }
    }
}

#[test]
fn stab_terms_vanish_on_legal_clocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=3 {
        let c = random_gate_sequence(2, 9, &mut rng).unwrap();
        let fk = build_fk_hamiltonian(&c, &FkOptions { clock_dimension: k, ..FkOptions::default() }).unwrap();
        let stab = fk.terms.filtered(|t| t == TermTag::Stab);
        if k > 1 {
            assert!(!stab.terms.is_empty());
        }
        for t in 0..=c.len() {
            let mut s = ClockedState::new(fk.clock_sites(), c.shape.clone());
            s.add_branch(fk.layout.key(t).unwrap(), &random_vector(4, false, &mut rng));
            for term in &stab.terms {
                assert_eq!(s.term_expectation(term).unwrap(), 0.0);
            }
        }
    }
}

#[test]
fn out_of_range_clock_readings_are_penalized() {
    // k = 2, T = 5 gives d = 4 and sixteen register readings, ten of them
    // unused. Without penalties each unused reading would add zero modes.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = random_gate_sequence(1, 5, &mut rng).unwrap();
    let fk = build_fk_hamiltonian(&c, &FkOptions::without_out(2)).unwrap();
    let spec = eigensolve_hermitian(&fk.terms, 3, &cfg()).unwrap();
    assert!(spec.values[0].abs() < 1e-10);
    assert_eq!(spec.ground_degeneracy(1e-8), 1);
    assert!(spec.values[1] > 1e-4);
}

#[test]
fn propagation_terms_vanish_on_history_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 1..=3 {
        let mut c = random_gate_sequence(3, 12, &mut rng).unwrap();
        c.witness_count = 1;
        let w = random_state(RegisterShape::qubits(1), &mut rng);
        let fk = build_fk_hamiltonian(&c, &FkOptions::without_out(k)).unwrap();
        let h = history_state(&c, &w, k).unwrap().to_clocked();
        for term in &fk.terms.terms {
            assert!(h.term_expectation(term).unwrap().abs() < 1e-10, "{:?} step {:?}", term.tag, term.step);
        }
    }
}

#[test]
fn accepting_history_has_zero_output_energy() {
    let c = Circuit::with_gates(RegisterShape::qubits(2), 0, vec![Gate::x(0), Gate::cnot(0, 1)]).unwrap();
    let fk = build_fk_hamiltonian(&c, &FkOptions::default()).unwrap();
    let h = history_state(&c, &Circuit::no_witness(), 1).unwrap().to_clocked();
    let out = fk.terms.filtered(|t| t == TermTag::Out);
    assert_eq!(out.len(), 1);
    assert!(h.expectation(&out).unwrap().abs() < 1e-12);
}

#[test]
fn legal_and_full_representations_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 1..=2 {
        for t_max in 1..=4 {
            let c = random_gate_sequence(2, t_max, &mut rng).unwrap();
            let fk = build_fk_hamiltonian(&c, &FkOptions { clock_dimension: k, ..FkOptions::default() }).unwrap();
            // A random superposition over legal clock readings.
            let mut s = ClockedState::new(fk.clock_sites(), c.shape.clone());
            for t in 0..=t_max {
                s.add_branch(fk.layout.key(t).unwrap(), &random_vector(4, false, &mut rng));
            }
            let full = s.to_full(1 << 16).unwrap();
            let e_legal = s.expectation(&fk.terms).unwrap();
            let e_full = fk.terms.expectation(&full).unwrap();
            assert!((e_legal - e_full).abs() < 1e-10, "k={k} T={t_max}: {e_legal} vs {e_full}");
            let hs = s.apply_sum(&fk.terms).unwrap().to_full(1 << 16).unwrap();
            let hf = fk.terms.apply(&full.amplitudes).unwrap();
            assert!((hs.amplitudes - hf).norm() < 1e-10);
        }
    }
}

#[test]
fn ground_space_is_spanned_by_history_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 1..=2 {
        let mut c = random_gate_sequence(2, 4, &mut rng).unwrap();
        c.witness_count = 1;
        let r = ground_space_report(&c, k, &cfg()).unwrap();
        assert!(r.matches(1e-8), "k={k}: {r:?}");
        assert!(r.gap > 1e-3);
    }
}

#[test]
fn traceorder_examples() {
    let c = cat_circuit(3).unwrap();
    let h = history_state(&c, &Circuit::no_witness(), 1).unwrap();
    let r = verify_traceorder(&h, &[], 1 << 20).unwrap();
    assert!(r.full_space);
    assert!(r.distance < 1e-12);
    let r = verify_traceorder(&h, &[2], 1 << 20).unwrap();
    assert!(r.distance < 1e-12);
    // Direct oracle for S = {state(3)}: average of the 2-qubit reduced snapshots.
    let mut expected = nalgebra::DMatrix::<C64>::zeros(4, 4);
    for t in 0..=3 {
        let v = cat_snapshot(t, 3);
        for a in 0..4 {
            for b in 0..4 {
                for l in 0..2 {
                    expected[(a, b)] += v[2 * a + l] * v[2 * b + l].conj() / C64::new(4.0, 0.0);
                }
            }
        }
    }
    assert!((r.lhs.matrix - expected).norm() < 1e-12);
    let r = verify_traceorder(&h, &[0, 1, 2], 1 << 20).unwrap();
    assert_eq!(r.lhs.matrix.nrows(), 1);
    assert!((r.lhs.matrix[(0, 0)].re - 1.0).abs() < 1e-12);
    // The clock-branch path gives the same answer.
    let r2 = verify_traceorder(&h, &[2], 1).unwrap();
    assert!(!r2.full_space);
    assert!(r2.distance < 1e-12);
}

#[test]
fn closeness_examples() {
    let c = cat_circuit(3).unwrap();
    let fk = build_fk_hamiltonian(&c, &FkOptions::without_out(1)).unwrap();
    let ground = GroundSpace::compute(&fk.terms, 1, &cfg()).unwrap();
    let hist = history_state(&c, &Circuit::no_witness(), 1).unwrap().to_full(1 << 20).unwrap();

    let r = closeness_to_history(&hist, &fk.terms, &ground).unwrap();
    assert!(r.delta.abs() < 1e-12 && r.distance < 1e-7 && r.bound_ok);

    // Mix in an excited eigenvector: the distance is 2√s exactly.
    let spec = eigensolve_hermitian(&fk.terms, 2, &cfg()).unwrap();
    let lambda = spec.values[1];
    let excited = &spec.vectors[1];
    for s in [1e-4f64, 1e-2, 0.1] {
        let v = &ground.basis[0] * C64::new((1.0 - s).sqrt(), 0.0) + excited * C64::new(s.sqrt(), 0.0);
        let eta = StateVector::new(fk.terms.shape.clone(), v).unwrap();
        let r = closeness_to_history(&eta, &fk.terms, &ground).unwrap();
        assert!((r.delta - s * lambda).abs() < 1e-9);
        assert!((r.distance - 2.0 * s.sqrt()).abs() < 1e-7);
        let direct = trace_distance(
            &eta.to_density(),
            &StateVector::new(fk.terms.shape.clone(), r.projected.clone()).unwrap().to_density(),
        )
        .unwrap();
        assert!((direct - r.distance).abs() < 1e-7);
        assert!(r.bound_ok);
    }

    let orth = StateVector::new(fk.terms.shape.clone(), excited.clone()).unwrap();
    assert!(closeness_to_history(&orth, &fk.terms, &ground).is_err());
}

#[test]
fn kitaev_examples() {
    let c = Circuit::with_gates(RegisterShape::qubits(1), 0, vec![Gate::x(0)]).unwrap();
    let r = kitaev_yes_bound(&c, &Circuit::no_witness(), 0.0, &cfg()).unwrap();
    assert!(r.ok && r.history_energy.abs() < 1e-12);

    // Pr[accept] = sin²(π/3) = 3/4, so γ = 1/4 and the energy is γ/2.
    let c = Circuit::with_gates(RegisterShape::qubits(1), 0, vec![Gate::ry(0, 2.0 * PI / 3.0)]).unwrap();
    let r = kitaev_yes_bound(&c, &Circuit::no_witness(), 0.25, &cfg()).unwrap();
    assert!((r.accept_probability - 0.75).abs() < 1e-12);
    assert!((r.history_energy - 0.125).abs() < 1e-12);
    assert!(r.ok);
    assert!(r.lambda_min.unwrap() <= 0.125 + 1e-10);

    for t in 1..=4 {
        let gates = (0..t).map(|_| Gate::identity(0, 2)).collect();
        let c = Circuit::with_gates(RegisterShape::qubits(1), 0, gates).unwrap();
        assert!(lambda_min(&c, &cfg()).unwrap() > 1e-4, "T={t}");
    }
}

#[test]
fn closeness_monte_carlo() {
    let c = cat_circuit(3).unwrap();
    let fk = build_fk_hamiltonian(&c, &FkOptions::without_out(1)).unwrap();
    let ground = GroundSpace::compute(&fk.terms, 1, &cfg()).unwrap();
    let hist = history_state(&c, &Circuit::no_witness(), 1).unwrap().to_full(1 << 20).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let scale: f64 = rng.random_range(1e-3..0.5);
        let v = &hist.amplitudes + random_vector(64, false, &mut rng) * C64::new(scale, 0.0);
        let eta = StateVector::new(fk.terms.shape.clone(), v).unwrap();
        assert!(closeness_to_history(&eta, &fk.terms, &ground).unwrap().bound_ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflected_values_round_trip(k in 1usize..4, t_max in 0usize..200, frac in 0.0f64..1.0) {
        let layout = ClockLayout::new(k, t_max).unwrap();
        let t = ((t_max as f64) * frac) as usize;
        let values = layout.register_values(t).unwrap();
        prop_assert!(values.iter().all(|&v| v < layout.base));
        prop_assert_eq!(layout.time_of_values(&values), t);
        let digits = layout.digits(t);
        let recomposed: usize = digits.iter().rev().fold(0, |acc, &a| acc * layout.base + a);
        prop_assert_eq!(recomposed, t);
    }

    #[test]
    fn fk_terms_have_bounded_norm(seed in 0u64..1000, k in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_gate_sequence(3, 7, &mut rng).unwrap();
        let fk = build_fk_hamiltonian(&c, &FkOptions { clock_dimension: k, ..FkOptions::default() }).unwrap();
        for t in &fk.terms.terms {
            prop_assert!(t.op.spectral_norm() <= 1.0 + 1e-10);
        }
    }
}
