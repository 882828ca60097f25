use clockforge::circuits::{Circuit, Gate};
use clockforge::clock::{ClockedMixture, GroundSpace};
use clockforge::linalg::{
    random::random_state, trace_distance, EigenConfig, Ensemble, KrausChannel, RegisterShape, StateVector, C64,
};
use clockforge::qlwc::*;
use clockforge::Error;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn zero() -> StateVector {
    StateVector::basis(RegisterShape::qubits(1), 0)
}

fn one() -> StateVector {
    StateVector::basis(RegisterShape::qubits(1), 1)
}

fn overlap_mask(word: u64, support: &[usize]) -> u32 {
    support.iter().filter(|&&s| word >> s & 1 == 1).count() as u32
}

/// Bit of site `s` in a 7-qubit basis index (site 0 most significant).
fn word_of_index(i: usize, n: usize) -> u64 {
    (0..n).filter(|&s| i >> (n - 1 - s) & 1 == 1).fold(0, |m, s| m | 1 << s)
}

#[test]
fn steane_structure() {
    let c = CssCode::steane7();
    assert!(c.stabilizers_commute());
    assert!(c.encoder_stabilizer_error().unwrap() <= 1e-10);
    assert_eq!(c.brute_force_distance().unwrap(), 3);
    assert_eq!(c.encoder_len(), 12);
    assert!(c.encoder.gates.iter().all(|g| g.arity() <= 2));
    assert_eq!(c.correctable(), 1);
}

#[test]
fn small_codes() {
    let c = CssCode::code422();
    assert!(c.stabilizers_commute());
    assert!(c.encoder_stabilizer_error().unwrap() <= 1e-10);
    assert_eq!(c.brute_force_distance().unwrap(), 2);
    assert_eq!(c.encoder_len(), 6);
    let id = CssCode::identity(2).unwrap();
    assert_eq!(id.brute_force_distance().unwrap(), 1);
    assert_eq!(id.encoder_len(), 1);
    assert!(CssCode::by_name("nope").is_err());
}

#[test]
fn steane_zero_is_even_hamming_codewords() {
    // Oracle: the 16 words with even overlap on each check form the Hamming
    // code; its 8 even-weight words carry |0_L⟩ with equal amplitude.
    let code = CssCode::steane7();
    let enc = code.encoder.apply(&code.encoder.input_state(&zero()).unwrap()).unwrap();
    let checks = [vec![0, 1, 4, 5], vec![0, 2, 4, 6], vec![3, 4, 5, 6]];
    let mut count = 0;
    for i in 0..128 {
        let w = word_of_index(i, 7);
        let in_code = checks.iter().all(|c| overlap_mask(w, c).is_multiple_of(2)) && w.count_ones().is_multiple_of(2);
        let a = enc.amplitudes[i];
        if in_code {
            count += 1;
            assert!((a - C64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-12, "word {w:07b}");
        } else {
            assert!(a.norm() < 1e-12);
        }
    }
    assert_eq!(count, 8);
}

#[test]
fn low_weight_paulis_are_detected() {
    let code = CssCode::steane7();
    let mut checked = 0;
    for a in 0..7 {
        for b in a..7 {
            let sites: Vec<usize> = if a == b { vec![a] } else { vec![a, b] };
            // Each site carries X, Y or Z.
            for kinds in 0..3usize.pow(sites.len() as u32) {
                let (mut x, mut z) = (0u64, 0u64);
                let mut k = kinds;
                for &s in &sites {
                    match k % 3 {
                        0 => x |= 1 << s,
                        1 => z |= 1 << s,
                        _ => {
                            x |= 1 << s;
                            z |= 1 << s;
                        }
                    }
                    k /= 3;
                }
                assert!(code.detects(x, z), "undetected X{x:07b} Z{z:07b}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 21 + 9 * 21);
}

/// Encode, apply `ch` to the code qubits, correct, unencode, trace ancillas.
fn bare_roundtrip(code: &CssCode, message: &StateVector, ch: &KrausChannel) -> f64 {
    let enc = code.encoder.apply(&code.encoder.input_state(message).unwrap()).unwrap();
    let noisy = ch.apply_ensemble(&Ensemble::pure(&enc)).unwrap();
    let fixed = code.correct(&noisy, 0).unwrap();
    let inv = code.encoder.inverse();
    let members = fixed
        .members
        .iter()
        .map(|v| {
            let s = StateVector { shape: fixed.shape.clone(), amplitudes: v.clone() };
            inv.apply(&s).unwrap().amplitudes
        })
        .collect();
    let anc: Vec<usize> = (code.k..code.n).collect();
    let out = Ensemble { shape: fixed.shape.clone(), members }.reduced_density(&anc).unwrap();
    trace_distance(&out, &message.to_density()).unwrap()
}

#[test]
fn single_erasures_are_corrected_without_a_clock() {
    let code = CssCode::steane7();
    for site in 0..7 {
        let ch = KrausChannel::maximally_mixed(vec![site], vec![2]);
        for m in [zero(), one(), StateVector::plus()] {
            assert!(bare_roundtrip(&code, &m, &ch) < 1e-10, "site {site}");
        }
    }
}

#[test]
fn two_errors_can_defeat_the_steane_decoder() {
    let code = CssCode::steane7();
    let x = Gate::x(0).unitary;
    let xx = x.kronecker(&x);
    let ch = KrausChannel::new(vec![1, 2], vec![2, 2], vec![xx], "xx").unwrap();
    assert!(bare_roundtrip(&code, &zero(), &ch) > 1.0);
}

#[test]
fn wait_lengths() {
    let v = CssCode::steane7().encoder;
    let (c, k) = build_wait_circuit(&v, 0.5).unwrap();
    assert_eq!((k, c.len()), (180, 192));
    assert!(c.gates[12..].iter().all(|g| g.label == "I"));
    assert_eq!(build_wait_circuit(&v, 2.0).unwrap().1, 1);
    let id = CssCode::identity(2).unwrap().encoder;
    assert_eq!(build_wait_circuit(&id, 1.0).unwrap().1, 3);
    assert!(matches!(build_wait_circuit(&v, 0.0), Err(Error::InvalidParameter(_))));
    assert!(build_wait_circuit(&v, -0.1).is_err());
}

#[test]
fn choose_r_examples() {
    assert_eq!(choose_r(49, 7).unwrap(), 2);
    assert_eq!(choose_r(192, 7).unwrap(), 3);
    // δ² = n^{-a} makes T_C grow like n^{2+a}.
    for (n, a) in [(4usize, 1u32), (3, 2), (5, 1)] {
        assert_eq!(choose_r(n.pow(2 + a), n).unwrap(), 2 + a as usize);
    }
    assert!(choose_r(1, 7).is_err());
    assert!(r_closed_form(0.5, 7) > 2.0);
}

#[test]
fn flagship_parameters() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    let p = &code.params;
    assert_eq!((p.k_wait, p.t_c, p.t_v, p.r, p.w), (180, 192, 12, 3, 9));
    assert_eq!(p.clock_sites, 18);
    assert_eq!(p.m, 25);
    assert_eq!(p.m_bound, 28);
    assert!(p.measured_locality <= 9);
    assert!(p.identities_hold());
    assert!((p.waiting_mass - 181.0 / 193.0).abs() < 1e-15);
    assert!(p.waiting_mass >= 1.0 - 0.25 * 0.25);
}

#[test]
fn tiny_instance_ground_space_has_dimension_q_to_the_k() {
    let code = build_qlwc(CssCode::identity(2).unwrap(), 1.0).unwrap();
    assert_eq!(code.params.t_c, 4);
    let h = &code.hamiltonian.terms;
    assert!(h.dim() <= 64);
    let ground = GroundSpace::compute(h, 4, &EigenConfig::default()).unwrap();
    assert_eq!(ground.dim(), 4);
    assert!(ground.energy.abs() < 1e-10);
    // Every encoding lies inside it.
    for i in 0..4 {
        let m = StateVector::basis(RegisterShape::qubits(2), i);
        let v = code.encode(&m).unwrap().to_full(1 << 10).unwrap();
        let p = ground.project(&v.amplitudes);
        assert!((p - &v.amplitudes).norm() < 1e-9);
    }
}

#[test]
fn encodings_have_zero_energy() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    assert!(code.encoded_energy(&zero()).unwrap().abs() < 1e-10);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let xi = random_state(RegisterShape::qubits(1), &mut rng);
        assert!(code.encoded_energy(&xi).unwrap().abs() < 1e-10);
    }
    assert!(code.encoded_energy(&StateVector::bell()).unwrap().abs() < 1e-10);
}

#[test]
fn encoding_time_trace_is_the_snapshot_average() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    let psi = code.encode(&StateVector::plus()).unwrap();
    let lhs = psi.to_clocked().time_traced();
    let rhs = psi.snapshot_average();
    assert!(trace_distance(&lhs, &rhs).unwrap() < 1e-12);
    // Snapshots from T_V on are the encoded state.
    let encoded = &psi.snapshots[12];
    for s in &psi.snapshots[12..] {
        assert!((&s.amplitudes - &encoded.amplitudes).norm() < 1e-14);
    }
}

#[test]
fn error_free_decoding() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    for m in [zero(), StateVector::plus(), StateVector::bell()] {
        let out = code.decode(&code.encode_clocked(&m).unwrap()).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-12);
        assert!(trace_distance(&out, &m.to_density()).unwrap() <= 0.5);
        let junk = code.junk_weight(&m).unwrap();
        assert!(junk.delta_prime <= 0.0625 + 1e-10, "{junk:?}");
        assert!(junk.junk_min_eigenvalue >= -1e-10);
        // The decoded state is exactly the stated mixture.
        let good = 1.0 - junk.delta_prime;
        assert!((out.fidelity_with_pure(&m) - good).abs() <= junk.delta_prime + 1e-12);
        assert!(junk.bad_times.iter().all(|&t| t < 12));
    }
}

#[test]
fn erasure_and_budget() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let e = ErrorChannel::parse(&code, "erase:state:3", &mut rng).unwrap();
    assert_eq!(e.state_support, vec![3]);
    for m in [zero(), StateVector::bell()] {
        let r = code.recovery_trial(&m, &e).unwrap();
        assert!(r.ok, "{r:?}");
    }
    let two = ErrorChannel::parse(&code, "erase:state:2,5", &mut rng).unwrap();
    let enc = code.encode_clocked(&zero()).unwrap();
    assert!(matches!(code.apply_error(&enc, &two), Err(Error::ErrorBudget { support: 2, budget: 1 })));
    assert!(ErrorChannel::parse(&code, "erase:state:9", &mut rng).is_err());
    assert!(ErrorChannel::parse(&code, "melt:state:1", &mut rng).is_err());
}

#[test]
fn identity_channel_leaves_the_encoding_alone() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    let enc = code.encode_clocked(&StateVector::plus()).unwrap();
    let out = code.apply_error(&enc, &ErrorChannel::identity(&code)).unwrap();
    assert_eq!(out.components.len(), 1);
    assert_eq!(out.components[0], enc.components[0]);
}

#[test]
fn random_single_qubit_channels_are_recovered() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..10 {
        let e = ErrorChannel::random_single(&code, (Region::State, trial % 7), &mut rng).unwrap();
        let r = code.recovery_trial(&StateVector::plus(), &e).unwrap();
        assert!(r.ok, "{r:?}");
    }
}

#[test]
fn clock_erasures_are_recovered() {
    let code = build_qlwc(CssCode::steane7(), 0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for site in [0, 5, 6, 17] {
        let e = ErrorChannel::parse(&code, &format!("erase:clock:{site}"), &mut rng).unwrap();
        let r = code.recovery_trial(&StateVector::bell(), &e).unwrap();
        assert!(r.ok, "{r:?}");
    }
}

#[test]
fn decoding_after_errors_is_contractive() {
    // Full-space check on the tiny instance: the distance between two encoded
    // states bounds the distance between their decodings.
    let code = build_qlwc(CssCode::identity(2).unwrap(), 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // The identity code corrects nothing, so only the zero-weight channel is allowed.
    let ident = ErrorChannel::identity(&code);
    for _ in 0..5 {
        let a = random_state(RegisterShape::qubits(2), &mut rng);
        let b = random_state(RegisterShape::qubits(2), &mut rng);
        let ea = code.encode(&a).unwrap().to_full(1 << 10).unwrap().to_density();
        let eb = code.encode(&b).unwrap().to_full(1 << 10).unwrap().to_density();
        let before = trace_distance(&ea, &eb).unwrap();
        let da = code.decode(&code.apply_error(&code.encode_clocked(&a).unwrap(), &ident).unwrap()).unwrap();
        let db = code.decode(&code.apply_error(&code.encode_clocked(&b).unwrap(), &ident).unwrap()).unwrap();
        assert!(trace_distance(&da, &db).unwrap() <= before + 1e-10);
    }
}

#[test]
fn transform_with_identity_stub() {
    let stub = CssCode::identity(1).unwrap();
    let c = Circuit::with_gates(RegisterShape::qubits(1), 1, vec![Gate::x(0)]).unwrap();
    let t = transform_error_corrected(&c, &stub).unwrap();
    let labels: Vec<&str> = t.circuit.gates.iter().map(|g| g.label.as_str()).collect();
    assert_eq!(labels, ["I", "I", "I", "I", "I†", "X"]);
    assert_eq!(t.k_wait, 3);
    assert_eq!(t.waiting_fraction, 0.5);
    assert!(equivalence_error(&c, &t, &stub).unwrap() < 1e-12);
}

#[test]
fn transform_with_four_qubit_code() {
    let inner = CssCode::code422();
    let c = Circuit::with_gates(RegisterShape::qubits(2), 1, vec![Gate::h(0), Gate::cnot(0, 1), Gate::s(1)]).unwrap();
    let t = transform_error_corrected(&c, &inner).unwrap();
    assert_eq!(t.k_wait, 2 * 6 + 3);
    assert_eq!(t.waiting_fraction, 0.5);
    assert!(equivalence_error(&c, &t, &inner).unwrap() <= 1e-10);
    let wrong = Circuit::with_gates(RegisterShape::qubits(3), 1, vec![Gate::x(0)]).unwrap();
    assert!(transform_error_corrected(&wrong, &inner).is_err());
}

fn accept_one_circuit() -> Circuit {
    Circuit::with_gates(RegisterShape::qubits(2), 1, vec![Gate::cnot(0, 1)]).unwrap()
}

#[test]
fn verifier_accepts_history_state() {
    let inner = CssCode::code422();
    let v = VerifierInstance::new(&accept_one_circuit(), &inner, 2).unwrap();
    assert_eq!(v.transformed.circuit.len(), 26);
    assert_eq!(v.transformed.waiting_fraction, 0.5);
    let prepared = v.history_preparer(&one()).unwrap();
    let r = v.run(&prepared).unwrap();
    assert!(r.accept_probability >= 0.25, "{r:?}");
    assert!((r.waiting_mass - 14.0 / 27.0).abs() < 1e-12);
    assert!((r.inner_acceptance - 1.0).abs() < 1e-12);
    assert!(r.accept_probability + 1e-12 >= r.waiting_mass * r.inner_acceptance);
    assert!(r.energy.abs() < 1e-10);
    let p = verifier_pipeline(&prepared, &accept_one_circuit(), &inner, 2).unwrap();
    assert!((p - r.accept_probability).abs() < 1e-14);
}

#[test]
fn verifier_rejects_junk_on_a_no_instance() {
    let inner = CssCode::code422();
    let no = Circuit::with_gates(RegisterShape::qubits(2), 1, vec![Gate::swap(0, 1)]).unwrap();
    let v = VerifierInstance::new(&no, &inner, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let junk = v.junk_preparer(&mut rng).unwrap();
        assert!(v.run(&junk).unwrap().accept_probability <= 0.05);
    }
    assert!(v.run(&v.history_preparer(&one()).unwrap()).unwrap().accept_probability <= 0.05);
}

#[test]
fn verifier_rejects_mismatched_registers() {
    let inner = CssCode::code422();
    let v = VerifierInstance::new(&accept_one_circuit(), &inner, 2).unwrap();
    let other = VerifierInstance::new(&accept_one_circuit(), &inner, 1).unwrap();
    let prepared: ClockedMixture = other.history_preparer(&one()).unwrap();
    assert!(v.run(&prepared).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn wait_length_is_minimal(t_v in 1usize..60, delta in 0.05f64..1.99) {
        let v = Circuit::with_gates(
            RegisterShape::qubits(1),
            1,
            (0..t_v).map(|_| Gate::x(0)).collect(),
        ).unwrap();
        let (_, k) = build_wait_circuit(&v, delta).unwrap();
        // K/(T_V+K) ≥ 1 − δ²/4  ⇔  K δ² ≥ (4 − δ²) T_V.
        let d2 = delta * delta;
        let holds = |k: usize| k as f64 * d2 >= (4.0 - d2) * t_v as f64 - 1e-9;
        prop_assert!(holds(k));
        prop_assert!(k == 1 || !holds(k - 1));
    }

    #[test]
    fn choose_r_is_the_smallest_cover(t_c in 2usize..5000, n in 2usize..12) {
        let r = choose_r(t_c, n).unwrap() as u32;
        prop_assert!(n.pow(r) >= t_c);
        prop_assert!(r == 1 || n.pow(r - 1) < t_c);
    }
}

#[test]
fn correction_keeps_the_trace() {
    let code = CssCode::steane7();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let v = random_state(RegisterShape::qubits(7), &mut rng);
    let e = Ensemble { shape: v.shape.clone(), members: vec![v.amplitudes.clone()] };
    let out = code.correct(&e, 0).unwrap();
    assert!((out.trace() - 1.0).abs() < 1e-12);
    let empty = Ensemble { shape: RegisterShape::qubits(3), members: vec![DVector::zeros(8)] };
    assert!(code.correct(&empty, 0).is_err());
}
