//! Wraps a two-qubit circuit in encode, wait and decode steps and runs the
//! verifier on an honest history state and on random junk.

use clockforge::circuits::{Circuit, Gate};
use clockforge::linalg::{RegisterShape, StateVector};
use clockforge::qlwc::{equivalence_error, CssCode, VerifierInstance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let inner = CssCode::code422();
    let yes = Circuit::with_gates(RegisterShape::qubits(2), 1, vec![Gate::cnot(0, 1)])?;
    let v = VerifierInstance::new(&yes, &inner, 2)?;
    let t = &v.transformed;
    println!(
        "T_V={} K={} T_C={} waiting fraction {} equivalence error {:.1e}",
        t.t_v,
        t.k_wait,
        t.t_c,
        t.waiting_fraction,
        equivalence_error(&yes, t, &inner)?
    );
    for bit in 0..2 {
        let w = StateVector::basis(RegisterShape::qubits(1), bit);
        let r = v.run(&v.history_preparer(&w)?)?;
        println!("witness |{bit}>: {}", serde_json::to_string(&r)?);
    }
    let no = Circuit::with_gates(RegisterShape::qubits(2), 1, vec![Gate::swap(0, 1)])?;
    let vn = VerifierInstance::new(&no, &inner, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let r = vn.run(&vn.junk_preparer(&mut rng)?)?;
        println!("junk on no-instance: accept {:.3e} energy {:.4}", r.accept_probability, r.energy);
    }
    Ok(())
}
