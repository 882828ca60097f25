//! Perturbs the cat history state and compares the trace distance to the
//! ground space with the energy bound 2√(⟨η|H|η⟩/Δ).
//!
//! cargo run --release --example closeness

use clockforge::circuits::{cat_circuit, Circuit};
use clockforge::clock::{build_fk_hamiltonian, closeness_to_history, history_state, FkOptions, GroundSpace};
use clockforge::linalg::random::random_vector;
use clockforge::linalg::{EigenConfig, StateVector, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let c = cat_circuit(3)?;
    let fk = build_fk_hamiltonian(&c, &FkOptions::without_out(1))?;
    let ground = GroundSpace::compute(&fk.terms, 1, &EigenConfig::default())?;
    let hist = history_state(&c, &Circuit::no_witness(), 1)?.to_full(1 << 20)?;
    println!("gap Δ = {:.6}", ground.gap);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for scale in [1e-3, 1e-2, 0.1, 0.5, 2.0] {
        let v = &hist.amplitudes + random_vector(hist.dim(), false, &mut rng) * C64::new(scale, 0.0);
        let eta = StateVector::new(fk.terms.shape.clone(), v)?;
        let r = closeness_to_history(&eta, &fk.terms, &ground)?;
        println!("scale {scale:>6}: energy {:.3e} distance {:.4} bound {:.4} ok {}", r.delta, r.distance, r.bound, r.bound_ok);
    }
    Ok(())
}
