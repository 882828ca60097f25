//! Builds a history state for a random circuit and compares tracing out the
//! clock then a set of state sites against averaging the reduced snapshots.
//!
//! cargo run --release --example history_traceorder

use clockforge::circuits::random::random_gate_sequence;
use clockforge::clock::{history_state, verify_traceorder};
use clockforge::linalg::random::random_state;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut c = random_gate_sequence(4, 6, &mut rng)?;
    c.witness_count = 2;
    let w = random_state(c.witness_shape(), &mut rng);
    for k in 1..=2 {
        let psi = history_state(&c, &w, k)?;
        for traced in [vec![], vec![0], vec![1, 3], vec![0, 1, 2]] {
            let full = verify_traceorder(&psi, &traced, 1 << 20)?;
            let branches = verify_traceorder(&psi, &traced, 1)?;
            println!("k={k} S={traced:?}: full-space distance {:.1e}, branch distance {:.1e}", full.distance, branches.distance);
        }
    }
    Ok(())
}
