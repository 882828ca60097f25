//! Encodes messages into the Steane-based clock code, corrupts one qubit at a
//! time and reports the recovered trace distance.
//!
//! cargo run --release --example qlwc_recovery -- 0.5 100

use std::time::Instant;

use clockforge::linalg::StateVector;
use clockforge::qlwc::{build_qlwc, CssCode, ErrorChannel, Region};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let delta: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let draws: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let start = Instant::now();
    let code = build_qlwc(CssCode::steane7(), delta)?;
    println!("{}", serde_json::to_string_pretty(&code.params)?);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let messages = [
        ("0", StateVector::basis(clockforge::linalg::RegisterShape::qubits(1), 0)),
        ("plus", StateVector::plus()),
        ("bell", StateVector::bell()),
    ];
    for (name, m) in &messages {
        let junk = code.junk_weight(m)?;
        let mut worst = 0.0f64;
        for i in 0..code.params.n {
            let e = ErrorChannel::erasure(&code, &[(Region::State, i)])?;
            worst = worst.max(code.recovery_trial(m, &e)?.distance);
        }
        for j in 0..draws {
            let e = ErrorChannel::random_single(&code, (Region::State, j % code.params.n), &mut rng)?;
            worst = worst.max(code.recovery_trial(m, &e)?.distance);
        }
        println!(
            "message={name} δ′={:.4} (bound {:.4}) junk_times={:?} worst_distance={worst:.4} (δ={delta})",
            junk.delta_prime, junk.bound, junk.bad_times
        );
    }
    println!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
