//! Samples random ε-noisy ground states of the qutrit chain and reports the
//! pair and single-site inequalities over good indices.
//!
//! cargo run --release --example noisy_ground_states -- 8 0.125 200

use clockforge::lngs::{build_lngs_hamiltonian, contradiction_margin, depth_bound, monte_carlo};

fn main() -> clockforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.125);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);
    let h = build_lngs_hamiltonian(n)?;
    let rep = monte_carlo(&h, eps, trials, 3, 1)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);
    println!("stated bound holds: {}, corrected bound holds: {}", rep.passed(), rep.passed_corrected());
    println!(
        "depth bound ½log(n/2) = {:.4}, margin at δ=0 is {:.4}",
        depth_bound(n),
        contradiction_margin(eps.min(1.0 / 49.0), 0.0)
    );
    Ok(())
}
