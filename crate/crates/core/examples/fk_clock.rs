//! Builds Feynman-Kitaev Hamiltonians for the cat circuit with clocks of
//! dimension 1 to 3 and prints the term counts and locality audit.
//!
//! cargo run --release --example fk_clock -- 5

use clockforge::circuits::cat_circuit;
use clockforge::clock::{build_fk_hamiltonian, clock_state, ClockLayout, FkOptions};

fn main() -> clockforge::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let c = cat_circuit(n)?;
    for k in 1..=3 {
        let layout = ClockLayout::new(k, c.len())?;
        let first: Vec<String> =
            (0..=c.len().min(4)).map(|t| clock_state(k, t, c.len()).map(|b| b.label())).collect::<Result<_, _>>()?;
        let fk = build_fk_hamiltonian(&c, &FkOptions { clock_dimension: k, ..FkOptions::default() })?;
        println!(
            "k={k} base={} clock qubits={} terms={:?} max locality {} (bound {})",
            layout.base,
            fk.clock_sites(),
            fk.terms.count_by_tag(),
            fk.max_locality(),
            fk.locality_bound()
        );
        println!("  clock strings t=0..: {}", first.join(" "));
    }
    Ok(())
}
