//! Fuses the cat-circuit clock Hamiltonian onto a qutrit line and checks that
//! its unique ground state is the fused history state.
//!
//! cargo run --release --example lngs_chain -- 7

use std::time::Instant;

use clockforge::linalg::{eigensolve_hermitian, EigenConfig};
use clockforge::lngs::build_lngs_hamiltonian;

fn main() -> clockforge::Result<()> {
    let max_n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let cfg = EigenConfig::default();
    for n in 3..=max_n {
        let start = Instant::now();
        let h = build_lngs_hamiltonian(n)?;
        let spec = eigensolve_hermitian(&h.terms, 2, &cfg)?;
        let psi = h.history_state()?;
        let overlap = spec.vectors[0].dotc(&psi.amplitudes).norm_sqr();
        println!(
            "n={n} dim={} terms={} window={} λ0={:.2e} λ1={:.4} overlap={:.12} method={:?} {:.2?}",
            h.terms.dim(),
            h.terms.len(),
            h.max_window(),
            spec.values[0],
            spec.values[1],
            overlap,
            spec.method,
            start.elapsed()
        );
    }
    Ok(())
}
