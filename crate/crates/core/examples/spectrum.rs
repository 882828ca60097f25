//! Low spectrum of the qutrit chain by full diagonalization and by Lanczos.
//!
//! cargo run --release --example spectrum -- 6

use std::time::Instant;

use clockforge::linalg::{eigensolve_hermitian, EigenConfig};
use clockforge::lngs::build_lngs_hamiltonian;

fn main() -> clockforge::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let h = build_lngs_hamiltonian(n)?;
    let dense = EigenConfig { full_diag_cap: usize::MAX, ..EigenConfig::default() };
    let sparse = EigenConfig { dense_cap: 1, full_diag_cap: 1, ..EigenConfig::default() };
    for (name, cfg) in [("dense", dense), ("lanczos", sparse)] {
        let start = Instant::now();
        let s = eigensolve_hermitian(&h.terms, 4, &cfg)?;
        println!("{name:>8} {:?}: {:?} residuals {:?} {:.2?}", s.method, s.values, s.residuals, start.elapsed());
    }
    Ok(())
}
