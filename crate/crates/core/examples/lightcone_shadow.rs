//! Lightcone, effect zone and shadow on a random depth-2 circuit, followed by
//! the factorization check for a pair of sites with disjoint lightcones.
//!
//! cargo run --release --example lightcone_shadow -- 42

use clockforge::circuits::random::random_layered_circuit;
use clockforge::circuits::{effect_zone_and_shadow, factorization_check, layerize, lightcone_relation};
use clockforge::linalg::{pauli, LocalTerm, TermTag};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> clockforge::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = random_layered_circuit(8, 2, 2, &mut rng)?;
    let l = layerize(&c);
    println!("{} gates in {} layers", c.len(), l.depth());
    for s in 0..8 {
        let z = effect_zone_and_shadow(&l, &[s])?;
        println!(
            "site {s}: lightcone gates {:?} effect zone {:?} shadow {:?} (bound {})",
            z.lightcone_gates,
            z.effect_zone_gates,
            z.shadow,
            z.shadow_bound()
        );
    }
    let z = |s| LocalTerm::new(vec![s], pauli('Z'), TermTag::Other);
    for a in 0..8 {
        for b in a + 1..8 {
            if lightcone_relation(&l, &[a], &[b])?.disjoint() {
                let f = factorization_check(&c, &z(a), &z(b), &[])?;
                println!("Z{a} Z{b}: <AB> {:.6} <A><B> {:.6} discrepancy {:.1e}", f.lhs, f.rhs, f.discrepancy);
            }
        }
    }
    Ok(())
}
