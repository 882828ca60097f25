use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, Gate};
use crate::error::Result;
use crate::linalg::random::haar_unitary;
use crate::linalg::RegisterShape;

/// A circuit of `depth` layers on `n` sites of dimension `q`. Each layer
/// pairs up a random matching of the sites with Haar two-site gates, and
/// leftover sites get a Haar one-site gate with probability ½.
pub fn random_layered_circuit<R: Rng + ?Sized>(n: usize, q: usize, depth: usize, rng: &mut R) -> Result<Circuit> {
    let shape = RegisterShape::uniform(n, q)?;
    let mut c = Circuit::new(shape, 0)?;
    let mut sites: Vec<usize> = (0..n).collect();
    for layer in 0..depth {
        sites.shuffle(rng);
        let pairs = rng.random_range(0..=n / 2);
        for p in 0..pairs {
            let (a, b) = (sites[2 * p], sites[2 * p + 1]);
            c.push(Gate::new(format!("U{}_{p}", layer + 1), vec![a, b], haar_unitary(q * q, rng))?)?;
        }
        for &s in &sites[2 * pairs..] {
            if rng.random_bool(0.5) {
                c.push(Gate::new(format!("V{}_{s}", layer + 1), vec![s], haar_unitary(q, rng))?)?;
            }
        }
    }
    Ok(c)
}

/// Random circuit of `len` gates, each on one or two random qubits.
pub fn random_gate_sequence<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Result<Circuit> {
    let mut c = Circuit::new(RegisterShape::qubits(n), 0)?;
    for i in 0..len {
        if n >= 2 && rng.random_bool(0.6) {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            c.push(Gate::new(format!("G{i}"), vec![a, b], haar_unitary(4, rng))?)?;
        } else {
            let a = rng.random_range(0..n);
            c.push(Gate::new(format!("G{i}"), vec![a], haar_unitary(2, rng))?)?;
        }
    }
    Ok(c)
}
