//! The cat-circuit clock Hamiltonian fused onto a line of qutrits.
//!
//! Pair `i` (1-based) joins clock qubit `time(i)` with state qubit `state(i)`.
//! On the three states the history state ever uses the fusion reads
//! `|1⟩_time|x⟩_state ↦ |x⟩` and `|0⟩_time|0⟩_state ↦ |2⟩`; the fourth state
//! `|0⟩_time|1⟩_state` is dropped.
//!
//! The input check `A_0 ⊗ (I − |0⟩⟨0|)_state(i)` would couple pair 1 to pair
//! `i`. It is replaced by the pair-local `|0⟩⟨0|_time(i) ⊗ |1⟩⟨1|_state(i)`,
//! which penalizes exactly the dropped state and so vanishes after fusion.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::circuits::{cat_circuit, Circuit};
use crate::clock::{build_fk_hamiltonian, history_state, ClockHamiltonian, ClockedState, FkOptions};
use crate::error::{Error, Result};
use crate::linalg::ops::embed_local;
use crate::linalg::{ket_bra, HermitianTermSum, LocalTerm, RegisterShape, StateVector, TermTag, C64};

/// `J : C³ → C² ⊗ C²` (time ⊗ state), the inverse of the fusion relabeling.
pub fn fusion_isometry() -> DMatrix<C64> {
    let one = C64::new(1.0, 0.0);
    let mut j = DMatrix::zeros(4, 3);
    j[(0b10, 0)] = one;
    j[(0b11, 1)] = one;
    j[(0b00, 2)] = one;
    j
}

/// Qutrit level of a (time, state) bit pair, `None` for the dropped pattern.
pub fn fuse_pair(time: usize, state: usize) -> Option<usize> {
    match (time, state) {
        (1, x) => Some(x),
        (0, 0) => Some(2),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct QutritChainHamiltonian {
    pub n: usize,
    pub terms: HermitianTermSum,
    /// The qubit Hamiltonian before fusion, with the pair-local input check.
    pub qubit: ClockHamiltonian,
    pub circuit: Circuit,
}

/// Clock and state sites of pair `i ∈ 1..=n` in the qubit register.
fn pair_sites(n: usize, i: usize) -> (usize, usize) {
    (n - i, n + i - 1)
}

fn pair_of_site(n: usize, site: usize) -> usize {
    if site < n {
        n - site
    } else {
        site - n + 1
    }
}

pub fn build_lngs_hamiltonian(n: usize) -> Result<QutritChainHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidParameter("the qutrit chain needs n ≥ 2".into()));
    }
    let circuit = cat_circuit(n)?;
    let opts = FkOptions { include_in: false, include_out: false, in_checked_sites: None, clock_dimension: 1 };
    let mut qubit = build_fk_hamiltonian(&circuit, &opts)?;
    for i in 1..=n {
        let (ts, ss) = pair_sites(n, i);
        qubit.terms.push(LocalTerm::new(vec![ts, ss], ket_bra(4, 0b01, 0b01), TermTag::In))?;
    }
    let mut terms = HermitianTermSum::new(RegisterShape::uniform(n, 3)?);
    let j = fusion_isometry();
    for t in &qubit.terms.terms {
        let pairs: BTreeSet<usize> = t.support.iter().map(|&s| pair_of_site(n, s)).collect();
        let pairs: Vec<usize> = pairs.into_iter().collect();
        let mut sites = Vec::with_capacity(2 * pairs.len());
        for &p in &pairs {
            let (a, b) = pair_sites(n, p);
            sites.push(a);
            sites.push(b);
        }
        let local_shape = RegisterShape::qubits(sites.len());
        let local_support: Vec<usize> =
            t.support.iter().map(|s| sites.iter().position(|x| x == s).expect("site in pair")).collect();
        let m = embed_local(&local_shape, &local_support, &t.matrix())?;
        let mut jj = DMatrix::<C64>::identity(1, 1);
        for _ in &pairs {
            jj = jj.kronecker(&j);
        }
        let fused = jj.adjoint() * m * &jj;
        if fused.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let support: Vec<usize> = pairs.iter().map(|p| p - 1).collect();
        let mut term = LocalTerm::new(support, fused, t.tag);
        term.step = t.step;
        terms.push(term)?;
    }
    Ok(QutritChainHamiltonian { n, terms, qubit, circuit })
}

/// Maps a clocked state of the qubit register onto the qutrit chain. Returns
/// the fused vector and the weight found on the dropped pattern.
pub fn fuse_clocked(n: usize, s: &ClockedState) -> Result<(StateVector, f64)> {
    if s.clock_sites != n || s.state_shape != RegisterShape::qubits(n) {
        return Err(Error::ShapeMismatch("clocked state is not an n-pair register".into()));
    }
    let shape = RegisterShape::uniform(n, 3)?;
    let mut amps = nalgebra::DVector::<C64>::zeros(shape.total_dim());
    let mut dropped = 0.0;
    for (&key, v) in &s.branches {
        for (x, &a) in v.iter().enumerate() {
            if a.norm() == 0.0 {
                continue;
            }
            let mut levels = Vec::with_capacity(n);
            let mut ok = true;
            for i in 1..=n {
                let (ts, ss) = pair_sites(n, i);
                let tb = ((key >> (n - 1 - ts)) & 1) as usize;
                let sb = (x >> (n - 1 - (ss - n))) & 1;
                match fuse_pair(tb, sb) {
                    Some(l) => levels.push(l),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                amps[shape.index_of(&levels)] += a;
            } else {
                dropped += a.norm_sqr();
            }
        }
    }
    Ok((StateVector::new(shape, amps)?, dropped))
}

impl QutritChainHamiltonian {
    /// The cat history state carried onto the chain.
    pub fn history_state(&self) -> Result<StateVector> {
        let h = history_state(&self.circuit, &Circuit::no_witness(), 1)?.to_clocked();
        Ok(fuse_clocked(self.n, &h)?.0)
    }

    /// Largest contiguous window any term touches.
    pub fn max_window(&self) -> usize {
        self.terms
            .terms
            .iter()
            .map(|t| t.support.iter().max().unwrap_or(&0) - t.support.iter().min().unwrap_or(&0) + 1)
            .max()
            .unwrap_or(0)
    }

    /// Every support is a run of consecutive sites of length at most 3.
    pub fn is_line_local(&self) -> bool {
        self.terms.terms.iter().all(|t| {
            let mut s = t.support.clone();
            s.sort_unstable();
            s.len() <= 3 && s.windows(2).all(|w| w[1] == w[0] + 1)
        })
    }

    /// `max |J†H_qubit J − H_chain|` over matrix entries, for small `n`.
    pub fn restriction_error(&self, cap: usize) -> Result<f64> {
        let n = self.n;
        let hq = self.qubit.terms.to_dense(cap)?;
        let hc = self.terms.to_dense(cap)?;
        // Column x of J^{⊗n} in the qubit register ordering (clock then state).
        let shape = self.terms.shape.clone();
        let qdim = 1usize << (2 * n);
        let mut jfull = DMatrix::<C64>::zeros(qdim, shape.total_dim());
        for x in 0..shape.total_dim() {
            let levels = shape.levels_of(x);
            let mut idx = 0usize;
            let mut bits = vec![0usize; 2 * n];
            for (p, &l) in levels.iter().enumerate() {
                let (ts, ss) = pair_sites(n, p + 1);
                let (tb, sb) = match l {
                    0 => (1, 0),
                    1 => (1, 1),
                    _ => (0, 0),
                };
                bits[ts] = tb;
                bits[ss] = sb;
            }
            for b in bits {
                idx = (idx << 1) | b;
            }
            jfull[(idx, x)] = C64::new(1.0, 0.0);
        }
        let restricted = jfull.adjoint() * hq * &jfull;
        Ok((restricted - hc).iter().fold(0.0f64, |m, z| m.max(z.norm())))
    }
}

/// `A_i = |0⟩⟨0| + |2⟩⟨2|`.
pub fn a_observable() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(3, 3);
    m[(0, 0)] = C64::new(1.0, 0.0);
    m[(2, 2)] = C64::new(1.0, 0.0);
    m
}

/// `B_j = |1⟩⟨1| + |2⟩⟨2|`.
pub fn b_observable() -> DMatrix<C64> {
    let mut m = DMatrix::zeros(3, 3);
    m[(1, 1)] = C64::new(1.0, 0.0);
    m[(2, 2)] = C64::new(1.0, 0.0);
    m
}

/// `Tr(A_i ΨΨ†) = (n+1+i)/(2(n+1))` for the 1-based index `i`; the same
/// value holds for `B_i`.
pub fn single_site_formula(n: usize, i: usize) -> f64 {
    (n + 1 + i) as f64 / (2 * (n + 1)) as f64
}
