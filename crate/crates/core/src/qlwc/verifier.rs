//! Wrapping a verification circuit in encode, wait and decode steps, and the
//! verifier that reads its clock state.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::code::CssCode;
use crate::circuits::{Circuit, Gate};
use crate::clock::{build_fk_hamiltonian, history_state, ClockHamiltonian, ClockedMixture, ClockedState, FkOptions};
use crate::error::{Error, Result};
use crate::linalg::{ket_bra, ops, random::random_vector, DensityOperator, Ensemble, RegisterShape, StateVector, C64};

#[derive(Clone, Debug)]
pub struct TransformedCircuit {
    pub circuit: Circuit,
    pub t_v: usize,
    pub k_wait: usize,
    /// Gates of the original circuit.
    pub t_c: usize,
    pub waiting_fraction: f64,
}

impl TransformedCircuit {
    /// Times `t` at which the snapshot is the encoded input, `T_V ..= T_V + K`.
    pub fn waiting_times(&self) -> std::ops::RangeInclusive<usize> {
        self.t_v..=self.t_v + self.k_wait
    }
}

/// `V`, then `K = 2T_V + T_C` identities, then `V†`, then `C`, on the inner
/// code's register. The message of `C` occupies the first `k` code sites.
pub fn transform_error_corrected(c: &Circuit, inner: &CssCode) -> Result<TransformedCircuit> {
    if c.shape != RegisterShape::qubits(inner.k) {
        return Err(Error::ShapeMismatch(format!(
            "circuit acts on {:?} but the inner code encodes {} qubits",
            c.shape.dims(),
            inner.k
        )));
    }
    let t_v = inner.encoder_len();
    let t_c = c.len();
    let k_wait = 2 * t_v + t_c;
    let mut out = Circuit::new(RegisterShape::qubits(inner.n), c.witness_count)?;
    for g in &inner.encoder.gates {
        out.push(g.clone())?;
    }
    for _ in 0..k_wait {
        out.push(Gate::identity(0, 2))?;
    }
    for g in &inner.encoder.inverse().gates {
        out.push(g.clone())?;
    }
    for g in &c.gates {
        out.push(g.clone())?;
    }
    let total = out.len();
    Ok(TransformedCircuit { circuit: out, t_v, k_wait, t_c, waiting_fraction: k_wait as f64 / total as f64 })
}

/// Largest `‖C′|x,0⟩ − C|x⟩ ⊗ |0⟩‖` over computational basis inputs `x`.
pub fn equivalence_error(c: &Circuit, transformed: &TransformedCircuit, inner: &CssCode) -> Result<f64> {
    let anc = RegisterShape::qubits(inner.n - inner.k);
    let zero = StateVector::zero(anc);
    let mut worst = 0.0f64;
    for x in 0..(1usize << inner.k) {
        let input = StateVector::basis(c.shape.clone(), x);
        let expect = c.apply(&input)?.tensor(&zero);
        let got = transformed.circuit.apply(&input.tensor(&zero))?;
        worst = worst.max((got.amplitudes - expect.amplitudes).norm());
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifierReport {
    pub accept_probability: f64,
    /// Weight of the prepared state on clock values inside the waiting period.
    pub waiting_mass: f64,
    /// Acceptance conditioned on the waiting branches.
    pub inner_acceptance: f64,
    /// `waiting_mass · inner_acceptance`, a lower bound on the acceptance.
    pub waiting_contribution: f64,
    /// FK energy of the prepared state, including the output check.
    pub energy: f64,
    pub t_max: usize,
}

/// A toy verifier instance: the circuit, its transformed version, and the FK
/// Hamiltonian whose ground states the prover is asked to prepare.
#[derive(Clone, Debug)]
pub struct VerifierInstance {
    pub c: Circuit,
    pub inner: CssCode,
    pub transformed: TransformedCircuit,
    pub hamiltonian: ClockHamiltonian,
}

impl VerifierInstance {
    pub fn new(c: &Circuit, inner: &CssCode, clock_dim: usize) -> Result<Self> {
        let transformed = transform_error_corrected(c, inner)?;
        let opts = FkOptions { clock_dimension: clock_dim, ..FkOptions::default() };
        let hamiltonian = build_fk_hamiltonian(&transformed.circuit, &opts)?;
        Ok(Self { c: c.clone(), inner: inner.clone(), transformed, hamiltonian })
    }

    /// The exact history state of `C′` on `witness`.
    pub fn history_preparer(&self, witness: &StateVector) -> Result<ClockedMixture> {
        let psi = history_state(&self.transformed.circuit, witness, self.hamiltonian.layout.k)?;
        Ok(ClockedMixture::pure(psi.to_clocked()))
    }

    /// Random state-register vectors on every legal clock value.
    pub fn junk_preparer<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ClockedMixture> {
        let layout = &self.hamiltonian.layout;
        let shape = self.transformed.circuit.shape.clone();
        let mut s = ClockedState::new(layout.num_sites(), shape.clone());
        for t in 0..=layout.t_max {
            s.add_branch(layout.key(t)?, &random_vector(shape.total_dim(), false, rng));
        }
        let norm = s.norm_squared().sqrt();
        Ok(ClockedMixture::pure(s.scaled(C64::new(1.0 / norm, 0.0))))
    }

    /// Acceptance probability of the final measurement for one unnormalized
    /// branch vector on the code register.
    fn branch_acceptance(&self, v: &DVector<C64>, c_unitary: &DMatrix<C64>) -> Result<f64> {
        let shape = self.transformed.circuit.shape.clone();
        let mut w = v.clone();
        for g in &self.inner.encoder.inverse().gates {
            w = ops::apply_local(&shape, &g.support, &g.unitary, &w)?;
        }
        let k = self.inner.k;
        let anc: Vec<usize> = (k..self.inner.n).collect();
        let rho2 = Ensemble { shape, members: vec![w] }.reduced_density(&anc)?;
        let rho3 = reset_ancillas(&rho2, self.c.witness_count)?;
        let out = c_unitary * &rho3.matrix * c_unitary.adjoint();
        let out = DensityOperator { shape: rho3.shape.clone(), matrix: out };
        Ok(out.local_expectation(&[0], &ket_bra(2, 1, 1))?.re)
    }

    /// Trace out time, undo the encoder, trace the code ancillas, reset the
    /// circuit's own ancillas, run `C` and measure site 0.
    pub fn run(&self, prepared: &ClockedMixture) -> Result<VerifierReport> {
        let total = prepared.trace();
        if total <= 0.0 {
            return Err(Error::InvalidParameter("prepared state has zero norm".into()));
        }
        let layout = &self.hamiltonian.layout;
        let u = self.c.unitary(1 << 12)?;
        let waiting = self.transformed.waiting_times();
        let mut accept = 0.0;
        let mut waiting_mass = 0.0;
        let mut waiting_accept = 0.0;
        for comp in &prepared.components {
            if comp.state_shape != self.transformed.circuit.shape || comp.clock_sites != layout.num_sites() {
                return Err(Error::ShapeMismatch("prepared state does not match the verifier registers".into()));
            }
            for (&key, v) in &comp.branches {
                let p = self.branch_acceptance(v, &u)?;
                accept += p;
                if layout.time_of_key(key).is_some_and(|t| waiting.contains(&t)) {
                    waiting_mass += v.norm_squared();
                    waiting_accept += p;
                }
            }
        }
        let energy = prepared.expectation(&self.hamiltonian.terms)? / total;
        let inner_acceptance = if waiting_mass > 0.0 { waiting_accept / waiting_mass } else { 0.0 };
        Ok(VerifierReport {
            accept_probability: accept / total,
            waiting_mass: waiting_mass / total,
            inner_acceptance,
            waiting_contribution: waiting_accept / total,
            energy,
            t_max: layout.t_max,
        })
    }
}

/// `Tr_anc(ρ) ⊗ |0⟩⟨0|` on every site from `keep` on.
fn reset_ancillas(rho: &DensityOperator, keep: usize) -> Result<DensityOperator> {
    let n = rho.shape.len();
    if keep >= n {
        return Ok(rho.clone());
    }
    let anc: Vec<usize> = (keep..n).collect();
    let reduced = rho.partial_trace(&anc)?;
    let zero = StateVector::zero(rho.shape.select(&anc)).to_density();
    Ok(reduced.tensor(&zero))
}

/// Acceptance probability of the verifier on a prepared clocked state.
pub fn verifier_pipeline(prepared: &ClockedMixture, c: &Circuit, inner: &CssCode, clock_dim: usize) -> Result<f64> {
    Ok(VerifierInstance::new(c, inner, clock_dim)?.run(prepared)?.accept_probability)
}
