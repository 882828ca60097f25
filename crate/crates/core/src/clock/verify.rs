//! Numerical checks of the clock construction: trace order, ground-space
//! structure, closeness of low-energy states to history states, and the
//! yes-case energy bound.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::fk::{build_fk_hamiltonian, FkOptions};
use super::history::{history_state, ClockedState, HistoryState};
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{
    eigensolve_hermitian, trace_distance, DensityOperator, EigenConfig, HermitianTermSum, RegisterShape, StateVector, C64,
};
use crate::tolerances::EQ_TOL;

#[derive(Clone, Debug)]
pub struct TraceorderReport {
    /// `Tr_{S ∪ time}(|Ψ⟩⟨Ψ|)`, computed from the full clock ⊗ state vector
    /// when it fits under the vector cap and from clock branches otherwise.
    pub lhs: DensityOperator,
    /// `(T+1)^{-1} Σ_t Tr_S(|ψ_t⟩⟨ψ_t|)`.
    pub rhs: DensityOperator,
    pub distance: f64,
    pub full_space: bool,
}

/// Compares the two orders of tracing out time and the state sites `traced`.
pub fn verify_traceorder(psi: &HistoryState, traced: &[usize], vector_cap: usize) -> Result<TraceorderReport> {
    psi.circuit.shape.check_support(traced)?;
    let nt = psi.layout.num_sites();
    let clocked = psi.to_clocked();
    let (lhs, full_space) = match clocked.to_full(vector_cap) {
        Ok(full) => {
            let mut all: Vec<usize> = (0..nt).collect();
            all.extend(traced.iter().map(|s| s + nt));
            (full.reduced_density(&all)?, true)
        }
        Err(Error::DimensionTooLarge { .. }) => (clocked.time_traced().partial_trace(traced)?, false),
        Err(e) => return Err(e),
    };
    let rhs = psi.snapshot_average().partial_trace(traced)?;
    let distance = trace_distance(&lhs, &rhs)?;
    Ok(TraceorderReport { lhs, rhs, distance, full_space })
}

/// Orthonormal basis of the (numerically) zero-energy eigenspace plus the
/// gap above it.
#[derive(Clone, Debug)]
pub struct GroundSpace {
    pub shape: RegisterShape,
    pub energy: f64,
    pub basis: Vec<DVector<C64>>,
    /// First eigenvalue above the ground space.
    pub gap: f64,
}

impl GroundSpace {
    pub fn compute(h: &HermitianTermSum, expected_dim: usize, cfg: &EigenConfig) -> Result<Self> {
        let spec = eigensolve_hermitian(h, expected_dim + 1, cfg)?;
        let g = spec.ground_degeneracy(cfg.gap_tol);
        let gap = spec.gap(cfg.gap_tol).ok_or_else(|| Error::InvalidParameter("no eigenvalue above the ground space".into()))?;
        Ok(Self { shape: h.shape.clone(), energy: spec.values[0], basis: spec.vectors[..g].to_vec(), gap })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn project(&self, v: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(v.len());
        for b in &self.basis {
            out += b * b.dotc(v);
        }
        out
    }

    pub fn projector(&self) -> DMatrix<C64> {
        let n = self.shape.total_dim();
        let mut p = DMatrix::zeros(n, n);
        for b in &self.basis {
            p += b * b.adjoint();
        }
        p
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundSpaceReport {
    pub ground_energy: f64,
    pub ground_dim: usize,
    pub history_dim: usize,
    /// Largest entry of `P_ground − P_history`.
    pub projector_difference: f64,
    pub gap: f64,
}

impl GroundSpaceReport {
    pub fn matches(&self, tol: f64) -> bool {
        self.ground_energy.abs() <= tol && self.ground_dim == self.history_dim && self.projector_difference <= tol
    }
}

/// Diagonalizes `H_in + H_prop + H_stab` for `c` and compares its ground space
/// with the span of the history states of all basis witnesses.
pub fn ground_space_report(c: &Circuit, k: usize, cfg: &EigenConfig) -> Result<GroundSpaceReport> {
    let fk = build_fk_hamiltonian(c, &FkOptions::without_out(k))?;
    let wshape = c.witness_shape();
    let wdim = wshape.total_dim();
    let ground = GroundSpace::compute(&fk.terms, wdim, cfg)?;
    let n = fk.terms.dim();
    let mut p_hist = DMatrix::<C64>::zeros(n, n);
    for i in 0..wdim {
        let w = StateVector::basis(wshape.clone(), i);
        let h = history_state(c, &w, k)?.to_full(cfg.sparse_cap)?;
        p_hist += &h.amplitudes * h.amplitudes.adjoint();
    }
    let diff = (ground.projector() - p_hist).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    Ok(GroundSpaceReport {
        ground_energy: ground.energy,
        ground_dim: ground.dim(),
        history_dim: wdim,
        projector_difference: diff,
        gap: ground.gap,
    })
}

#[derive(Clone, Debug)]
pub struct ClosenessReport {
    /// `⟨η|H′|η⟩`.
    pub delta: f64,
    pub gap: f64,
    /// `Π_G η / ‖Π_G η‖`.
    pub projected: DVector<C64>,
    /// `‖ηη† − ΨΨ†‖₁`.
    pub distance: f64,
    /// `2√(δ/Δ)`.
    pub bound: f64,
    pub bound_ok: bool,
}

/// Projects `η` onto the ground space of `h` and checks
/// `‖ηη† − ΨΨ†‖₁ ≤ 2√(δ/Δ)`.
pub fn closeness_to_history(eta: &StateVector, h: &HermitianTermSum, ground: &GroundSpace) -> Result<ClosenessReport> {
    if eta.shape != h.shape || ground.shape != h.shape {
        return Err(Error::ShapeMismatch("state, Hamiltonian and ground space registers differ".into()));
    }
    let eta_n = &eta.amplitudes / C64::new(eta.norm(), 0.0);
    let delta = h.expectation(&StateVector { shape: eta.shape.clone(), amplitudes: eta_n.clone() })?;
    let proj = ground.project(&eta_n);
    let pn = proj.norm();
    if pn <= EQ_TOL {
        return Err(Error::OrthogonalToGroundSpace);
    }
    let psi = proj / C64::new(pn, 0.0);
    // For unit vectors ‖ηη† − ΨΨ†‖₁ = 2√(1 − |⟨η|Ψ⟩|²).
    let overlap = eta_n.dotc(&psi).norm_sqr().min(1.0);
    let distance = 2.0 * (1.0 - overlap).max(0.0).sqrt();
    let bound = 2.0 * (delta.max(0.0) / ground.gap).sqrt();
    Ok(ClosenessReport { delta, gap: ground.gap, projected: psi, distance, bound, bound_ok: distance <= bound + EQ_TOL })
}

#[derive(Clone, Debug, Serialize)]
pub struct KitaevReport {
    pub t_max: usize,
    pub accept_probability: f64,
    /// `⟨Ψ|H|Ψ⟩` for the full Hamiltonian including the output check.
    pub history_energy: f64,
    /// `γ/(T+1)` with `γ = 1 − Pr[accept]`.
    pub bound: f64,
    pub lambda_min: Option<f64>,
    pub ok: bool,
}

/// Probability that measuring site 0 of `C|ξ,0⟩` gives `|1⟩`.
pub fn accept_probability(c: &Circuit, witness: &StateVector) -> Result<f64> {
    let out = c.apply(&c.input_state(witness)?)?;
    let d0 = c.shape.dim(0);
    let p1 = crate::linalg::ket_bra(d0, 1, 1);
    Ok(out.local_expectation(&[0], &p1)?.re)
}

/// Checks `⟨Ψ|H|Ψ⟩ ≤ γ/(T+1)` on the witness's history state and, when the
/// full register fits the dense cap, that `λ_min(H)` does not exceed it.
pub fn kitaev_yes_bound(c: &Circuit, witness: &StateVector, gamma_target: f64, cfg: &EigenConfig) -> Result<KitaevReport> {
    let fk = build_fk_hamiltonian(c, &FkOptions::default())?;
    let hist: ClockedState = history_state(c, witness, 1)?.to_clocked();
    let energy = hist.expectation(&fk.terms)? / hist.norm_squared();
    let p = accept_probability(c, witness)?;
    let gamma = (1.0 - p).max(0.0);
    let t_max = c.len();
    let bound = gamma / (t_max + 1) as f64;
    let mut ok = energy <= bound + EQ_TOL && gamma <= gamma_target + EQ_TOL;
    let lambda_min = if fk.terms.dim() <= cfg.dense_cap {
        let l = eigensolve_hermitian(&fk.terms, 1, cfg)?.values[0];
        ok &= l <= energy + EQ_TOL;
        Some(l)
    } else {
        None
    };
    Ok(KitaevReport { t_max, accept_probability: p, history_energy: energy, bound, lambda_min, ok })
}

/// Lowest eigenvalue of the full Hamiltonian, used for no-case sanity checks.
pub fn lambda_min(c: &Circuit, cfg: &EigenConfig) -> Result<f64> {
    let fk = build_fk_hamiltonian(c, &FkOptions::default())?;
    Ok(eigensolve_hermitian(&fk.terms, 1, cfg)?.values[0])
}
