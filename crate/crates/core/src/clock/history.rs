//! History states and the clock-branch representation.
//!
//! A [`ClockedState`] stores `Σ_c |c⟩ ⊗ |v_c⟩` as a map from clock basis
//! strings `c` to state-register vectors. A history state has one branch per
//! time; local terms and channels may create further branches (for instance a
//! flipped clock qubit) and those are kept like any other.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::layout::ClockLayout;
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::linalg::ops::LocalIndexer;
use crate::linalg::{
    DensityOperator, Ensemble, HermitianTermSum, KrausChannel, LocalOp, LocalTerm, RegisterShape, StateVector, C64,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ClockedState {
    pub clock_sites: usize,
    pub state_shape: RegisterShape,
    pub branches: BTreeMap<u128, DVector<C64>>,
}

/// Entries of a local operator regrouped by their clock input pattern.
struct SplitOp {
    /// `(site, bit offset within the clock key)` for each clock site in support order.
    clock_bits: Vec<u32>,
    state_sites: Vec<usize>,
    /// clock input bits → (clock output bits, state row, state column, value)
    by_input: BTreeMap<u128, Vec<(u128, usize, usize, C64)>>,
}

impl ClockedState {
    pub fn new(clock_sites: usize, state_shape: RegisterShape) -> Self {
        assert!(clock_sites <= 128, "clock keys hold at most 128 qubits");
        Self { clock_sites, state_shape, branches: BTreeMap::new() }
    }

    pub fn full_shape(&self) -> RegisterShape {
        RegisterShape::qubits(self.clock_sites).concat(&self.state_shape)
    }

    pub fn state_dim(&self) -> usize {
        self.state_shape.total_dim()
    }

    pub fn add_branch(&mut self, key: u128, v: &DVector<C64>) {
        match self.branches.get_mut(&key) {
            Some(w) => *w += v,
            None => {
                self.branches.insert(key, v.clone());
            }
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.branches.values().map(|v| v.norm_squared()).sum()
    }

    pub fn inner(&self, other: &ClockedState) -> C64 {
        self.branches.iter().filter_map(|(k, v)| other.branches.get(k).map(|w| v.dotc(w))).sum()
    }

    pub fn scaled(&self, s: C64) -> ClockedState {
        let mut out = self.clone();
        for v in out.branches.values_mut() {
            *v *= s;
        }
        out
    }

    fn split(&self, support: &[usize], op: &LocalOp) -> Result<SplitOp> {
        let full = self.full_shape();
        full.check_support(support)?;
        let dims: Vec<usize> = support.iter().map(|&s| full.dim(s)).collect();
        let local = RegisterShape::new(dims)?;
        if op.dim != local.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "operator of dimension {} on support of dimension {}",
                op.dim,
                local.total_dim()
            )));
        }
        let nt = self.clock_sites;
        let clock_pos: Vec<usize> = (0..support.len()).filter(|&p| support[p] < nt).collect();
        let state_pos: Vec<usize> = (0..support.len()).filter(|&p| support[p] >= nt).collect();
        let clock_bits: Vec<u32> = clock_pos.iter().map(|&p| (nt - 1 - support[p]) as u32).collect();
        let state_shape = RegisterShape::new(state_pos.iter().map(|&p| local.dim(p)).collect())?;
        let decompose = |i: usize| -> (u128, usize) {
            let levels = local.levels_of(i);
            let mut bits = 0u128;
            for (&p, &b) in clock_pos.iter().zip(&clock_bits) {
                bits |= (levels[p] as u128) << b;
            }
            let sl: Vec<usize> = state_pos.iter().map(|&p| levels[p]).collect();
            (bits, state_shape.index_of(&sl))
        };
        let mut by_input: BTreeMap<u128, Vec<(u128, usize, usize, C64)>> = BTreeMap::new();
        for &(r, c, v) in &op.entries {
            let (rb, rs) = decompose(r);
            let (cb, cs) = decompose(c);
            by_input.entry(cb).or_default().push((rb, rs, cs, v));
        }
        Ok(SplitOp { clock_bits, state_sites: state_pos.iter().map(|&p| support[p] - nt).collect(), by_input })
    }

    /// `(M ⊗ I)|self⟩` for `M` on `support`, sites numbered over clock then state.
    pub fn apply_op(&self, support: &[usize], op: &LocalOp) -> Result<ClockedState> {
        let split = self.split(support, op)?;
        let mask: u128 = split.clock_bits.iter().fold(0u128, |m, &b| m | (1u128 << b));
        let idx = LocalIndexer::new(&self.state_shape, &split.state_sites)?;
        let dim = self.state_dim();
        let mut out = ClockedState::new(self.clock_sites, self.state_shape.clone());
        for (&key, v) in &self.branches {
            let Some(entries) = split.by_input.get(&(key & mask)) else {
                continue;
            };
            let mut targets: BTreeMap<u128, DVector<C64>> = BTreeMap::new();
            for &(rb, rs, cs, x) in entries {
                let w = targets.entry((key & !mask) | rb).or_insert_with(|| DVector::zeros(dim));
                for &b in &idx.bases {
                    w[b + idx.offsets[rs]] += x * v[b + idx.offsets[cs]];
                }
            }
            for (k, w) in targets {
                out.add_branch(k, &w);
            }
        }
        Ok(out)
    }

    pub fn apply_term(&self, term: &LocalTerm) -> Result<ClockedState> {
        self.apply_op(&term.support, &term.op)
    }

    pub fn apply_sum(&self, h: &HermitianTermSum) -> Result<ClockedState> {
        self.check_register(&h.shape)?;
        let mut out = ClockedState::new(self.clock_sites, self.state_shape.clone());
        for t in &h.terms {
            for (k, w) in self.apply_term(t)?.branches {
                out.add_branch(k, &w);
            }
        }
        Ok(out)
    }

    fn check_register(&self, shape: &RegisterShape) -> Result<()> {
        if *shape != self.full_shape() {
            return Err(Error::ShapeMismatch(format!(
                "operator register {:?} does not match clocked register {:?}",
                shape.dims(),
                self.full_shape().dims()
            )));
        }
        Ok(())
    }

    pub fn term_expectation(&self, term: &LocalTerm) -> Result<f64> {
        Ok(self.inner(&self.apply_term(term)?).re)
    }

    /// `⟨self|H|self⟩`.
    pub fn expectation(&self, h: &HermitianTermSum) -> Result<f64> {
        self.check_register(&h.shape)?;
        let mut acc = 0.0;
        for t in &h.terms {
            acc += self.term_expectation(t)?;
        }
        Ok(acc)
    }

    pub fn to_full(&self, cap: usize) -> Result<StateVector> {
        let shape = self.full_shape();
        let dim = shape
            .checked_total_dim()
            .filter(|&d| d <= cap)
            .ok_or(Error::DimensionTooLarge { dim: shape.checked_total_dim().unwrap_or(usize::MAX), cap })?;
        let sd = self.state_dim();
        let mut amps = DVector::zeros(dim);
        for (&k, v) in &self.branches {
            let base = k as usize * sd;
            amps.rows_mut(base, sd).copy_from(v);
        }
        StateVector::new(shape, amps)
    }

    pub fn from_full(clock_sites: usize, state_shape: RegisterShape, v: &StateVector) -> Result<ClockedState> {
        let mut out = ClockedState::new(clock_sites, state_shape);
        if v.shape != out.full_shape() {
            return Err(Error::ShapeMismatch("full vector does not match clocked register".into()));
        }
        let sd = out.state_dim();
        for k in 0..(1usize << clock_sites) {
            let block = v.amplitudes.rows(k * sd, sd).into_owned();
            if block.norm() > 0.0 {
                out.branches.insert(k as u128, block);
            }
        }
        Ok(out)
    }

    /// `Tr_time |self⟩⟨self| = Σ_c v_c v_c†`.
    pub fn time_traced(&self) -> DensityOperator {
        let sd = self.state_dim();
        let mut m = DMatrix::<C64>::zeros(sd, sd);
        for v in self.branches.values() {
            m += v * v.adjoint();
        }
        DensityOperator { shape: self.state_shape.clone(), matrix: m }
    }

    /// The same reduced state kept as an ensemble of branch vectors.
    pub fn time_traced_ensemble(&self) -> Ensemble {
        Ensemble { shape: self.state_shape.clone(), members: self.branches.values().cloned().collect() }
    }

    pub fn apply_channel(&self, ch: &KrausChannel) -> Result<ClockedMixture> {
        ClockedMixture::pure(self.clone()).apply_channel(ch)
    }
}

/// `Σ_j |φ_j⟩⟨φ_j|` for unnormalized clocked components.
#[derive(Clone, Debug)]
pub struct ClockedMixture {
    pub components: Vec<ClockedState>,
}

impl ClockedMixture {
    pub fn pure(state: ClockedState) -> Self {
        Self { components: vec![state] }
    }

    pub fn trace(&self) -> f64 {
        self.components.iter().map(ClockedState::norm_squared).sum()
    }

    /// Applies a channel whose support is numbered over the full register.
    pub fn apply_channel(&self, ch: &KrausChannel) -> Result<ClockedMixture> {
        let ops: Vec<LocalOp> = ch.kraus.iter().map(LocalOp::from_dense).collect();
        let mut out = Vec::with_capacity(self.components.len() * ops.len());
        for c in &self.components {
            for k in &ops {
                let next = c.apply_op(&ch.support, k)?;
                if next.norm_squared() > 0.0 {
                    out.push(next);
                }
            }
        }
        Ok(ClockedMixture { components: out })
    }

    pub fn expectation(&self, h: &HermitianTermSum) -> Result<f64> {
        self.components.iter().map(|c| c.expectation(h)).sum()
    }

    pub fn time_traced(&self) -> Result<DensityOperator> {
        let first = self.components.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut acc = first.time_traced();
        for c in &self.components[1..] {
            acc.matrix += c.time_traced().matrix;
        }
        Ok(acc)
    }

    pub fn time_traced_ensemble(&self) -> Result<Ensemble> {
        let first = self.components.first().ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
        let mut members = Vec::new();
        for c in &self.components {
            members.extend(c.branches.values().cloned());
        }
        Ok(Ensemble { shape: first.state_shape.clone(), members })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    LegalSubspace,
    FullSpace,
}

/// `(T+1)^{-1/2} Σ_t |clock_k(t)⟩ ⊗ |ψ_t⟩`.
#[derive(Clone, Debug)]
pub struct HistoryState {
    pub circuit: Circuit,
    pub witness: StateVector,
    pub layout: ClockLayout,
    pub snapshots: Vec<StateVector>,
}

pub fn history_state(c: &Circuit, witness: &StateVector, k: usize) -> Result<HistoryState> {
    let input = c.input_state(witness)?;
    let snapshots = c.snapshots(&input)?;
    Ok(HistoryState { circuit: c.clone(), witness: witness.clone(), layout: ClockLayout::new(k, c.len())?, snapshots })
}

impl HistoryState {
    pub fn t_max(&self) -> usize {
        self.layout.t_max
    }

    /// Largest `‖ψ_t − C_t ψ_{t−1}‖`, zero up to rounding by construction.
    pub fn recursion_error(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for (t, g) in self.circuit.gates.iter().enumerate() {
            let next = self.snapshots[t].apply_local(&g.support, &g.unitary)?;
            worst = worst.max((next.amplitudes - &self.snapshots[t + 1].amplitudes).norm());
        }
        Ok(worst)
    }

    pub fn to_clocked(&self) -> ClockedState {
        let mut out = ClockedState::new(self.layout.num_sites(), self.circuit.shape.clone());
        let amp = C64::new(1.0 / ((self.t_max() + 1) as f64).sqrt(), 0.0);
        for (t, s) in self.snapshots.iter().enumerate() {
            let key = self.layout.key(t).expect("t within range");
            out.add_branch(key, &(&s.amplitudes * amp));
        }
        out
    }

    pub fn to_full(&self, cap: usize) -> Result<StateVector> {
        self.to_clocked().to_full(cap)
    }

    /// `(T+1)^{-1} Σ_t ψ_t ψ_t†`.
    pub fn snapshot_average(&self) -> DensityOperator {
        let sd = self.circuit.shape.total_dim();
        let mut m = DMatrix::<C64>::zeros(sd, sd);
        for s in &self.snapshots {
            m += &s.amplitudes * s.amplitudes.adjoint();
        }
        m /= C64::new((self.t_max() + 1) as f64, 0.0);
        DensityOperator { shape: self.circuit.shape.clone(), matrix: m }
    }
}
