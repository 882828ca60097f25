//! Feynman-Kitaev clock Hamiltonians.
//!
//! The register is the clock (sites `0..nt`) followed by the circuit's
//! register. Terms:
//!
//! * `in`: `A_0 ⊗ (I − |0⟩⟨0|)` on each checked ancilla site;
//! * `out`: `A_T ⊗ (I − |1⟩⟨1|)` on site 0 of the circuit register;
//! * `prop`: `½(A_t + A_{t−1} − X_t ⊗ C_t − X_t† ⊗ C_t†)` for `t = 1..T`,
//!   where `X_t` moves the clock from `t − 1` to `t`;
//! * `stab`: `Π⁰_{R_i(j−1)} Π¹_{R_i(j)}` inside every register, plus `A_s` for
//!   each register configuration `s > T` that no time uses.
//!
//! `A_t` checks at most two qubits per register, so with the one-qubit flip
//! of `X_t` a propagation term touches at most `2k + 1` clock qubits.

use super::layout::{ClockLayout, Transition};
use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::linalg::{HermitianTermSum, LocalOp, LocalTerm, RegisterShape, TermTag, C64};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FkOptions {
    pub include_in: bool,
    pub include_out: bool,
    /// Circuit sites that must start in `|0⟩`; `None` means every ancilla.
    pub in_checked_sites: Option<Vec<usize>>,
    pub clock_dimension: usize,
}

impl Default for FkOptions {
    fn default() -> Self {
        Self { include_in: true, include_out: true, in_checked_sites: None, clock_dimension: 1 }
    }
}

impl FkOptions {
    /// `H_in + H_prop + H_stab`, the variant whose ground space is the set of
    /// history states.
    pub fn without_out(k: usize) -> Self {
        Self { include_out: false, clock_dimension: k, ..Self::default() }
    }
}

/// A clock Hamiltonian together with the layout needed to read it.
#[derive(Clone, Debug)]
pub struct ClockHamiltonian {
    pub layout: ClockLayout,
    pub state_shape: RegisterShape,
    pub terms: HermitianTermSum,
    pub has_wide_gates: bool,
}

impl ClockHamiltonian {
    pub fn clock_sites(&self) -> usize {
        self.layout.num_sites()
    }

    pub fn max_locality(&self) -> usize {
        self.terms.max_locality()
    }

    /// The locality promised for this clock: `2k + 3`, or 5 for unary.
    pub fn locality_bound(&self) -> usize {
        2 * self.layout.k + 3
    }
}

/// Projector factor list over clock qubits: `(site, level)` pairs.
type Pattern = Vec<(usize, usize)>;

/// `v_{i,c}`: the qubits that pin register `i` to value `c`.
fn value_pattern(layout: &ClockLayout, register: usize, c: usize) -> Pattern {
    let len = layout.register_len();
    let mut p = Vec::new();
    if len == 0 {
        return p;
    }
    if c >= 1 {
        p.push((layout.site(register, c), 1));
    }
    if c < len {
        p.push((layout.site(register, c + 1), 0));
    }
    p
}

fn time_pattern(layout: &ClockLayout, values: &[usize]) -> Pattern {
    values.iter().enumerate().flat_map(|(i, &c)| value_pattern(layout, i, c)).collect()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn ket_bra_op(d: usize, a: usize, b: usize) -> LocalOp {
    LocalOp::from_entries(d, [(a, b, one())])
}

fn projector(level: usize) -> LocalOp {
    ket_bra_op(2, level, level)
}

/// Builds `⊗ factors` over `sites` (sorted), identity where absent.
fn clock_operator(sites: &[usize], factors: &[(usize, LocalOp)]) -> LocalOp {
    let mut m = LocalOp::identity(1);
    for s in sites {
        let f = factors.iter().find(|(site, _)| site == s).map(|(_, f)| f.clone()).unwrap_or_else(|| LocalOp::identity(2));
        m = m.kron(&f);
    }
    m
}

fn pattern_factors(p: &Pattern) -> Vec<(usize, LocalOp)> {
    p.iter().map(|&(s, l)| (s, projector(l))).collect()
}

fn sorted_sites(p: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut v: Vec<usize> = p.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Term `clock ⊗ state_op` with the clock operator given by factors.
fn clock_state_term(
    clock_sites: &[usize],
    clock_factors: &[(usize, LocalOp)],
    state_sites: &[usize],
    state_op: &LocalOp,
    nt: usize,
    tag: TermTag,
) -> LocalTerm {
    let cm = clock_operator(clock_sites, clock_factors);
    let mut support = clock_sites.to_vec();
    support.extend(state_sites.iter().map(|s| s + nt));
    LocalTerm::from_op(support, cm.kron(state_op), tag)
}

fn transition_factors(layout: &ClockLayout, tr: Transition) -> Vec<(usize, LocalOp)> {
    let (lo, hi) = (tr.from.min(tr.to), tr.from.max(tr.to));
    // The flipped qubit is R(hi); its neighbours R(lo) and R(hi + 1) are checked.
    let mut f = Vec::new();
    if lo >= 1 {
        f.push((layout.site(tr.register, lo), projector(1)));
    }
    let flip = if tr.to > tr.from { ket_bra_op(2, 1, 0) } else { ket_bra_op(2, 0, 1) };
    f.push((layout.site(tr.register, hi), flip));
    if hi < layout.register_len() {
        f.push((layout.site(tr.register, hi + 1), projector(0)));
    }
    f
}

/// Propagation term for step `t` with gate matrix `gate` on `gate_sites`.
fn prop_term(layout: &ClockLayout, t: usize, gate_sites: &[usize], gate: &LocalOp, nt: usize) -> Result<LocalTerm> {
    let tr = layout.transition(t)?;
    let before = layout.register_values_unchecked(t - 1);
    let after = layout.register_values_unchecked(t);
    let mut x_factors = transition_factors(layout, tr);
    for (i, &c) in before.iter().enumerate() {
        if i != tr.register {
            x_factors.extend(pattern_factors(&value_pattern(layout, i, c)));
        }
    }
    let pa = time_pattern(layout, &after);
    let pb = time_pattern(layout, &before);
    let sites = sorted_sites(x_factors.iter().map(|(s, _)| *s).chain(pa.iter().map(|p| p.0)).chain(pb.iter().map(|p| p.0)));
    let x = clock_operator(&sites, &x_factors);
    let a_t = clock_operator(&sites, &pattern_factors(&pa));
    let a_prev = clock_operator(&sites, &pattern_factors(&pb));
    let id = LocalOp::identity(gate.dim);
    let xc = x.kron(gate);
    let m = a_t.add(&a_prev).kron(&id).add(&xc.scale(-one())).add(&xc.adjoint().scale(-one())).scale(C64::new(0.5, 0.0));
    let mut support = sites;
    support.extend(gate_sites.iter().map(|s| s + nt));
    Ok(LocalTerm::from_op(support, m, TermTag::Prop).with_step(t))
}

pub fn build_fk_hamiltonian(c: &Circuit, opts: &FkOptions) -> Result<ClockHamiltonian> {
    let t_max = c.len();
    let layout = ClockLayout::new(opts.clock_dimension, t_max)?;
    let nt = layout.num_sites();
    let shape = layout.shape().concat(&c.shape);
    let mut h = HermitianTermSum::new(shape);
    let n = c.num_sites();

    if opts.include_in {
        let checked: Vec<usize> = match &opts.in_checked_sites {
            Some(s) => s.clone(),
            None => (c.witness_count..n).collect(),
        };
        c.shape.check_support(&checked)?;
        let p0 = time_pattern(&layout, &layout.register_values(0)?);
        let sites = sorted_sites(p0.iter().map(|p| p.0));
        for s in checked {
            let d = c.shape.dim(s);
            let nonzero = LocalOp::from_entries(d, (1..d).map(|l| (l, l, one())));
            h.push(clock_state_term(&sites, &pattern_factors(&p0), &[s], &nonzero, nt, TermTag::In))?;
        }
    }
    if opts.include_out {
        if n == 0 {
            return Err(Error::InvalidParameter("output check needs at least one site".into()));
        }
        let pt = time_pattern(&layout, &layout.register_values(t_max)?);
        let sites = sorted_sites(pt.iter().map(|p| p.0));
        let d = c.shape.dim(0);
        let reject = LocalOp::from_entries(d, (0..d).filter(|&l| l != 1).map(|l| (l, l, one())));
        h.push(clock_state_term(&sites, &pattern_factors(&pt), &[0], &reject, nt, TermTag::Out))?;
    }
    let mut wide = false;
    for (i, g) in c.gates.iter().enumerate() {
        let mut term = prop_term(&layout, i + 1, &g.support, &LocalOp::from_dense(&g.unitary), nt)?;
        if g.is_wide() {
            term.wide = true;
            wide = true;
        }
        h.push(term)?;
    }
    let len = layout.register_len();
    for i in 0..layout.k {
        for j in 2..=len {
            let f = vec![(layout.site(i, j - 1), projector(0)), (layout.site(i, j), projector(1))];
            let sites = sorted_sites(f.iter().map(|x| x.0));
            h.push(LocalTerm::from_op(sites.clone(), clock_operator(&sites, &f), TermTag::Stab))?;
        }
    }
    // Register configurations beyond T would otherwise be free zero-energy states.
    for s in (t_max + 1)..layout.capacity() {
        let p = time_pattern(&layout, &layout.register_values_unchecked(s));
        let sites = sorted_sites(p.iter().map(|x| x.0));
        h.push(LocalTerm::from_op(sites.clone(), clock_operator(&sites, &pattern_factors(&p)), TermTag::Stab))?;
    }
    Ok(ClockHamiltonian { layout, state_shape: c.shape.clone(), terms: h, has_wide_gates: wide })
}
