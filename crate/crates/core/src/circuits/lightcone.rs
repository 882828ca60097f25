//! Lightcones, effect zones and shadows of local operators measured after a
//! layered circuit.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use super::{layerize, Circuit, Layering};
use crate::error::{Error, Result};
use crate::linalg::{LocalTerm, StateVector, C64};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LightconeReport {
    pub depth: usize,
    pub target: BTreeSet<usize>,
    /// Gates reached walking backward from the target.
    pub lightcone_gates: BTreeSet<usize>,
    /// Target sites plus every site touched by a lightcone gate.
    pub lightcone_support: BTreeSet<usize>,
    /// Gates reached walking forward again from the lightcone's sites.
    pub effect_zone_gates: BTreeSet<usize>,
    /// Lightcone support plus every site touched by an effect-zone gate.
    pub shadow: BTreeSet<usize>,
}

impl LightconeReport {
    pub fn shadow_bound(&self) -> usize {
        1usize << (2 * self.depth + 1).min(63)
    }
}

fn check_target(l: &Layering, target: &[usize]) -> Result<BTreeSet<usize>> {
    let mut t = BTreeSet::new();
    for &s in target {
        if s >= l.num_sites {
            return Err(Error::SiteOutOfRange { site: s, len: l.num_sites });
        }
        t.insert(s);
    }
    Ok(t)
}

fn overlaps(support: &[usize], sites: &BTreeSet<usize>) -> bool {
    support.iter().any(|s| sites.contains(s))
}

/// Backward closure from the last layer to the first.
pub fn lightcone(l: &Layering, target: &[usize]) -> Result<LightconeReport> {
    let target = check_target(l, target)?;
    let mut sites = target.clone();
    let mut gates = BTreeSet::new();
    for layer in l.layers.iter().rev() {
        let hit: Vec<usize> = layer.iter().copied().filter(|&g| overlaps(&l.supports[g], &sites)).collect();
        for g in hit {
            gates.insert(g);
            sites.extend(l.supports[g].iter().copied());
        }
    }
    Ok(LightconeReport {
        depth: l.depth(),
        target,
        lightcone_gates: gates,
        lightcone_support: sites,
        effect_zone_gates: BTreeSet::new(),
        shadow: BTreeSet::new(),
    })
}

/// Lightcone plus its forward closure. The first effect-zone layer is
/// exactly the lightcone's first layer.
pub fn effect_zone_and_shadow(l: &Layering, target: &[usize]) -> Result<LightconeReport> {
    let mut report = lightcone(l, target)?;
    let mut sites = report.lightcone_support.clone();
    let mut zone = BTreeSet::new();
    for layer in &l.layers {
        let hit: Vec<usize> = layer.iter().copied().filter(|&g| overlaps(&l.supports[g], &sites)).collect();
        for g in hit {
            zone.insert(g);
            sites.extend(l.supports[g].iter().copied());
        }
    }
    report.effect_zone_gates = zone;
    report.shadow = sites;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LightconeRelation {
    /// `b` avoids the shadow of `a`.
    pub outside_shadow: bool,
    /// The lightcone gate sets of `a` and `b` do not intersect.
    pub gates_disjoint: bool,
    /// The operator supports themselves do not intersect.
    pub supports_disjoint: bool,
}

impl LightconeRelation {
    pub fn disjoint(&self) -> bool {
        self.gates_disjoint && self.supports_disjoint
    }
}

pub fn lightcone_relation(l: &Layering, a: &[usize], b: &[usize]) -> Result<LightconeRelation> {
    let ra = effect_zone_and_shadow(l, a)?;
    let rb = lightcone(l, b)?;
    Ok(LightconeRelation {
        outside_shadow: rb.target.is_disjoint(&ra.shadow),
        gates_disjoint: ra.lightcone_gates.is_disjoint(&rb.lightcone_gates),
        supports_disjoint: ra.target.is_disjoint(&rb.target),
    })
}

/// Whether the lightcones of operators on `a` and `b` are disjoint, checked
/// directly on the gate sets.
pub fn disjoint_lightcones(l: &Layering, a: &[usize], b: &[usize]) -> Result<bool> {
    Ok(lightcone_relation(l, a, b)?.disjoint())
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    /// `Tr(A ⊗ B ρ)`.
    pub lhs: f64,
    /// `Tr(A ρ) Tr(B ρ)`.
    pub rhs: f64,
    pub a: f64,
    pub b: f64,
    pub discrepancy: f64,
    pub lightcones_disjoint: bool,
    /// Set when the lightcones overlap, so the values are only diagnostic.
    pub diagnostic: bool,
}

/// Compares `Tr(A ⊗ B ρ)` with `Tr(Aρ)Tr(Bρ)` for `ρ = Tr_traced(c|0⟩⟨0|c†)`.
pub fn factorization_check(c: &Circuit, a: &LocalTerm, b: &LocalTerm, traced: &[usize]) -> Result<FactorizationReport> {
    c.shape.check_support(traced)?;
    c.shape.check_support(&a.support)?;
    c.shape.check_support(&b.support)?;
    for s in a.support.iter().chain(&b.support) {
        if traced.contains(s) {
            return Err(Error::InvalidParameter(format!("operator acts on traced site {s}")));
        }
    }
    if a.support.iter().any(|s| b.support.contains(s)) {
        return Err(Error::InvalidParameter("operators A and B overlap".into()));
    }
    let layering = layerize(c);
    let rel = lightcone_relation(&layering, &a.support, &b.support)?;
    let out = c.apply(&StateVector::zero(c.shape.clone()))?;
    // Only the sites of A and B matter once everything else is traced out.
    let kept: Vec<usize> = (0..c.num_sites()).filter(|s| a.support.contains(s) || b.support.contains(s)).collect();
    let others: Vec<usize> = (0..c.num_sites()).filter(|s| !kept.contains(s)).collect();
    let rho = out.reduced_density(&others)?;
    let relabel =
        |sup: &[usize]| -> Vec<usize> { sup.iter().map(|s| kept.iter().position(|k| k == s).expect("kept site")).collect() };
    let sa = relabel(&a.support);
    let sb = relabel(&b.support);
    let ea = rho.local_expectation(&sa, &a.matrix())?.re;
    let eb = rho.local_expectation(&sb, &b.matrix())?.re;
    let mut sab = sa.clone();
    sab.extend(&sb);
    let ab: DMatrix<C64> = a.matrix().kronecker(&b.matrix());
    let lhs = rho.local_expectation(&sab, &ab)?.re;
    let rhs = ea * eb;
    Ok(FactorizationReport {
        lhs,
        rhs,
        a: ea,
        b: eb,
        discrepancy: (lhs - rhs).abs(),
        lightcones_disjoint: rel.disjoint(),
        diagnostic: !rel.disjoint(),
    })
}
