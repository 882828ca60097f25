//! The observable inequalities, the depth-bound arithmetic and the low-depth
//! factorization check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::chain::{a_observable, b_observable, QutritChainHamiltonian};
use super::noisy::{good_indices, make_noisy_ground_state, sample_spec, NoisyState};
use crate::circuits::random::random_layered_circuit;
use crate::circuits::{effect_zone_and_shadow, factorization_check, layerize, lightcone_relation};
use crate::error::{Error, Result};
use crate::linalg::{LocalTerm, TermTag};

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub i: usize,
    pub j: usize,
    pub both_good: bool,
    /// `Tr(A_i ⊗ B_j σ)`.
    pub ab: f64,
    pub a: f64,
    pub b: f64,
    /// `4ε`.
    pub ab_bound: f64,
    /// `1/2 − 8ε`.
    pub single_bound: f64,
    /// `Tr(A_i ⊗ B_j ΨΨ†) = (i + j)/(2(n+1))` in 1-based indices. Both
    /// projectors keep `|2⟩`, so a snapshot with `t < i` contributes 1 and one
    /// with `i ≤ t < j` contributes ½.
    pub clean_ab: f64,
    /// All three inequalities as stated.
    pub ok: bool,
    /// The same with the pair bound raised to `4ε + clean_ab`.
    pub ok_corrected: bool,
}

/// Measures the three quantities for sites `i < j` (0-based). A pair that is
/// not good is still measured and flagged.
pub fn verify_lngs_inequalities(sigma: &NoisyState, i: usize, j: usize, eps: f64, good: &[usize]) -> Result<InequalityReport> {
    if i >= j {
        return Err(Error::InvalidParameter(format!("need i < j, got {i} and {j}")));
    }
    let a = sigma.local_expectation(&[i], &a_observable())?;
    let b = sigma.local_expectation(&[j], &b_observable())?;
    let ab = sigma.local_expectation(&[i, j], &a_observable().kronecker(&b_observable()))?;
    let ab_bound = 4.0 * eps;
    let single_bound = 0.5 - 8.0 * eps;
    let n = sigma.shape.len();
    let clean_ab = (i + j + 2) as f64 / (2 * (n + 1)) as f64;
    let singles = a >= single_bound - 1e-10 && b >= single_bound - 1e-10;
    Ok(InequalityReport {
        i,
        j,
        both_good: good.contains(&i) && good.contains(&j),
        ab,
        a,
        b,
        ab_bound,
        single_bound,
        clean_ab,
        ok: singles && ab <= ab_bound + 1e-10,
        ok_corrected: singles && ab <= ab_bound + clean_ab + 1e-10,
    })
}

/// Every good pair `i < j`.
pub fn check_good_pairs(sigma: &NoisyState, eps: f64, good: &[usize]) -> Result<Vec<InequalityReport>> {
    let mut out = Vec::new();
    for (x, &i) in good.iter().enumerate() {
        for &j in &good[x + 1..] {
            out.push(verify_lngs_inequalities(sigma, i, j, eps, good)?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloReport {
    pub n: usize,
    pub eps: f64,
    pub trials: usize,
    pub pairs_checked: usize,
    pub max_ab: f64,
    pub min_single: f64,
    pub min_good: usize,
    /// Pairs failing the inequalities as stated.
    pub failures: usize,
    /// Pairs failing with the corrected pair bound.
    pub corrected_failures: usize,
}

impl MonteCarloReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && 2 * self.min_good >= self.n
    }

    pub fn passed_corrected(&self) -> bool {
        self.corrected_failures == 0 && 2 * self.min_good >= self.n
    }
}

/// Per-trial tallies: pairs checked, max pair value, min single value, good
/// indices, stated failures, corrected failures.
type TrialTally = (usize, f64, f64, usize, usize, usize);

/// Samples `trials` noisy specs (trial `k` seeded by `seed + k`) and checks
/// every good pair of each.
pub fn monte_carlo(
    h: &QutritChainHamiltonian,
    eps: f64,
    trials: usize,
    components: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    let results: Vec<Result<TrialTally>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let spec = sample_spec(h.n, eps, components, &mut rng)?;
            let good = good_indices(&spec);
            let sigma = make_noisy_ground_state(h, &spec)?;
            let reports = check_good_pairs(&sigma, eps, &good)?;
            let max_ab = reports.iter().map(|r| r.ab).fold(f64::NEG_INFINITY, f64::max);
            let min_single = reports.iter().map(|r| r.a.min(r.b)).fold(f64::INFINITY, f64::min);
            let fails = reports.iter().filter(|r| !r.ok).count();
            let corrected = reports.iter().filter(|r| !r.ok_corrected).count();
            Ok((reports.len(), max_ab, min_single, good.len(), fails, corrected))
        })
        .collect();
    let mut rep = MonteCarloReport {
        n: h.n,
        eps,
        trials,
        pairs_checked: 0,
        max_ab: f64::NEG_INFINITY,
        min_single: f64::INFINITY,
        min_good: h.n,
        failures: 0,
        corrected_failures: 0,
    };
    for r in results {
        let (pairs, max_ab, min_single, good, fails, corrected) = r?;
        rep.corrected_failures += corrected;
        rep.pairs_checked += pairs;
        rep.max_ab = rep.max_ab.max(max_ab);
        rep.min_single = rep.min_single.min(min_single);
        rep.min_good = rep.min_good.min(good);
        rep.failures += fails;
    }
    Ok(rep)
}

/// `(1/2 − 8ε − δ)² − δ − 4ε`, with no range check.
pub fn contradiction_margin(eps: f64, delta: f64) -> f64 {
    (0.5 - 8.0 * eps - delta).powi(2) - delta - 4.0 * eps
}

/// `½ log₂(n/2)`.
pub fn depth_bound(n: usize) -> f64 {
    0.5 * (n as f64 / 2.0).log2()
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthCertificate {
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub bound: f64,
    pub margin: f64,
}

impl DepthCertificate {
    pub fn holds(&self) -> bool {
        self.margin > 0.0
    }
}

/// The depth bound and contradiction margin; rejects parameters outside
/// `0 ≤ ε < 1/48`, `0 ≤ δ < 1/8 − 6ε`.
pub fn depth_bound_certificate(n: usize, eps: f64, delta: f64) -> Result<DepthCertificate> {
    if !(0.0..1.0 / 48.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!("ε = {eps} outside 0 ≤ ε < 1/48")));
    }
    if !(delta >= 0.0 && delta < 0.125 - 6.0 * eps) {
        return Err(Error::InvalidParameter(format!("δ = {delta} outside 0 ≤ δ < 1/8 − 6ε = {}", 0.125 - 6.0 * eps)));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    Ok(DepthCertificate { n, eps, delta, bound: depth_bound(n), margin: contradiction_margin(eps, delta) })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdversaryReport {
    pub n: usize,
    pub depth: usize,
    pub depth_bound: f64,
    /// Whether `d < ½ log₂(n/2)`; below the bound the sampled states are the
    /// ones the argument rules out, above it the run is a diagnostic only.
    pub below_bound: bool,
    pub samples: usize,
    pub pairs_checked: usize,
    pub max_discrepancy: f64,
    pub max_shadow: usize,
    pub shadow_bound: usize,
    /// Pairs with `Tr(Aσ′), Tr(Bσ′) ≥ 0.45` but `Tr(A ⊗ Bσ′) < 0.2`.
    pub implied_violations: usize,
}

/// Prepares `samples` random depth-`d` qutrit states and measures the
/// factorization gap of `A_i ⊗ B_j` for every pair with `j` outside the
/// shadow of `i`.
pub fn low_depth_adversary<R: Rng + ?Sized>(n: usize, d: usize, samples: usize, rng: &mut R) -> Result<AdversaryReport> {
    let mut rep = AdversaryReport {
        n,
        depth: d,
        depth_bound: depth_bound(n),
        below_bound: (d as f64) < depth_bound(n),
        samples,
        pairs_checked: 0,
        max_discrepancy: 0.0,
        max_shadow: 0,
        shadow_bound: 1usize << (2 * d + 1).min(63),
        implied_violations: 0,
    };
    for _ in 0..samples {
        let c = random_layered_circuit(n, 3, d, rng)?;
        let layering = layerize(&c);
        for i in 0..n {
            rep.max_shadow = rep.max_shadow.max(effect_zone_and_shadow(&layering, &[i])?.shadow.len());
            for j in (i + 1)..n {
                let rel = lightcone_relation(&layering, &[i], &[j])?;
                if !rel.outside_shadow {
                    continue;
                }
                let a = LocalTerm::new(vec![i], a_observable(), TermTag::Other);
                let b = LocalTerm::new(vec![j], b_observable(), TermTag::Other);
                let f = factorization_check(&c, &a, &b, &[])?;
                rep.pairs_checked += 1;
                rep.max_discrepancy = rep.max_discrepancy.max(f.discrepancy);
                if f.a >= 0.45 && f.b >= 0.45 && f.lhs < 0.2 {
                    rep.implied_violations += 1;
                }
            }
        }
    }
    Ok(rep)
}
