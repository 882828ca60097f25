//! Noisy ground states: convex mixtures of states corrupted on few sites.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::Exp1;

use super::chain::QutritChainHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{DensityOperator, Ensemble, KrausChannel, RegisterShape};

#[derive(Clone, Debug)]
pub struct NoiseComponent {
    pub p: f64,
    pub sites: Vec<usize>,
    pub channel: KrausChannel,
}

#[derive(Clone, Debug)]
pub struct NoisyGroundStateSpec {
    pub n: usize,
    pub eps: f64,
    pub components: Vec<NoiseComponent>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorruptionKind {
    MaximallyMixed,
    RandomUnitary,
    Dephase,
}

impl CorruptionKind {
    pub const MENU: [CorruptionKind; 3] =
        [CorruptionKind::MaximallyMixed, CorruptionKind::RandomUnitary, CorruptionKind::Dephase];

    pub fn channel<R: Rng + ?Sized>(self, sites: Vec<usize>, rng: &mut R) -> KrausChannel {
        let dims = vec![3; sites.len()];
        match self {
            CorruptionKind::MaximallyMixed => KrausChannel::maximally_mixed(sites, dims),
            CorruptionKind::RandomUnitary => KrausChannel::random_unitary(sites, dims, rng),
            CorruptionKind::Dephase => KrausChannel::dephase(sites, dims),
        }
    }
}

/// `⌊εn⌋`, with a little slack so that e.g. `ε = 1/8, n = 8` gives 1.
pub fn max_corrupted(n: usize, eps: f64) -> usize {
    (eps * n as f64 + 1e-9).floor() as usize
}

impl NoisyGroundStateSpec {
    pub fn new(n: usize, eps: f64, components: Vec<NoiseComponent>) -> Result<Self> {
        let s = Self { n, eps, components };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidParameter(format!("ε = {} must lie in [0, 1)", self.eps)));
        }
        let total: f64 = self.components.iter().map(|c| c.p).sum();
        if (total - 1.0).abs() > 1e-12 || self.components.iter().any(|c| c.p < 0.0) {
            return Err(Error::InvalidParameter(format!("component weights sum to {total}")));
        }
        let cap = max_corrupted(self.n, self.eps);
        for c in &self.components {
            if c.sites.len() > cap {
                return Err(Error::InvalidParameter(format!(
                    "component corrupts {} sites, more than ⌊εn⌋ = {cap}",
                    c.sites.len()
                )));
            }
            if c.sites.iter().any(|&s| s >= self.n) {
                return Err(Error::SiteOutOfRange { site: *c.sites.iter().max().unwrap_or(&0), len: self.n });
            }
            if c.channel.support.iter().any(|s| !c.sites.contains(s)) {
                return Err(Error::InvalidParameter("channel acts outside its corrupted set".into()));
            }
        }
        Ok(())
    }

    /// Total weight `Σ_{ℓ: i ∈ S_ℓ} p_ℓ` of components touching site `i`.
    pub fn site_weight(&self, i: usize) -> f64 {
        self.components.iter().filter(|c| c.sites.contains(&i)).map(|c| c.p).sum()
    }
}

/// Uniform Dirichlet weights from normalized exponential draws.
pub fn dirichlet_uniform<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..count).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|x| x / total).collect()
}

/// `components` draws of a uniformly random `⌊εn⌋`-subset, a corruption from
/// the menu and a Dirichlet weight.
pub fn sample_spec<R: Rng + ?Sized>(n: usize, eps: f64, components: usize, rng: &mut R) -> Result<NoisyGroundStateSpec> {
    if components == 0 {
        return Err(Error::InvalidParameter("a noisy spec needs at least one component".into()));
    }
    let size = max_corrupted(n, eps).min(n);
    let weights = dirichlet_uniform(components, rng);
    let mut out = Vec::with_capacity(components);
    for p in weights {
        let mut sites = sample(rng, n, size).into_vec();
        sites.sort_unstable();
        let kind = CorruptionKind::MENU[rng.random_range(0..CorruptionKind::MENU.len())];
        let channel = kind.channel(sites.clone(), rng);
        out.push(NoiseComponent { p, sites, channel });
    }
    // Renormalize away rounding so the weights sum to one within 1e-12.
    let total: f64 = out.iter().map(|c| c.p).sum();
    for c in &mut out {
        c.p /= total;
    }
    NoisyGroundStateSpec::new(n, eps, out)
}

/// Independent noise: each site is hit by `noise` with probability `eps`,
/// keeping only patterns of at most `⌊2εn⌋` sites. The result is a
/// `2ε`-noisy spec.
pub fn physical_noise_spec(n: usize, eps: f64, noise: impl Fn(Vec<usize>) -> KrausChannel) -> Result<NoisyGroundStateSpec> {
    let cap = max_corrupted(n, 2.0 * eps);
    let mut comps = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let k = mask.count_ones() as usize;
        if k > cap {
            continue;
        }
        let sites: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let p = eps.powi(k as i32) * (1.0 - eps).powi((n - k) as i32);
        if p == 0.0 {
            continue;
        }
        comps.push(NoiseComponent { p, channel: noise(sites.clone()), sites });
    }
    let total: f64 = comps.iter().map(|c| c.p).sum();
    for c in &mut comps {
        c.p /= total;
    }
    NoisyGroundStateSpec::new(n, 2.0 * eps, comps)
}

/// A product of single-site copies of `kraus` on each of `sites`.
pub fn tensor_power_channel(sites: Vec<usize>, single: &KrausChannel) -> Result<KrausChannel> {
    let mut kraus = vec![nalgebra::DMatrix::identity(1, 1)];
    for _ in &sites {
        let mut next = Vec::new();
        for k in &kraus {
            for s in &single.kraus {
                next.push(k.kronecker(s));
            }
        }
        kraus = next;
    }
    let dims = vec![single.dims.iter().product(); sites.len()];
    KrausChannel::new(sites, dims, kraus, single.label.clone())
}

/// `Σ_ℓ p_ℓ (N_ℓ ⊗ id)(ΨΨ†)`, kept as one weighted ensemble per component.
#[derive(Clone, Debug)]
pub struct NoisyState {
    pub shape: RegisterShape,
    pub components: Vec<(f64, Ensemble)>,
}

impl NoisyState {
    pub fn trace(&self) -> f64 {
        self.components.iter().map(|(p, e)| p * e.trace()).sum()
    }

    pub fn local_expectation(&self, support: &[usize], m: &nalgebra::DMatrix<crate::linalg::C64>) -> Result<f64> {
        let mut acc = 0.0;
        for (p, e) in &self.components {
            acc += p * e.local_expectation(support, m)?.re;
        }
        Ok(acc)
    }

    pub fn reduced_density(&self, traced: &[usize]) -> Result<DensityOperator> {
        let mut acc: Option<DensityOperator> = None;
        for (p, e) in &self.components {
            let mut r = e.reduced_density(traced)?;
            r.matrix *= crate::linalg::C64::new(*p, 0.0);
            acc = Some(match acc {
                None => r,
                Some(mut a) => {
                    a.matrix += r.matrix;
                    a
                }
            });
        }
        acc.ok_or_else(|| Error::InvalidParameter("empty noisy state".into()))
    }

    pub fn to_density(&self, cap: usize) -> Result<DensityOperator> {
        let dim = self.shape.total_dim();
        if dim > cap {
            return Err(Error::DimensionTooLarge { dim, cap });
        }
        self.reduced_density(&[])
    }
}

pub fn make_noisy_ground_state(h: &QutritChainHamiltonian, spec: &NoisyGroundStateSpec) -> Result<NoisyState> {
    if spec.n != h.n {
        return Err(Error::ShapeMismatch(format!("spec for n = {} on a chain of {}", spec.n, h.n)));
    }
    spec.validate()?;
    let psi = h.history_state()?;
    let pure = Ensemble::pure(&psi);
    let mut components = Vec::with_capacity(spec.components.len());
    for c in &spec.components {
        components.push((c.p, c.channel.apply_ensemble(&pure)?));
    }
    Ok(NoisyState { shape: psi.shape.clone(), components })
}

/// Sites whose corruption weight is at most `2ε`.
pub fn good_indices(spec: &NoisyGroundStateSpec) -> Vec<usize> {
    (0..spec.n).filter(|&i| spec.site_weight(i) <= 2.0 * spec.eps + 1e-12).collect()
}
