//! The wait-extended clock code built around an inner CSS encoder.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use super::code::CssCode;
use crate::circuits::{Circuit, Gate};
use crate::clock::{build_fk_hamiltonian, ClockHamiltonian, ClockLayout, ClockedMixture, ClockedState, FkOptions, HistoryState};
use crate::error::{Error, Result};
use crate::linalg::{
    ops, trace_distance, DensityOperator, Ensemble, HermitianTermSum, KrausChannel, RegisterShape, StateVector, C64,
};

/// Slack used when comparing the waiting fraction with its threshold.
const FRACTION_SLACK: f64 = 1e-12;

/// `V` followed by `K` labeled identity gates on site 0, with `K` the smallest
/// positive integer such that `K/(T_V+K) ≥ 1 − δ²/4`.
pub fn build_wait_circuit(v: &Circuit, delta: f64) -> Result<(Circuit, usize)> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("δ must be positive, got {delta}")));
    }
    let t_v = v.len();
    let k = wait_length(t_v, delta);
    let mut c = v.clone();
    let d0 = v.shape.dim(0);
    for _ in 0..k {
        c.push(Gate::identity(0, d0))?;
    }
    Ok((c, k))
}

fn waiting_ok(k: usize, t_v: usize, target: f64) -> bool {
    k as f64 / (t_v + k) as f64 >= target - FRACTION_SLACK
}

fn wait_length(t_v: usize, delta: f64) -> usize {
    let target = 1.0 - delta * delta / 4.0;
    if target <= 0.0 {
        return 1;
    }
    let mut k = ((target * t_v as f64 / (1.0 - target)) - 1e-9).ceil().max(1.0) as usize;
    while k > 1 && waiting_ok(k - 1, t_v, target) {
        k -= 1;
    }
    while !waiting_ok(k, t_v, target) {
        k += 1;
    }
    k
}

/// Smallest `r` with `n^r ≥ T_C`.
pub fn choose_r(t_c: usize, n: usize) -> Result<usize> {
    if t_c < 2 || n < 2 {
        return Err(Error::InvalidParameter(format!("choose_r needs T_C, n ≥ 2 (got {t_c}, {n})")));
    }
    let mut r = 1;
    let mut p = n;
    while p < t_c {
        p = p.saturating_mul(n);
        r += 1;
    }
    Ok(r)
}

/// `log(1 + 4/δ²)/log n + 2`, the closed form the constructive `r` is
/// compared against.
pub fn r_closed_form(delta: f64, n: usize) -> f64 {
    (1.0 + 4.0 / (delta * delta)).ln() / (n as f64).ln() + 2.0
}

#[derive(Clone, Debug, Serialize)]
pub struct QlwcParameters {
    pub q: usize,
    pub delta: f64,
    /// `3 + 2r`.
    pub w: usize,
    /// Largest support among the generated terms.
    pub measured_locality: usize,
    /// Clock qubits plus code qubits.
    pub m: usize,
    pub m_bound: usize,
    pub d: usize,
    pub r: usize,
    pub r_closed: f64,
    pub k_wait: usize,
    pub t_v: usize,
    pub t_c: usize,
    pub n: usize,
    pub k: usize,
    pub clock_base: usize,
    pub clock_sites: usize,
    pub waiting_fraction: f64,
    /// `(K+1)/(T_C+1)`, the history-state weight on fully encoded snapshots.
    pub waiting_mass: f64,
}

impl QlwcParameters {
    /// `w = 3+2r`, the measured locality stays within `w`, the waiting
    /// inequality, and `m ≤ (r+1)n`.
    pub fn identities_hold(&self) -> bool {
        let target = 1.0 - self.delta * self.delta / 4.0;
        self.w == 3 + 2 * self.r
            && self.measured_locality <= self.w
            && waiting_ok(self.k_wait, self.t_v, target)
            && self.m <= self.m_bound
    }
}

#[derive(Clone, Debug)]
pub struct QlwcCode {
    pub inner: CssCode,
    pub params: QlwcParameters,
    /// `H_in + H_prop + H_stab` on an `r`-dimensional clock.
    pub hamiltonian: ClockHamiltonian,
    pub wait_circuit: Circuit,
}

pub fn build_qlwc(inner: CssCode, delta: f64) -> Result<QlwcCode> {
    let (wait, k_wait) = build_wait_circuit(&inner.encoder, delta)?;
    let t_v = inner.encoder_len();
    let t_c = wait.len();
    let r = choose_r(t_c, inner.n)?;
    let hamiltonian = build_fk_hamiltonian(&wait, &FkOptions::without_out(r))?;
    let layout = hamiltonian.layout.clone();
    let params = QlwcParameters {
        q: inner.q,
        delta,
        w: 3 + 2 * r,
        measured_locality: hamiltonian.max_locality(),
        m: layout.num_sites() + inner.n,
        m_bound: (r + 1) * inner.n,
        d: inner.d,
        r,
        r_closed: r_closed_form(delta, inner.n),
        k_wait,
        t_v,
        t_c,
        n: inner.n,
        k: inner.k,
        clock_base: layout.base,
        clock_sites: layout.num_sites(),
        waiting_fraction: k_wait as f64 / t_c as f64,
        waiting_mass: (k_wait + 1) as f64 / (t_c + 1) as f64,
    };
    Ok(QlwcCode { inner, params, hamiltonian, wait_circuit: wait })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Clock,
    State,
}

/// A channel on clock and code qubits of a [`QlwcCode`].
#[derive(Clone, Debug)]
pub struct ErrorChannel {
    /// Support numbered over the clock register followed by the code register.
    pub channel: KrausChannel,
    pub clock_support: Vec<usize>,
    pub state_support: Vec<usize>,
}

impl ErrorChannel {
    pub fn new(code: &QlwcCode, sites: &[(Region, usize)], kraus: Vec<DMatrix<C64>>, label: &str) -> Result<Self> {
        let nt = code.params.clock_sites;
        let mut clock_support = Vec::new();
        let mut state_support = Vec::new();
        let mut support = Vec::new();
        for &(region, s) in sites {
            match region {
                Region::Clock if s < nt => {
                    clock_support.push(s);
                    support.push(s);
                }
                Region::State if s < code.params.n => {
                    state_support.push(s);
                    support.push(nt + s);
                }
                _ => return Err(Error::InvalidParameter(format!("{region:?} site {s} is out of range"))),
            }
        }
        let channel = KrausChannel::new(support.clone(), vec![2; support.len()], kraus, label)?;
        Ok(Self { channel, clock_support, state_support })
    }

    pub fn identity(code: &QlwcCode) -> Self {
        let nt = code.params.clock_sites;
        Self { channel: KrausChannel::identity(vec![nt], vec![2]), clock_support: Vec::new(), state_support: Vec::new() }
    }

    pub fn erasure(code: &QlwcCode, sites: &[(Region, usize)]) -> Result<Self> {
        let mm = KrausChannel::maximally_mixed(vec![0; sites.len()], vec![2; sites.len()]);
        Self::new(code, sites, mm.kraus, "erase")
    }

    pub fn dephasing(code: &QlwcCode, sites: &[(Region, usize)]) -> Result<Self> {
        let dp = KrausChannel::dephase(vec![0; sites.len()], vec![2; sites.len()]);
        Self::new(code, sites, dp.kraus, "dephase")
    }

    /// Random single-qubit channel of Kraus rank 1 to 4.
    pub fn random_single<R: Rng + ?Sized>(code: &QlwcCode, site: (Region, usize), rng: &mut R) -> Result<Self> {
        let rank = rng.random_range(1..=4);
        let ch = KrausChannel::random(vec![0], vec![2], rank, rng);
        Self::new(code, &[site], ch.kraus, &ch.label)
    }

    /// Parses `kind:region:i,j,…` with kind `erase`, `dephase` or `random`,
    /// region `state` or `clock`; `identity` stands alone.
    pub fn parse<R: Rng + ?Sized>(code: &QlwcCode, spec: &str, rng: &mut R) -> Result<Self> {
        if spec == "identity" || spec == "none" {
            return Ok(Self::identity(code));
        }
        let parts: Vec<&str> = spec.split(':').collect();
        let [kind, region, sites] = parts[..] else {
            return Err(Error::Parse(format!("error spec {spec:?} is not kind:region:sites")));
        };
        let region = match region {
            "state" => Region::State,
            "clock" => Region::Clock,
            _ => return Err(Error::Parse(format!("unknown region {region:?}"))),
        };
        let sites: Vec<(Region, usize)> = sites
            .split(',')
            .map(|s| s.trim().parse::<usize>().map(|i| (region, i)).map_err(|e| Error::Parse(format!("site {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        match kind {
            "erase" => Self::erasure(code, &sites),
            "dephase" => Self::dephasing(code, &sites),
            "random" if sites.len() == 1 => Self::random_single(code, sites[0], rng),
            "random" => Err(Error::Parse("random channels act on one site".into())),
            _ => Err(Error::Parse(format!("unknown error kind {kind:?}"))),
        }
    }

    /// Every touched qubit counts against the budget, clock or code.
    pub fn weight(&self) -> usize {
        self.clock_support.len() + self.state_support.len()
    }
}

/// Outcome of one encode, corrupt, decode round.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryReport {
    pub label: String,
    pub clock_support: Vec<usize>,
    pub state_support: Vec<usize>,
    pub distance: f64,
    pub delta: f64,
    pub ok: bool,
}

/// Decomposition of the error-free decoded state as
/// `(1−δ′)φφ† + δ′ρ_junk`.
#[derive(Clone, Debug, Serialize)]
pub struct JunkReport {
    pub delta_prime: f64,
    pub bound: f64,
    /// Snapshot times that do not decode to the message.
    pub bad_times: Vec<usize>,
    /// Smallest eigenvalue of `ρ_junk`; nonnegative for a valid decomposition.
    pub junk_min_eigenvalue: f64,
    pub waiting_mass: f64,
}

impl QlwcCode {
    pub fn layout(&self) -> &ClockLayout {
        &self.hamiltonian.layout
    }

    /// The code Hamiltonian padded with `refs` untouched reference qubits.
    pub fn hamiltonian_with_reference(&self, refs: usize) -> HermitianTermSum {
        let mut h = self.hamiltonian.terms.clone();
        h.shape = h.shape.concat(&RegisterShape::qubits(refs));
        h
    }

    fn reference_count(&self, message: &StateVector) -> Result<usize> {
        let k = self.inner.k;
        if message.shape.len() < k || message.shape.dims().iter().any(|&d| d != 2) {
            return Err(Error::ShapeMismatch(format!("message must be {k} qubits plus optional reference qubits")));
        }
        Ok(message.shape.len() - k)
    }

    fn extended_circuit(&self, refs: usize) -> Result<Circuit> {
        Circuit::with_gates(RegisterShape::qubits(self.inner.n + refs), self.inner.k, self.wait_circuit.gates.clone())
    }

    /// `message ⊗ |0^{n−k}⟩` with the reference qubits moved after the code.
    fn input(&self, message: &StateVector, refs: usize) -> DVector<C64> {
        let anc = self.inner.n - self.inner.k;
        let mut v = DVector::zeros(1 << (self.inner.n + refs));
        for (i, &a) in message.amplitudes.iter().enumerate() {
            let msg = i >> refs;
            let r = i & ((1 << refs) - 1);
            v[(msg << (anc + refs)) | r] = a;
        }
        v
    }

    /// The history state of the wait circuit on `message ⊗ |0^{n−k}⟩`, with any
    /// reference qubits carried along untouched.
    pub fn encode(&self, message: &StateVector) -> Result<HistoryState> {
        let refs = self.reference_count(message)?;
        let circuit = self.extended_circuit(refs)?;
        let input = StateVector::new(circuit.shape.clone(), self.input(message, refs))?;
        let snapshots = circuit.snapshots(&input)?;
        Ok(HistoryState { circuit, witness: message.clone(), layout: self.layout().clone(), snapshots })
    }

    pub fn encode_clocked(&self, message: &StateVector) -> Result<ClockedMixture> {
        Ok(ClockedMixture::pure(self.encode(message)?.to_clocked()))
    }

    pub fn apply_error(&self, sigma: &ClockedMixture, e: &ErrorChannel) -> Result<ClockedMixture> {
        let budget = self.inner.correctable();
        if e.weight() > budget {
            return Err(Error::ErrorBudget { support: e.weight(), budget });
        }
        sigma.apply_channel(&e.channel)
    }

    /// Syndrome correction, `V†`, then the trace over code ancillas, on each
    /// member of a code ⊗ reference ensemble.
    fn decode_ensemble(&self, e: &Ensemble) -> Result<DensityOperator> {
        let corrected = self.inner.correct(e, 0)?;
        let idx: Vec<(ops::LocalIndexer, DMatrix<C64>)> = self
            .inner
            .encoder
            .inverse()
            .gates
            .iter()
            .map(|g| Ok((ops::LocalIndexer::new(&e.shape, &g.support)?, g.unitary.clone())))
            .collect::<Result<_>>()?;
        let members = corrected
            .members
            .into_iter()
            .map(|mut v| {
                for (ix, u) in &idx {
                    v = ops::apply_with_indexer(ix, u, &v);
                }
                v
            })
            .collect();
        let anc: Vec<usize> = (self.inner.k..self.inner.n).collect();
        Ensemble { shape: e.shape.clone(), members }.reduced_density(&anc)
    }

    /// `Tr_anc(V† R(Tr_time σ) V)` with `R` the inner code's syndrome
    /// correction.
    pub fn decode(&self, sigma: &ClockedMixture) -> Result<DensityOperator> {
        let e = sigma.time_traced_ensemble()?;
        if e.shape.len() < self.inner.n {
            return Err(Error::ShapeMismatch("state register is smaller than the code".into()));
        }
        self.decode_ensemble(&e)
    }

    pub fn recovery_trial(&self, message: &StateVector, e: &ErrorChannel) -> Result<RecoveryReport> {
        let enc = self.encode_clocked(message)?;
        let noisy = self.apply_error(&enc, e)?;
        let out = self.decode(&noisy)?;
        let distance = trace_distance(&out, &message.to_density())?;
        let delta = self.params.delta;
        Ok(RecoveryReport {
            label: e.channel.label.clone(),
            clock_support: e.clock_support.clone(),
            state_support: e.state_support.clone(),
            distance,
            delta,
            ok: distance <= delta + 1e-9,
        })
    }

    /// Decodes each snapshot separately; snapshots whose decoded state is not
    /// the message form the junk part.
    pub fn junk_weight(&self, message: &StateVector) -> Result<JunkReport> {
        let psi = self.encode(message)?;
        let total = psi.snapshots.len() as f64;
        let mut bad = Vec::new();
        let dim = message.dim();
        let mut junk = DMatrix::<C64>::zeros(dim, dim);
        for (t, s) in psi.snapshots.iter().enumerate() {
            let rho = self.decode_ensemble(&Ensemble::pure(s))?;
            if rho.fidelity_with_pure(message) < 1.0 - 1e-9 {
                bad.push(t);
                junk += &rho.matrix / C64::new(total, 0.0);
            }
        }
        let delta_prime = bad.len() as f64 / total;
        let junk_min_eigenvalue = if bad.is_empty() {
            0.0
        } else {
            let rho = DensityOperator { shape: message.shape.clone(), matrix: junk / C64::new(delta_prime, 0.0) };
            rho.min_eigenvalue()
        };
        let d = self.params.delta;
        Ok(JunkReport {
            delta_prime,
            bound: d * d / 4.0,
            bad_times: bad,
            junk_min_eigenvalue,
            waiting_mass: self.params.waiting_mass,
        })
    }

    /// Legal-subspace energy of `Enc(message)`.
    pub fn encoded_energy(&self, message: &StateVector) -> Result<f64> {
        let refs = self.reference_count(message)?;
        let clocked: ClockedState = self.encode(message)?.to_clocked();
        clocked.expectation(&self.hamiltonian_with_reference(refs))
    }
}
