//! The `clockforge` command line.
//!
//! Exit codes: 0 when every gating check passes, 1 when a bound is violated,
//! 2 for usage, parse and parameter errors.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::circuits::{effect_zone_and_shadow, factorization_check, layerize, lightcone_relation, parse_circuit, Circuit};
use crate::clock::{build_fk_hamiltonian, history_state, verify_traceorder, FkOptions};
use crate::error::{Error, Result};
use crate::linalg::{
    eigensolve_hermitian, random::haar_unitary, EigenConfig, KrausChannel, LocalTerm, StateVector, TermTag, C64,
};
use crate::lngs::{
    build_lngs_hamiltonian, check_good_pairs, depth_bound_certificate, good_indices, make_noisy_ground_state, monte_carlo,
    single_site_formula, NoiseComponent, NoisyGroundStateSpec,
};
use crate::qlwc::{build_qlwc, CssCode, ErrorChannel, QlwcCode, RecoveryReport, Region};
use crate::report::RunReport;
use crate::tolerances::{EIGEN_RESIDUAL, EQ_TOL};

#[derive(Debug, Parser)]
#[command(name = "clockforge", version, about = "Clock Hamiltonians, history states and low-weight check codes")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for equality checks.
    #[arg(long, global = true, default_value_t = EQ_TOL)]
    pub tol: f64,
    /// Largest dimension materialized densely.
    #[arg(long, global = true, env = "CLOCKFORGE_DENSE_CAP")]
    pub dense_cap: Option<usize>,
    /// Worker threads for Monte Carlo loops.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Also write the checks as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a clock Hamiltonian from a circuit file and dump its terms.
    Build(BuildArgs),
    /// Check the qutrit chain and its noisy ground-state inequalities.
    Lngs(LngsArgs),
    /// Encode, corrupt and decode with the clock code.
    Qlwc(QlwcArgs),
    /// Lightcone, effect zone and shadow of sites after a circuit.
    Lightcone(LightconeArgs),
    /// Lowest eigenvalues of a clock Hamiltonian.
    Spectrum(SpectrumArgs),
    /// Compare the two orders of tracing out time and state sites.
    Traceorder(TraceorderArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub clock_dim: usize,
    /// Leave out the output check.
    #[arg(long)]
    pub no_out: bool,
    /// Hamiltonian dump destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    /// The pair bound `Tr(A⊗Bσ) ≤ 4ε` as stated.
    Stated,
    /// The pair bound raised by the exact ground-state value.
    Corrected,
}

#[derive(Debug, Args)]
pub struct LngsArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    /// Random noisy specs to sample.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Mixture components per sampled spec.
    #[arg(long, default_value_t = 3)]
    pub components: usize,
    /// Which pair bound decides the exit code.
    #[arg(long, value_enum, default_value_t = BoundKind::Stated)]
    pub bound: BoundKind,
}

#[derive(Debug, Args)]
pub struct QlwcArgs {
    #[arg(long, default_value = "steane7")]
    pub inner: String,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Error channel `kind:region:sites`, e.g. `erase:state:3`; repeatable.
    /// Without it every single-qubit erasure and `--draws` random channels run.
    #[arg(long)]
    pub error: Vec<String>,
    /// `0`, `1`, `plus` or `bell`; all of `0`, `plus`, `bell` when absent.
    #[arg(long)]
    pub message: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
}

#[derive(Debug, Args)]
pub struct LightconeArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub target: Vec<usize>,
    /// A second operator support; enables the factorization check.
    #[arg(long, value_delimiter = ',')]
    pub other: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub clock_dim: usize,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    #[arg(long)]
    pub no_out: bool,
}

#[derive(Debug, Args)]
pub struct TraceorderArgs {
    #[arg(long)]
    pub circuit: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub traced: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub clock_dim: usize,
    /// Computational basis index of the witness.
    #[arg(long, default_value_t = 0)]
    pub witness: usize,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, echo) {
        Ok(report) => {
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: {e}");
                return 2;
            }
            for c in report.failures() {
                eprintln!("check failed: {} = {:.6e} (bound {:.6e})", c.name, c.value, c.bound);
            }
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence(_) => 1,
        _ => 2,
    }
}

fn emit(cli: &Cli, report: &RunReport) -> Result<()> {
    let text = report.to_json()?;
    match &cli.report {
        Some(p) => std::fs::write(p, text + "\n")?,
        // Without --out the Hamiltonian dump already owns stdout.
        None if matches!(&cli.command, Command::Build(b) if b.out.is_none()) => {}
        None => print_stdout(&text)?,
    }
    if let Some(p) = &cli.csv {
        report.write_csv(p)?;
    }
    Ok(())
}

/// A closed pipe on stdout is not an error worth reporting.
fn print_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn eigen_config(cli: &Cli) -> EigenConfig {
    let mut cfg = EigenConfig { seed: cli.seed, ..EigenConfig::default() };
    if let Some(cap) = cli.dense_cap {
        cfg.dense_cap = cap;
    }
    cfg
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path)?;
    parse_circuit(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn execute(cli: &Cli, echo: Vec<String>) -> Result<RunReport> {
    if let Some(j) = cli.jobs {
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let start = Instant::now();
    let mut report = RunReport::new(echo, cli.seed, cli.tol);
    match &cli.command {
        Command::Build(a) => cmd_build(cli, a, &mut report)?,
        Command::Lngs(a) => cmd_lngs(cli, a, &mut report)?,
        Command::Qlwc(a) => cmd_qlwc(cli, a, &mut report)?,
        Command::Lightcone(a) => cmd_lightcone(cli, a, &mut report)?,
        Command::Spectrum(a) => cmd_spectrum(cli, a, &mut report)?,
        Command::Traceorder(a) => cmd_traceorder(cli, a, &mut report)?,
    }
    report.wall_time_s = start.elapsed().as_secs_f64();
    Ok(report)
}

fn fk_options(clock_dim: usize, no_out: bool) -> FkOptions {
    FkOptions { include_out: !no_out, clock_dimension: clock_dim, ..FkOptions::default() }
}

pub fn cmd_build(_cli: &Cli, a: &BuildArgs, report: &mut RunReport) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let h = build_fk_hamiltonian(&c, &fk_options(a.clock_dim, a.no_out))?;
    let audit = json!({
        "max_locality": h.max_locality(),
        "locality_bound": h.locality_bound(),
        "terms": h.terms.len(),
        "counts": h.terms.count_by_tag(),
        "wide_gates": h.has_wide_gates,
    });
    let dump = json!({
        "dims": h.terms.shape.dims(),
        "clock_sites": h.clock_sites(),
        "clock_dim": h.layout.k,
        "clock_base": h.layout.base,
        "t_max": h.layout.t_max,
        "audit": audit,
        "terms": h.terms.to_json(),
    });
    let text = serde_json::to_string_pretty(&dump)?;
    match &a.out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => print_stdout(&text)?,
    }
    report.at_most("max_locality", h.max_locality() as f64, h.locality_bound() as f64);
    report.details = audit;
    Ok(())
}

pub fn cmd_lngs(cli: &Cli, a: &LngsArgs, report: &mut RunReport) -> Result<()> {
    // Range checks come from the depth theorem: 0 ≤ ε < 1/48, 0 ≤ δ < 1/8 − 6ε.
    let cert = depth_bound_certificate(a.n, a.eps, a.delta).map_err(|e| match e {
        Error::InvalidParameter(m) => Error::InvalidParameter(format!("{m} (required by the depth lower bound)")),
        other => other,
    })?;
    let n = a.n;
    let cfg = eigen_config(cli);
    let h = build_lngs_hamiltonian(n)?;
    report.at_most("max_window", h.max_window() as f64, 3.0);
    report.equal("line_local", f64::from(u8::from(h.is_line_local())), 1.0);
    let psi = h.history_state()?;
    let dim = h.terms.dim();
    if dim <= cfg.dense_cap {
        let spec = eigensolve_hermitian(&h.terms, 2, &cfg)?;
        let overlap = spec.vectors[0].dotc(&psi.amplitudes).norm_sqr();
        report.at_most("ground_energy", spec.values[0].abs(), cli.tol);
        report.equal("ground_degeneracy", spec.ground_degeneracy(cfg.gap_tol) as f64, 1.0);
        report.at_least("history_overlap", overlap, 1.0 - 1e-9);
    } else {
        report.note(format!("ground-state checks skipped: dimension {dim} exceeds the dense cap {}", cfg.dense_cap));
    }
    let exact = NoisyGroundStateSpec::new(
        n,
        a.eps,
        vec![NoiseComponent { p: 1.0, sites: Vec::new(), channel: KrausChannel::identity(Vec::new(), Vec::new()) }],
    )?;
    let sigma = make_noisy_ground_state(&h, &exact)?;
    let mut worst_single = 0.0f64;
    for i in 0..n {
        let v = sigma.local_expectation(&[i], &crate::lngs::a_observable())?;
        worst_single = worst_single.max((v - single_site_formula(n, i + 1)).abs());
    }
    report.at_most("single_site_formula_error", worst_single, 1e-12);
    let pairs = check_good_pairs(&sigma, a.eps, &good_indices(&exact))?;
    let max_ab = pairs.iter().map(|r| r.ab).fold(0.0, f64::max);
    let max_excess = pairs.iter().map(|r| r.ab - r.clean_ab).fold(f64::NEG_INFINITY, f64::max);
    let min_single = pairs.iter().map(|r| r.a.min(r.b)).fold(f64::INFINITY, f64::min);
    let stated = a.bound == BoundKind::Stated;
    report.gated(stated).at_most("exact_ab_stated", max_ab, 4.0 * a.eps + 1e-12);
    report.gated(!stated).at_most("exact_ab_excess", max_excess, 4.0 * a.eps + 1e-12);
    report.at_least("exact_single_min", min_single, 0.5 - 8.0 * a.eps);
    let mut mc = serde_json::Value::Null;
    if a.trials > 0 {
        let rep = monte_carlo(&h, a.eps, a.trials, a.components, cli.seed)?;
        report.gated(stated).equal("mc_failures_stated", rep.failures as f64, 0.0);
        report.gated(!stated).equal("mc_failures_corrected", rep.corrected_failures as f64, 0.0);
        report.at_least("mc_min_good", rep.min_good as f64, (n as f64 / 2.0).ceil());
        mc = serde_json::to_value(&rep)?;
    }
    report.at_least("certificate_margin", cert.margin, f64::MIN_POSITIVE);
    if stated {
        report.note(
            "pair checks use the stated bound 4ε; pass --bound corrected to gate on the excess over the exact ground-state value",
        );
    }
    report.details = json!({
        "n": n,
        "eps": a.eps,
        "delta": a.delta,
        "dimension": dim,
        "depth_bound": cert.bound,
        "margin": cert.margin,
        "pairs": pairs,
        "monte_carlo": mc,
    });
    Ok(())
}

fn parse_message(s: &str) -> Result<StateVector> {
    let q1 = crate::linalg::RegisterShape::qubits(1);
    match s {
        "0" => Ok(StateVector::basis(q1, 0)),
        "1" => Ok(StateVector::basis(q1, 1)),
        "plus" | "+" => Ok(StateVector::plus()),
        "bell" => Ok(StateVector::bell()),
        _ => Err(Error::Parse(format!("unknown message {s:?}; expected 0, 1, plus or bell"))),
    }
}

/// Every single-qubit erasure on the code register plus `draws` random
/// single-qubit channels, drawn in order from `rng`.
pub fn default_error_suite<R: Rng + ?Sized>(code: &QlwcCode, draws: usize, rng: &mut R) -> Result<Vec<ErrorChannel>> {
    let n = code.params.n;
    let mut out = Vec::with_capacity(n + draws);
    for i in 0..n {
        out.push(ErrorChannel::erasure(code, &[(Region::State, i)])?);
    }
    for j in 0..draws {
        out.push(ErrorChannel::random_single(code, (Region::State, j % n), rng)?);
    }
    Ok(out)
}

pub fn cmd_qlwc(cli: &Cli, a: &QlwcArgs, report: &mut RunReport) -> Result<()> {
    let inner = CssCode::by_name(&a.inner)?;
    if inner.k != 1 {
        return Err(Error::InvalidParameter(format!(
            "the {} code encodes {} qubits; messages are single qubits",
            inner.name, inner.k
        )));
    }
    let code = build_qlwc(inner, a.delta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let errors = if a.error.is_empty() {
        default_error_suite(&code, a.draws, &mut rng)?
    } else {
        a.error.iter().map(|s| ErrorChannel::parse(&code, s, &mut rng)).collect::<Result<Vec<_>>>()?
    };
    let budget = code.inner.correctable();
    if let Some(e) = errors.iter().find(|e| e.weight() > budget) {
        return Err(Error::ErrorBudget { support: e.weight(), budget });
    }
    let messages: Vec<(String, StateVector)> = match &a.message {
        Some(m) => vec![(m.clone(), parse_message(m)?)],
        None => ["0", "plus", "bell"].iter().map(|m| Ok((m.to_string(), parse_message(m)?))).collect::<Result<_>>()?,
    };
    let p = code.params.clone();
    report.equal("w_is_3_plus_2r", p.w as f64, (3 + 2 * p.r) as f64);
    report.at_most("measured_locality", p.measured_locality as f64, p.w as f64);
    report.at_least("waiting_fraction", p.waiting_fraction, 1.0 - p.delta * p.delta / 4.0 - 1e-12);
    report.at_most("blocklength", p.m as f64, p.m_bound as f64);
    let mut per_message = Vec::new();
    for (name, m) in &messages {
        let energy = code.encoded_energy(m)?;
        report.at_most(format!("{name}/encoded_energy"), energy.abs(), cli.tol);
        let junk = code.junk_weight(m)?;
        report.at_most(format!("{name}/junk_weight"), junk.delta_prime, junk.bound + 1e-9);
        let trials: Vec<RecoveryReport> = errors.par_iter().map(|e| code.recovery_trial(m, e)).collect::<Result<_>>()?;
        let worst = trials.iter().map(|t| t.distance).fold(0.0, f64::max);
        report.at_most(format!("{name}/max_trace_distance"), worst, p.delta + 1e-9);
        per_message.push(json!({ "message": name, "junk": junk, "max_distance": worst, "trials": trials }));
    }
    report.details = json!({ "parameters": p, "messages": per_message });
    Ok(())
}

/// `U diag(λ) U†` with `λ` uniform in `[−1, 1]`.
fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> nalgebra::DMatrix<C64> {
    let u = haar_unitary(d, rng);
    let diag =
        nalgebra::DMatrix::from_fn(
            d,
            d,
            |r, c| if r == c { C64::new(rng.random_range(-1.0..=1.0), 0.0) } else { C64::new(0.0, 0.0) },
        );
    let m = &u * diag * u.adjoint();
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn cmd_lightcone(cli: &Cli, a: &LightconeArgs, report: &mut RunReport) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let layering = layerize(&c);
    let zone = effect_zone_and_shadow(&layering, &a.target)?;
    report.at_most("shadow_size", zone.shadow.len() as f64, zone.shadow_bound() as f64);
    let mut details = json!({ "depth": layering.depth(), "target": zone });
    if !a.other.is_empty() {
        let rel = lightcone_relation(&layering, &a.target, &a.other)?;
        details["relation"] = serde_json::to_value(&rel)?;
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        let dim = |s: &[usize]| s.iter().map(|&x| c.shape.dim(x)).product::<usize>();
        let ta = LocalTerm::new(a.target.clone(), random_hermitian(dim(&a.target), &mut rng), TermTag::Other);
        let tb = LocalTerm::new(a.other.clone(), random_hermitian(dim(&a.other), &mut rng), TermTag::Other);
        let f = factorization_check(&c, &ta, &tb, &[])?;
        if f.lightcones_disjoint {
            report.at_most("factorization_discrepancy", f.discrepancy, cli.tol);
        } else {
            report.note("lightcones overlap; the factorization values are diagnostic only");
        }
        details["factorization"] = serde_json::to_value(&f)?;
    }
    report.details = details;
    Ok(())
}

pub fn cmd_spectrum(cli: &Cli, a: &SpectrumArgs, report: &mut RunReport) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let h = build_fk_hamiltonian(&c, &fk_options(a.clock_dim, a.no_out))?;
    let cfg = eigen_config(cli);
    let spec = eigensolve_hermitian(&h.terms, a.count.max(1), &cfg)?;
    report.at_least("lowest_eigenvalue", spec.values[0], -cli.tol);
    let worst = spec.residuals.iter().copied().fold(0.0, f64::max);
    report.at_most("max_residual", worst, EIGEN_RESIDUAL);
    report.details = json!({
        "dimension": h.terms.dim(),
        "method": spec.method,
        "eigenvalues": spec.values,
        "residuals": spec.residuals,
        "ground_degeneracy": spec.ground_degeneracy(cfg.gap_tol),
        "gap": spec.gap(cfg.gap_tol),
    });
    Ok(())
}

pub fn cmd_traceorder(cli: &Cli, a: &TraceorderArgs, report: &mut RunReport) -> Result<()> {
    let c = load_circuit(&a.circuit)?;
    let wshape = c.witness_shape();
    if a.witness >= wshape.total_dim() {
        return Err(Error::InvalidParameter(format!("witness index {} outside 0..{}", a.witness, wshape.total_dim())));
    }
    let w = StateVector::basis(wshape, a.witness);
    let psi = history_state(&c, &w, a.clock_dim)?;
    let r = verify_traceorder(&psi, &a.traced, eigen_config(cli).dense_cap)?;
    report.at_most("traceorder_distance", r.distance, cli.tol);
    report.details = json!({ "distance": r.distance, "full_space": r.full_space, "t_max": psi.t_max() });
    Ok(())
}
