//! A 3-local qutrit chain whose noisy ground states need logarithmic depth.

mod bounds;
mod chain;
mod noisy;

pub use bounds::{
    check_good_pairs, contradiction_margin, depth_bound, depth_bound_certificate, low_depth_adversary, monte_carlo,
    verify_lngs_inequalities, AdversaryReport, DepthCertificate, InequalityReport, MonteCarloReport,
};
pub use chain::{
    a_observable, b_observable, build_lngs_hamiltonian, fuse_clocked, fuse_pair, fusion_isometry, single_site_formula,
    QutritChainHamiltonian,
};
pub use noisy::{
    dirichlet_uniform, good_indices, make_noisy_ground_state, max_corrupted, physical_noise_spec, sample_spec,
    tensor_power_channel, CorruptionKind, NoiseComponent, NoisyGroundStateSpec, NoisyState,
};
