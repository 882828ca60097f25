//! Approximate low-weight-check codes from clock Hamiltonians around a CSS
//! encoder, and the error-corrected verifier built from them.

mod code;
mod construction;
mod verifier;

pub use code::{pauli_expectation, CssCode, PauliKind, BRUTE_FORCE_MAX_N};
pub use construction::{
    build_qlwc, build_wait_circuit, choose_r, r_closed_form, ErrorChannel, JunkReport, QlwcCode, QlwcParameters, RecoveryReport,
    Region,
};
pub use verifier::{
    equivalence_error, transform_error_corrected, verifier_pipeline, TransformedCircuit, VerifierInstance, VerifierReport,
};
