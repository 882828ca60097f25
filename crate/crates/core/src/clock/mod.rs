//! Clock registers, Feynman-Kitaev Hamiltonians and history states.

mod fk;
mod history;
mod layout;
mod verify;

pub use fk::{build_fk_hamiltonian, ClockHamiltonian, FkOptions};
pub use history::{history_state, ClockedMixture, ClockedState, HistoryState, Representation};
pub use layout::{ceil_root, clock_state, levels_to_key, unary_state, ClockLabel, ClockLayout, Transition};
pub use verify::{
    accept_probability, closeness_to_history, ground_space_report, kitaev_yes_bound, lambda_min, verify_traceorder,
    ClosenessReport, GroundSpace, GroundSpaceReport, KitaevReport, TraceorderReport,
};
