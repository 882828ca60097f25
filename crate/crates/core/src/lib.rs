pub mod circuits;
pub mod cli;
pub mod clock;
pub mod error;
pub mod linalg;
pub mod lngs;
pub mod qlwc;
pub mod report;
pub mod tolerances;

pub use error::{Error, Result};
