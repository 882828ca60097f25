//! Gate-level circuits, layering, and lightcone analysis.

mod circuit;
mod gate;
pub mod json;
mod layering;
mod lightcone;
pub mod random;

pub use circuit::{cat_circuit, Circuit};
pub use gate::Gate;
pub use json::{parse_circuit, CircuitFile};
pub use layering::{layerize, Layering};
pub use lightcone::{
    disjoint_lightcones, effect_zone_and_shadow, factorization_check, lightcone, lightcone_relation, FactorizationReport,
    LightconeRelation, LightconeReport,
};
