//! ACO systems expressed as processes: parameters, formulas and builders.

mod coarse;
pub mod config;
mod fine;
pub mod formulas;
pub mod ops;
pub mod params;
mod system;
pub mod vars;

pub use params::{AcoParams, Algorithm, ParamError, SharingFunction, Variant};
pub use system::{build_system, build_system_with_copies, BestTour, BuiltSystem, LeafRole, Registry};
