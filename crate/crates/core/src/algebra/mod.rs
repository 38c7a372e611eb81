//! Syntax of processes and the state calculus.

pub mod action;
pub mod data;
pub mod error;
pub mod process;
pub mod render;
pub mod state;
pub mod wellformed;

pub use action::{Action, ActionLabel, Condition, Transformation, Weights};
pub use data::DataValue;
pub use error::EvalError;
pub use process::{Process, Term};
pub use render::render_process;
pub use state::{name, var_set, Name, State, VarSet};
pub use wellformed::{well_formed, Violation, ViolationKind};
