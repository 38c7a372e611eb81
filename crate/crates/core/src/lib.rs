//! A process algebra for ant colony optimization: terms, a small-step
//! interpreter, ACO system builders and a direct reference implementation.
//!
//! Everything numeric is generic over [`scalar::Scalar`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`.

pub mod aco;
pub mod algebra;
pub mod oracle;
pub mod scalar;
pub mod semantics;
pub mod tsp;

pub type Process = algebra::Process<f64>;
pub type State = algebra::State<f64>;
pub type DataValue = algebra::DataValue<f64>;
pub type Action = algebra::Action<f64>;
pub type Configuration = semantics::Configuration<f64>;
pub type Trace = semantics::Trace<f64>;
pub type TspInstance = tsp::TspInstance<f64>;
