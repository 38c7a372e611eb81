mod config;
mod engine;
mod error;
mod local;
mod lts;
pub mod native;
mod random;
mod rules;
mod scheduler;
mod transition;

pub use config::{Configuration, Leaf};
pub use engine::{
    resolve_step, run, run_observed, state_delta, step, LeafDelta, Limits, RunError, StepOutcome,
    Termination, Trace, TraceEvent, Verbosity, SNAPSHOT_INTERVAL,
};
pub use error::SemanticsError;
pub use local::{evaluate_choice, is_done, local_moves, EvaluatedChoice, LocalMove, MoveKind};
pub use lts::{explore_lts, LtsEdge, LtsError, LtsGraph};
pub use random::{sample_index, substream, RandomSource};
pub use rules::Rule;
pub use scheduler::{Policy, Scheduler};
pub use transition::{
    enabled_transitions, is_terminated, offer, prob_distribution, Label, Offer, Transition,
};
