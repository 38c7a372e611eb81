use std::time::{Duration, Instant};

use serde_json::{json, Value};
use thiserror::Error;

use super::config::Configuration;
use super::error::SemanticsError;
use super::random::{sample_index, RandomSource};
use super::rules::Rule;
use super::scheduler::Scheduler;
use super::transition::{is_terminated, offer, Label, Offer, Transition};
use crate::algebra::{DataValue, Name, State};
use crate::scalar::Scalar;

/// Full per-leaf state snapshots are kept every this many events.
pub const SNAPSHOT_INTERVAL: usize = 1000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Verbosity {
    /// Only counts and the final configuration.
    SummaryOnly,
    /// Events without state deltas.
    #[default]
    Events,
    /// Events with state deltas and periodic snapshots.
    Deltas,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Limits {
    pub max_steps: Option<usize>,
    pub wall_budget: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: Some(10_000_000),
            wall_budget: None,
        }
    }
}

impl Limits {
    pub fn steps(max_steps: usize) -> Self {
        Limits {
            max_steps: Some(max_steps),
            wall_budget: None,
        }
    }

    pub fn unbounded() -> Self {
        Limits {
            max_steps: None,
            wall_budget: None,
        }
    }
}

/// Variable changes of one leaf; `None` marks a removed binding.
pub type LeafDelta<F> = (usize, Vec<(Name, Option<DataValue<F>>)>);

#[derive(Clone, Debug)]
pub struct TraceEvent<F: Scalar> {
    pub step: usize,
    pub rule: Rule,
    pub derivation: Vec<Rule>,
    pub label: Label,
    pub winner: Option<usize>,
    pub partner: Option<usize>,
    pub channel: Option<Name>,
    pub delta: Vec<LeafDelta<F>>,
    pub snapshot: Option<Vec<State<F>>>,
}

impl<F: Scalar> TraceEvent<F> {
    pub fn to_json(&self) -> Value {
        let delta: Vec<Value> = self
            .delta
            .iter()
            .flat_map(|(leaf, changes)| {
                changes.iter().map(move |(var, value)| {
                    json!({
                        "leaf": leaf,
                        "var": var.as_ref(),
                        "value": value.as_ref().map_or(Value::Null, |v| v.to_json()),
                    })
                })
            })
            .collect();
        let mut v = json!({
            "step": self.step,
            "rule": self.rule.as_str(),
            "label": self.label.to_json(),
            "winner": self.winner,
            "partner": self.partner,
            "delta": delta,
        });
        if let Some(c) = &self.channel {
            v["channel"] = Value::String(c.to_string());
        }
        if let Some(states) = &self.snapshot {
            v["snapshot"] = Value::Array(states.iter().map(|s| s.to_json()).collect());
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Every leaf finished.
    Terminated,
    /// Nothing enabled, some leaf unfinished.
    Deadlocked,
    StepLimit,
    TimeLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Terminated => "terminated",
            Termination::Deadlocked => "deadlocked",
            Termination::StepLimit => "step-limit",
            Termination::TimeLimit => "time-limit",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trace<F: Scalar> {
    pub events: Vec<TraceEvent<F>>,
    pub steps: usize,
    pub final_config: Configuration<F>,
    pub termination: Termination,
    /// Scheduler choices among two or more options, replayable.
    pub choices: Vec<(usize, usize)>,
}

impl<F: Scalar> Trace<F> {
    pub fn final_states(&self) -> Vec<State<F>> {
        self.final_config.states()
    }

    /// Line-delimited JSON, one event per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_json().to_string());
            out.push('\n');
        }
        out
    }

    pub fn labels(&self) -> Vec<String> {
        self.events.iter().map(|e| e.label.to_string()).collect()
    }
}

#[derive(Debug, Error)]
pub enum RunError<F: Scalar> {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("run stopped by {} after {} steps", .0.termination.as_str(), .0.steps)]
    LimitExceeded(Box<Trace<F>>),
}

impl<F: Scalar> RunError<F> {
    pub fn partial_trace(&self) -> Option<&Trace<F>> {
        match self {
            RunError::LimitExceeded(t) => Some(t),
            RunError::Semantics(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub enum StepOutcome<F: Scalar> {
    Moved {
        transition: Transition<F>,
        /// Index of the scheduler choice, or of the sampled branch.
        choice: usize,
    },
    Terminated,
    Deadlocked,
}

/// Resolves one small step of `c` without applying it.
pub fn resolve_step<F: Scalar>(
    c: &Configuration<F>,
    scheduler: &mut Scheduler,
    rng: &mut RandomSource,
) -> Result<StepOutcome<F>, SemanticsError> {
    match offer(c)? {
        Offer::Distribution {
            leaf,
            weights,
            mut transitions,
        } => {
            let u = rng.uniform(leaf as u64);
            let i = sample_index(&weights, u);
            Ok(StepOutcome::Moved {
                transition: transitions.swap_remove(i),
                choice: i,
            })
        }
        Offer::Choices(mut ts) if !ts.is_empty() => {
            let i = scheduler.choose(&ts)?;
            Ok(StepOutcome::Moved {
                transition: ts.swap_remove(i),
                choice: i,
            })
        }
        Offer::Choices(_) => Ok(if is_terminated(c)? {
            StepOutcome::Terminated
        } else {
            StepOutcome::Deadlocked
        }),
    }
}

/// Takes one small step in place.
pub fn step<F: Scalar>(
    c: &mut Configuration<F>,
    scheduler: &mut Scheduler,
    rng: &mut RandomSource,
) -> Result<StepOutcome<F>, SemanticsError> {
    let outcome = resolve_step(c, scheduler, rng)?;
    if let StepOutcome::Moved { transition, .. } = &outcome {
        *c = transition.target.clone();
    }
    Ok(outcome)
}

pub fn state_delta<F: Scalar>(before: &Configuration<F>, after: &Configuration<F>) -> Vec<LeafDelta<F>> {
    let (Ok(bs), Ok(as_)) = (before.leaves(), after.leaves()) else {
        return Vec::new();
    };
    bs.iter()
        .zip(&as_)
        .enumerate()
        .filter(|(_, (b, a))| !b.state.ptr_eq(&a.state))
        .map(|(i, (b, a))| (i, a.state.delta_from(&b.state)))
        .filter(|(_, d)| !d.is_empty())
        .collect()
}

pub fn run<F: Scalar>(
    c: Configuration<F>,
    scheduler: &mut Scheduler,
    rng: &mut RandomSource,
    limits: Limits,
    verbosity: Verbosity,
) -> Result<Trace<F>, RunError<F>> {
    run_impl(c, scheduler, rng, limits, verbosity, None)
}

/// Like [`run`], calling `observe(event, before, after)` after every step.
/// The event carries deltas only at [`Verbosity::Deltas`]; the two
/// configurations are always there to compare.
pub fn run_observed<F: Scalar>(
    c: Configuration<F>,
    scheduler: &mut Scheduler,
    rng: &mut RandomSource,
    limits: Limits,
    verbosity: Verbosity,
    mut observe: impl FnMut(&TraceEvent<F>, &Configuration<F>, &Configuration<F>),
) -> Result<Trace<F>, RunError<F>> {
    run_impl(c, scheduler, rng, limits, verbosity, Some(&mut observe))
}

type Observer<'a, F> = &'a mut dyn FnMut(&TraceEvent<F>, &Configuration<F>, &Configuration<F>);

fn run_impl<F: Scalar>(
    mut c: Configuration<F>,
    scheduler: &mut Scheduler,
    rng: &mut RandomSource,
    limits: Limits,
    verbosity: Verbosity,
    mut observe: Option<Observer<'_, F>>,
) -> Result<Trace<F>, RunError<F>> {
    let want_delta = verbosity == Verbosity::Deltas;
    let start = Instant::now();
    let mut events = Vec::new();
    let mut steps = 0usize;
    let termination = loop {
        if limits.max_steps.is_some_and(|m| steps >= m) {
            break Termination::StepLimit;
        }
        if steps % 256 == 0 && limits.wall_budget.is_some_and(|b| start.elapsed() >= b) {
            break Termination::TimeLimit;
        }
        let transition = match resolve_step(&c, scheduler, rng)? {
            StepOutcome::Moved { transition, .. } => transition,
            StepOutcome::Terminated => break Termination::Terminated,
            StepOutcome::Deadlocked => break Termination::Deadlocked,
        };
        steps += 1;
        let Transition {
            label,
            rule,
            derivation,
            winner,
            partner,
            channel,
            target,
        } = transition;
        let before = std::mem::replace(&mut c, target);
        let mut event = TraceEvent {
            step: steps,
            rule,
            derivation,
            label,
            winner,
            partner,
            channel,
            delta: if want_delta {
                state_delta(&before, &c)
            } else {
                Vec::new()
            },
            snapshot: None,
        };
        if let Some(f) = observe.as_mut() {
            f(&event, &before, &c);
        }
        match verbosity {
            Verbosity::SummaryOnly => {}
            Verbosity::Events => {
                event.delta.clear();
                events.push(event);
            }
            Verbosity::Deltas => {
                if steps % SNAPSHOT_INTERVAL == 0 {
                    event.snapshot = Some(c.states());
                }
                events.push(event);
            }
        }
    };
    let trace = Trace {
        events,
        steps,
        final_config: c,
        termination,
        choices: scheduler.record().to_vec(),
    };
    match termination {
        Termination::Terminated | Termination::Deadlocked => Ok(trace),
        Termination::StepLimit | Termination::TimeLimit => {
            Err(RunError::LimitExceeded(Box::new(trace)))
        }
    }
}
