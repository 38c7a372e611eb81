//! Runs a built system and its sequential counterpart side by side.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use super::{run_oracle, OracleError, OracleSetup, OracleTrace};
use crate::aco::{BuiltSystem, LeafRole};
use crate::algebra::ActionLabel;
use crate::aco::ops::read_trails;
use crate::scalar::Scalar;
use crate::semantics::{
    run_observed, Configuration, Label, Limits, RandomSource, RunError, Scheduler, Termination, TraceEvent, Verbosity,
};

/// Trails, paths and costs of one copy right after one of its trail
/// updates.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineIteration<F> {
    /// 1-based; always 1 for fine variants.
    pub copy: usize,
    pub iteration: usize,
    pub trails: Vec<F>,
    pub paths: Vec<Vec<usize>>,
    pub costs: Vec<F>,
}

/// Collects an [`EngineIteration`] for every trail update fired in a run.
pub struct IterationObserver<'a, F: Scalar> {
    sys: &'a BuiltSystem<F>,
    counts: Vec<usize>,
    pub iterations: Vec<EngineIteration<F>>,
}

impl<'a, F: Scalar> IterationObserver<'a, F> {
    pub fn new(sys: &'a BuiltSystem<F>) -> Self {
        IterationObserver {
            sys,
            counts: vec![0; sys.vars.len()],
            iterations: Vec::new(),
        }
    }

    pub fn observe(&mut self, event: &TraceEvent<F>, after: &Configuration<F>) {
        let Label::Action(ActionLabel::Transform(t)) = &event.label else {
            return;
        };
        if !(t.as_ref() == "trailUpd" || (t.starts_with("trailUpd[") && t.ends_with(']'))) {
            return;
        }
        let Some(leaf) = event.winner else { return };
        let copy = match self.sys.roles.get(leaf) {
            Some(LeafRole::Graph) => 1,
            Some(LeafRole::Copy(s)) => *s,
            _ => return,
        };
        let Some(state) = after.state_of(leaf) else { return };
        let v = &self.sys.vars[copy - 1];
        let Ok(trails) = read_trails(state, v) else { return };
        let paths = (1..=v.m).map(|k| state.index_list(v.path(k)).unwrap_or_default()).collect();
        let costs = (1..=v.m)
            .map(|k| state.scalar(v.length(k)).unwrap_or(F::nan()))
            .collect();
        self.counts[copy - 1] += 1;
        self.iterations.push(EngineIteration {
            copy,
            iteration: self.counts[copy - 1],
            trails,
            paths,
            costs,
        });
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Divergence {
    Trail {
        copy: usize,
        iteration: usize,
        i: usize,
        j: usize,
        engine: f64,
        oracle: f64,
    },
    Path {
        copy: usize,
        iteration: usize,
        ant: usize,
        engine: Vec<usize>,
        oracle: Vec<usize>,
    },
    Cost {
        copy: usize,
        iteration: usize,
        ant: usize,
        engine: f64,
        oracle: f64,
    },
    IterationCount {
        copy: usize,
        engine: usize,
        oracle: usize,
    },
    Result {
        engine: Option<f64>,
        oracle: f64,
    },
}

impl Divergence {
    /// Iteration of the first difference; 0 when it is not tied to one.
    pub fn iteration(&self) -> usize {
        match self {
            Divergence::Trail { iteration, .. }
            | Divergence::Path { iteration, .. }
            | Divergence::Cost { iteration, .. } => *iteration,
            _ => 0,
        }
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Trail {
                copy,
                iteration,
                i,
                j,
                engine,
                oracle,
            } => write!(
                f,
                "copy {copy}, iteration {iteration}, edge ({i},{j}): engine {engine} vs oracle {oracle}"
            ),
            Divergence::Path {
                copy,
                iteration,
                ant,
                engine,
                oracle,
            } => write!(
                f,
                "copy {copy}, iteration {iteration}, ant {ant}: path {engine:?} vs {oracle:?}"
            ),
            Divergence::Cost {
                copy,
                iteration,
                ant,
                engine,
                oracle,
            } => write!(
                f,
                "copy {copy}, iteration {iteration}, ant {ant}: cost {engine} vs {oracle}"
            ),
            Divergence::IterationCount { copy, engine, oracle } => {
                write!(f, "copy {copy}: {engine} iterations vs {oracle}")
            }
            Divergence::Result { engine, oracle } => {
                write!(f, "collected result {engine:?} vs best copy {oracle}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub variant: &'static str,
    pub steps: usize,
    pub termination: Termination,
    /// `(copy, iteration, max |τ_engine − τ_oracle|)`.
    pub deviations: Vec<(usize, usize, f64)>,
    pub first_divergence: Option<Divergence>,
}

impl VerifyReport {
    pub fn matched(&self) -> bool {
        self.first_divergence.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variant": self.variant,
            "steps": self.steps,
            "termination": self.termination.as_str(),
            "match": self.matched(),
            "deviations": self.deviations.iter().map(|&(c, it, d)| json!({
                "copy": c, "iteration": it, "max_abs_trail_deviation": d,
            })).collect::<Vec<_>>(),
            "first_divergence": self.first_divergence.as_ref().map(|d| d.to_string()),
        })
    }
}

#[derive(Debug, Error)]
pub enum VerifyError<F: Scalar> {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Run(#[from] RunError<F>),
}

/// Oracle setups matching the components of `sys`, one per trail holder.
fn setups<F: Scalar>(sys: &BuiltSystem<F>) -> Result<Vec<OracleSetup>, OracleError> {
    if sys.variant.is_fine() {
        return Ok(vec![OracleSetup::fine(sys.variant)?]);
    }
    if !sys.variant.has_oracle() {
        return Err(OracleError::NoCounterpart(sys.variant.as_str()));
    }
    let algorithm = sys.params.effective_algorithm();
    Ok((1..=sys.copies.len())
        .map(|s| {
            let mut setup = OracleSetup::copy(algorithm, s);
            setup.first_stream = sys.roles.iter().position(|&r| r == LeafRole::Copy(s)).unwrap_or(s - 1) as u64;
            setup
        })
        .collect())
}

/// Runs `sys` under the fixed-priority scheduler and the sequential
/// algorithm with the same seed, comparing every iteration exactly.
/// `oracle_rho` replaces ρ on the oracle side only.
pub fn verify<F: Scalar>(
    sys: &BuiltSystem<F>,
    seed: u64,
    oracle_rho: Option<F>,
    limits: Limits,
) -> Result<VerifyReport, VerifyError<F>> {
    let setups = setups(sys)?;
    let mut traces: Vec<OracleTrace<F>> = Vec::with_capacity(setups.len());
    for (c, setup) in setups.iter().enumerate() {
        let mut params = if sys.variant.is_fine() {
            sys.params.clone()
        } else {
            sys.copies[c].clone()
        };
        if let Some(rho) = oracle_rho {
            params.rho = rho;
        }
        traces.push(run_oracle(&sys.instance, &params, *setup, seed)?);
    }
    let mut obs = IterationObserver::new(sys);
    let trace = run_observed(
        sys.config.clone(),
        &mut Scheduler::fixed(),
        &mut RandomSource::new(seed),
        limits,
        Verbosity::SummaryOnly,
        |e, _, after| obs.observe(e, after),
    )?;
    let n = sys.instance.n();
    let mut deviations = Vec::new();
    let mut first: Option<Divergence> = None;
    let note = |d: Divergence, first: &mut Option<Divergence>| {
        if first.is_none() {
            *first = Some(d);
        }
    };
    for (c, oracle) in traces.iter().enumerate() {
        let copy = c + 1;
        let engine: Vec<&EngineIteration<F>> = obs.iterations.iter().filter(|e| e.copy == copy).collect();
        for (e, o) in engine.iter().zip(&oracle.iterations) {
            let mut max_dev = 0.0_f64;
            for (idx, (a, b)) in e.trails.iter().zip(&o.trails).enumerate() {
                let dev = (a.as_f64() - b.as_f64()).abs();
                max_dev = max_dev.max(dev);
                if a != b {
                    note(
                        Divergence::Trail {
                            copy,
                            iteration: o.iteration,
                            i: idx / n + 1,
                            j: idx % n + 1,
                            engine: a.as_f64(),
                            oracle: b.as_f64(),
                        },
                        &mut first,
                    );
                }
            }
            deviations.push((copy, o.iteration, max_dev));
            for (k, (pa, pb)) in e.paths.iter().zip(&o.paths).enumerate() {
                if pa != pb {
                    note(
                        Divergence::Path {
                            copy,
                            iteration: o.iteration,
                            ant: k + 1,
                            engine: pa.clone(),
                            oracle: pb.clone(),
                        },
                        &mut first,
                    );
                }
            }
            for (k, (ca, cb)) in e.costs.iter().zip(&o.costs).enumerate() {
                if ca != cb {
                    note(
                        Divergence::Cost {
                            copy,
                            iteration: o.iteration,
                            ant: k + 1,
                            engine: ca.as_f64(),
                            oracle: cb.as_f64(),
                        },
                        &mut first,
                    );
                }
            }
        }
        if engine.len() != oracle.iterations.len() {
            note(
                Divergence::IterationCount {
                    copy,
                    engine: engine.len(),
                    oracle: oracle.iterations.len(),
                },
                &mut first,
            );
        }
    }
    if !sys.variant.is_fine() {
        // The collector keeps the shortest final-iteration tour over copies.
        let expected = traces
            .iter()
            .filter_map(|t| t.iterations.last())
            .map(|r| r.costs.iter().fold(F::infinity(), |a, &b| if b < a { b } else { a }))
            .fold(F::infinity(), |a, b| if b < a { b } else { a });
        let got = sys.collected(&trace.final_config).map(|b| b.length);
        if got != Some(expected) {
            note(
                Divergence::Result {
                    engine: got.map(|g| g.as_f64()),
                    oracle: expected.as_f64(),
                },
                &mut first,
            );
        }
    }
    Ok(VerifyReport {
        variant: sys.variant.as_str(),
        steps: trace.steps,
        termination: trace.termination,
        deviations,
        first_divergence: first,
    })
}
