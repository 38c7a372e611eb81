use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use thiserror::Error;

use super::config::Configuration;
use super::error::SemanticsError;
use super::rules::Rule;
use super::transition::{is_terminated, offer, Label};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LtsEdge {
    pub from: usize,
    pub to: usize,
    pub rule: Rule,
    pub label: Label,
}

#[derive(Clone, Debug)]
pub struct LtsGraph<F: Scalar> {
    /// State 0 is the initial configuration.
    pub states: Vec<Configuration<F>>,
    pub edges: Vec<LtsEdge>,
    pub deadlocks: Vec<usize>,
    pub terminals: Vec<usize>,
    /// False when exploration stopped at the state limit.
    pub complete: bool,
}

impl<F: Scalar> LtsGraph<F> {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn transition_count(&self) -> usize {
        self.edges.len()
    }

    /// Committed states with no outgoing edge.
    pub fn committed_dead_ends(&self) -> Vec<usize> {
        let mut out_degree = vec![0usize; self.states.len()];
        for e in &self.edges {
            out_degree[e.from] += 1;
        }
        (0..self.states.len())
            .filter(|&i| self.states[i].is_committed() && out_degree[i] == 0)
            .collect()
    }

    pub fn to_dot(&self) -> String {
        let id = |i: usize| format!("{:016x}", self.states[i].canonical_hash());
        let mut out = String::from("digraph lts {\n");
        for i in 0..self.states.len() {
            let mut attrs = String::new();
            if i == 0 {
                attrs.push_str(", style=bold");
            }
            if self.deadlocks.contains(&i) {
                attrs.push_str(", color=red");
            } else if self.terminals.contains(&i) {
                attrs.push_str(", shape=doublecircle");
            }
            let _ = writeln!(out, "  \"{}\" [label=\"{}\"{}];", id(i), i, attrs);
        }
        for e in &self.edges {
            let label = format!("{} {}", e.rule, e.label).replace('"', "\\\"");
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", id(e.from), id(e.to), label);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Error)]
pub enum LtsError<F: Scalar> {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error("state limit reached after {} states", .0.states.len())]
    LimitExceeded(Box<LtsGraph<F>>),
}

/// Breadth-first closure over every nondeterministic and probabilistic
/// transition, identifying configurations structurally after renaming bound
/// recursion variables canonically.
pub fn explore_lts<F: Scalar>(
    c: &Configuration<F>,
    max_states: usize,
) -> Result<LtsGraph<F>, LtsError<F>> {
    let mut graph = LtsGraph {
        states: vec![c.normalized()],
        edges: Vec::new(),
        deadlocks: Vec::new(),
        terminals: Vec::new(),
        complete: true,
    };
    let mut index: HashMap<Configuration<F>, usize> = HashMap::new();
    index.insert(graph.states[0].clone(), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let current = graph.states[i].clone();
        // Offers that mix action and probabilistic steps are rejected here.
        let transitions = offer(&current)?.into_transitions();
        if transitions.is_empty() {
            if is_terminated(&current)? {
                graph.terminals.push(i);
            } else {
                graph.deadlocks.push(i);
            }
            continue;
        }
        for t in transitions {
            let target = t.target.normalized();
            let to = match index.get(&target) {
                Some(&to) => to,
                None => {
                    if graph.states.len() >= max_states {
                        graph.complete = false;
                        return Err(LtsError::LimitExceeded(Box::new(graph)));
                    }
                    let to = graph.states.len();
                    index.insert(target.clone(), to);
                    graph.states.push(target);
                    queue.push_back(to);
                    to
                }
            };
            graph.edges.push(LtsEdge {
                from: i,
                to,
                rule: t.rule,
                label: t.label,
            });
        }
    }
    Ok(graph)
}
