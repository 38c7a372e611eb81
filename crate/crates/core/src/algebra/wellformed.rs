use std::collections::HashSet;
use std::fmt;

use super::action::Action;
use super::process::{Process, Term};
use super::state::Name;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// A branch of `⊕` is itself probabilistic.
    ProbabilisticAfterChoice,
    /// A summand of `Σ` is probabilistic.
    ProbabilisticSummand,
    UnguardedRecursion(Name),
    FreeVariable(Name),
    EmptyChoice,
    WeightArity { weights: usize, branches: usize },
    EmptyChannel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Rendering of the offending subterm, truncated.
    pub subterm: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match &self.kind {
            ViolationKind::ProbabilisticAfterChoice => {
                "probabilistic continuation after probabilistic choice".to_string()
            }
            ViolationKind::ProbabilisticSummand => "probabilistic process inside a sum".to_string(),
            ViolationKind::UnguardedRecursion(x) => format!("unguarded recursion on {x}"),
            ViolationKind::FreeVariable(x) => format!("free process variable {x}"),
            ViolationKind::EmptyChoice => "probabilistic choice without branches".to_string(),
            ViolationKind::WeightArity { weights, branches } => {
                format!("{weights} weights for {branches} branches")
            }
            ViolationKind::EmptyChannel => "empty channel name".to_string(),
        };
        write!(f, "{what} in `{}`", self.subterm)
    }
}

/// Grammar side conditions: non-deterministic continuations after `⊕`,
/// no probabilistic summands, guarded and closed recursion. An empty result
/// means the term is well formed.
pub fn well_formed<F: Scalar>(p: &Process<F>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    walk(p, &mut Vec::new(), &mut Vec::new(), &mut seen, &mut out);
    out
}

type Bound = Vec<(Name, bool)>;

fn walk<F: Scalar>(
    p: &Process<F>,
    bound: &mut Bound,
    unguarded: &mut Vec<Name>,
    seen: &mut HashSet<(usize, Bound, Vec<Name>)>,
    out: &mut Vec<Violation>,
) {
    if !seen.insert((p.addr(), bound.clone(), unguarded.clone())) {
        return;
    }
    let mut flag = |kind| out.push(violation(p, kind));
    match p.term() {
        Term::Stop => {}
        Term::Var(x) => {
            if !bound.iter().any(|(b, _)| b == x) {
                flag(ViolationKind::FreeVariable(x.clone()));
            }
            if unguarded.contains(x) {
                flag(ViolationKind::UnguardedRecursion(x.clone()));
            }
        }
        Term::Prefix(a, g) => {
            if let Action::Send { channel, .. } | Action::Receive { channel, .. } = a {
                if channel.is_empty() {
                    flag(ViolationKind::EmptyChannel);
                }
            }
            walk(g, bound, &mut Vec::new(), seen, out);
        }
        Term::Guard(_, g) => walk(g, bound, &mut Vec::new(), seen, out),
        Term::Sum(gs) => {
            for g in gs {
                if probabilistic(g, bound) {
                    out.push(violation(g, ViolationKind::ProbabilisticSummand));
                }
                walk(g, bound, unguarded, seen, out);
            }
        }
        Term::Prob(w, gs) => {
            if gs.is_empty() {
                flag(ViolationKind::EmptyChoice);
            }
            if w.arity() != gs.len() {
                flag(ViolationKind::WeightArity {
                    weights: w.arity(),
                    branches: gs.len(),
                });
            }
            for g in gs {
                if probabilistic(g, bound) {
                    out.push(violation(g, ViolationKind::ProbabilisticAfterChoice));
                }
                walk(g, bound, &mut Vec::new(), seen, out);
            }
        }
        Term::Rec(x, body) => {
            bound.push((x.clone(), body.is_probabilistic()));
            unguarded.push(x.clone());
            walk(body, bound, unguarded, seen, out);
            unguarded.pop();
            bound.pop();
        }
    }
}

/// Probabilistic, counting a variable bound to a probabilistic recursion.
fn probabilistic<F: Scalar>(p: &Process<F>, bound: &Bound) -> bool {
    match p.term() {
        Term::Var(x) => bound
            .iter()
            .rev()
            .find(|(b, _)| b == x)
            .is_some_and(|(_, prob)| *prob),
        _ => p.is_probabilistic(),
    }
}

fn violation<F: Scalar>(p: &Process<F>, kind: ViolationKind) -> Violation {
    let mut subterm = p.to_string().replace('\n', " ");
    if subterm.chars().count() > 120 {
        subterm = subterm.chars().take(117).collect::<String>() + "...";
    }
    Violation { kind, subterm }
}
