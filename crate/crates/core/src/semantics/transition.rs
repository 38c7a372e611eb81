//! Transitions of configurations: single components and the two-step
//! parallel composition (race, then execution).

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};

use super::config::{Configuration, Leaf};
use super::error::SemanticsError;
use super::local::{evaluate_choice, is_done, local_moves, LocalMove};
use super::rules::Rule;
use crate::algebra::{Action, ActionLabel, Name, State};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Label {
    Action(ActionLabel),
    Prob { probability: f64, branch: usize },
}

impl Label {
    pub fn is_prob(&self) -> bool {
        matches!(self, Label::Prob { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Label::Action(a) => Value::String(a.to_string()),
            Label::Prob {
                probability,
                branch,
            } => json!({ "p": probability, "branch": branch }),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Action(a) => write!(f, "{a}"),
            Label::Prob {
                probability,
                branch,
            } => write!(f, "p={probability} #{branch}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Transition<F: Scalar> {
    pub label: Label,
    /// Outermost rule.
    pub rule: Rule,
    /// Rules of the component's local derivation, innermost first, ending
    /// with `rule`.
    pub derivation: Vec<Rule>,
    pub winner: Option<usize>,
    pub partner: Option<usize>,
    pub channel: Option<Name>,
    pub target: Configuration<F>,
}

/// What a configuration offers: nondeterministic choices, or one
/// probabilistic distribution, never both.
#[derive(Clone, Debug)]
pub enum Offer<F: Scalar> {
    Choices(Vec<Transition<F>>),
    Distribution {
        /// Component whose random stream resolves the choice.
        leaf: usize,
        weights: Vec<F>,
        transitions: Vec<Transition<F>>,
    },
}

impl<F: Scalar> Offer<F> {
    pub fn transitions(&self) -> &[Transition<F>] {
        match self {
            Offer::Choices(ts) => ts,
            Offer::Distribution { transitions, .. } => transitions,
        }
    }

    pub fn into_transitions(self) -> Vec<Transition<F>> {
        match self {
            Offer::Choices(ts) => ts,
            Offer::Distribution { transitions, .. } => transitions,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.transitions().is_empty()
    }
}

/// Every transition derivable from `c`.
pub fn enabled_transitions<F: Scalar>(
    c: &Configuration<F>,
) -> Result<Vec<Transition<F>>, SemanticsError> {
    Ok(offer(c)?.into_transitions())
}

/// The probabilistic step of `c` as (probability, target) pairs, or an empty
/// list when `c` is not at a probabilistic step.
pub fn prob_distribution<F: Scalar>(
    c: &Configuration<F>,
) -> Result<Vec<(f64, Configuration<F>)>, SemanticsError> {
    Ok(match offer(c)? {
        Offer::Distribution { transitions, .. } => transitions
            .into_iter()
            .map(|t| match t.label {
                Label::Prob { probability, .. } => (probability, t.target),
                Label::Action(_) => unreachable!("distributions carry probability labels"),
            })
            .collect(),
        Offer::Choices(_) => Vec::new(),
    })
}

pub fn offer<F: Scalar>(c: &Configuration<F>) -> Result<Offer<F>, SemanticsError> {
    match c {
        Configuration::Leaf(l) => leaf_offer(l),
        Configuration::Par(cs) => race(cs),
        Configuration::Committed(cs, j) => execute(cs, *j),
    }
}

/// Every component has terminated successfully.
pub fn is_terminated<F: Scalar>(c: &Configuration<F>) -> Result<bool, SemanticsError> {
    for (i, l) in c.leaves()?.into_iter().enumerate() {
        if !is_done(&l.process, &l.state).map_err(SemanticsError::eval(i))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn split_prob<F: Scalar>(
    moves: &[LocalMove<F>],
    leaf: usize,
) -> Result<Option<&LocalMove<F>>, SemanticsError> {
    let prob: Vec<_> = moves.iter().filter(|m| m.is_prob()).collect();
    match prob.len() {
        0 => Ok(None),
        1 if moves.len() == 1 => Ok(Some(prob[0])),
        _ => Err(SemanticsError::IllFormed {
            leaf,
            reason: "probabilistic step offered alongside other steps".into(),
        }),
    }
}

fn leaf_offer<F: Scalar>(l: &Leaf<F>) -> Result<Offer<F>, SemanticsError> {
    let moves = local_moves(&l.process, &l.state, 0)?;
    if let Some(mv) = split_prob(&moves, 0)? {
        let ev = evaluate_choice(mv, &l.state, 0)?;
        let conts = mv.branch_continuations(&ev.branches);
        let transitions = conts
            .into_iter()
            .zip(ev.branches.iter().zip(&ev.weights))
            .map(|(p, (&branch, &w))| Transition {
                label: Label::Prob {
                    probability: w.as_f64(),
                    branch,
                },
                rule: mv.rule(),
                derivation: mv.derivation.clone(),
                winner: None,
                partner: None,
                channel: None,
                target: Configuration::leaf(p, l.state.clone()),
            })
            .collect();
        return Ok(Offer::Distribution {
            leaf: 0,
            weights: ev.weights,
            transitions,
        });
    }
    let mut out = Vec::with_capacity(moves.len());
    for mv in &moves {
        let action = mv.action().expect("non-probabilistic move");
        // A lone receiver gets the empty state, so R2 leaves σ unchanged.
        let state = mv.apply_local(&l.state).map_err(SemanticsError::eval(0))?;
        out.push(Transition {
            label: Label::Action(action.label()),
            rule: mv.rule(),
            derivation: mv.derivation.clone(),
            winner: None,
            partner: None,
            channel: action.channel().cloned(),
            target: Configuration::leaf(mv.continuation(), state),
        });
    }
    Ok(Offer::Choices(out))
}

fn leaves_of<F: Scalar>(cs: &[Configuration<F>]) -> Result<Vec<&Leaf<F>>, SemanticsError> {
    cs.iter()
        .map(|c| match c {
            Configuration::Leaf(l) => Ok(l),
            _ => Err(SemanticsError::NestedParallel),
        })
        .collect()
}

fn all_moves<F: Scalar>(leaves: &[&Leaf<F>]) -> Result<Vec<Vec<LocalMove<F>>>, SemanticsError> {
    leaves
        .iter()
        .enumerate()
        .map(|(i, l)| local_moves(&l.process, &l.state, i))
        .collect()
}

/// R7 to R10: one μ transition per component able to act next.
fn race<F: Scalar>(cs: &[Configuration<F>]) -> Result<Offer<F>, SemanticsError> {
    let leaves = leaves_of(cs)?;
    let moves = all_moves(&leaves)?;
    let mut senders: HashMap<&Name, Vec<usize>> = HashMap::new();
    let mut receivers: HashMap<&Name, Vec<usize>> = HashMap::new();
    for (i, ms) in moves.iter().enumerate() {
        for m in ms {
            if let Some(c) = m.sends_on() {
                senders.entry(c).or_default().push(i);
            }
            if let Some(c) = m.receives_on() {
                receivers.entry(c).or_default().push(i);
            }
        }
    }
    let has_other = |map: &HashMap<&Name, Vec<usize>>, c: &Name, j: usize| {
        map.get(c).is_some_and(|ks| ks.iter().any(|&k| k != j))
    };
    let mut out = Vec::new();
    for (j, ms) in moves.iter().enumerate() {
        let found = ms
            .iter()
            .find(|m| m.is_internal())
            .map(|m| (Rule::R7, m))
            .or_else(|| ms.iter().find(|m| m.is_prob()).map(|m| (Rule::R8, m)))
            .or_else(|| {
                ms.iter()
                    .find(|m| m.receives_on().is_some_and(|c| has_other(&senders, c, j)))
                    .map(|m| (Rule::R9, m))
            })
            .or_else(|| {
                ms.iter()
                    .find(|m| m.sends_on().is_some_and(|c| has_other(&receivers, c, j)))
                    .map(|m| (Rule::R10, m))
            });
        if let Some((rule, m)) = found {
            let mut derivation = m.derivation.clone();
            derivation.push(rule);
            out.push(Transition {
                label: Label::Action(ActionLabel::Internal),
                rule,
                derivation,
                winner: Some(j),
                partner: None,
                channel: None,
                target: Configuration::Committed(cs.to_vec(), j),
            });
        }
    }
    Ok(Offer::Choices(out))
}

fn replaced<F: Scalar>(
    cs: &[Configuration<F>],
    changes: impl IntoIterator<Item = (usize, Configuration<F>)>,
) -> Configuration<F> {
    let mut next = cs.to_vec();
    for (i, c) in changes {
        next[i] = c;
    }
    Configuration::Par(next)
}

fn payload<F: Scalar>(action: &Action<F>, sender: &State<F>) -> State<F> {
    match action {
        Action::Send {
            vars: Some(vars), ..
        } => sender.restrict(vars),
        _ => sender.clone(),
    }
}

/// R11 to R14: the winner's step (and its partner's, for a communication).
fn execute<F: Scalar>(cs: &[Configuration<F>], j: usize) -> Result<Offer<F>, SemanticsError> {
    if j >= cs.len() {
        return Err(SemanticsError::BadWinner {
            winner: j,
            len: cs.len(),
        });
    }
    let leaves = leaves_of(cs)?;
    let wl = leaves[j];
    let moves = local_moves(&wl.process, &wl.state, j)?;
    if let Some(mv) = split_prob(&moves, j)? {
        let ev = evaluate_choice(mv, &wl.state, j)?;
        let conts = mv.branch_continuations(&ev.branches);
        let transitions = conts
            .into_iter()
            .zip(ev.branches.iter().zip(&ev.weights))
            .map(|(p, (&branch, &w))| {
                let mut derivation = mv.derivation.clone();
                derivation.push(Rule::R11);
                Transition {
                    label: Label::Prob {
                        probability: w.as_f64(),
                        branch,
                    },
                    rule: Rule::R11,
                    derivation,
                    winner: Some(j),
                    partner: None,
                    channel: None,
                    target: replaced(cs, [(j, Configuration::leaf(p, wl.state.clone()))]),
                }
            })
            .collect();
        return Ok(Offer::Distribution {
            leaf: j,
            weights: ev.weights,
            transitions,
        });
    }
    let mut others: Option<Vec<Vec<LocalMove<F>>>> = None;
    let mut out = Vec::new();
    for mv in &moves {
        let action = mv.action().expect("non-probabilistic move");
        if mv.is_internal() {
            let state = mv.apply_local(&wl.state).map_err(SemanticsError::eval(j))?;
            let mut derivation = mv.derivation.clone();
            derivation.push(Rule::R12);
            out.push(Transition {
                label: Label::Action(action.label()),
                rule: Rule::R12,
                derivation,
                winner: Some(j),
                partner: None,
                channel: None,
                target: replaced(cs, [(j, Configuration::leaf(mv.continuation(), state))]),
            });
            continue;
        }
        if others.is_none() {
            others = Some(all_moves(&leaves)?);
        }
        let all = others.as_ref().expect("computed above");
        let channel = action.channel().expect("communication").clone();
        let sending = mv.sends_on().is_some();
        for (k, kms) in all.iter().enumerate() {
            if k == j {
                continue;
            }
            for km in kms {
                let matches = if sending {
                    km.receives_on() == Some(&channel)
                } else {
                    km.sends_on() == Some(&channel)
                };
                if !matches {
                    continue;
                }
                let (rule, s, r, smv, rmv) = if sending {
                    (Rule::R13, j, k, mv, km)
                } else {
                    (Rule::R14, k, j, km, mv)
                };
                let sent = payload(smv.action().expect("send"), &leaves[s].state);
                let received = leaves[r].state.overlay(&sent);
                let mut derivation = mv.derivation.clone();
                derivation.push(rule);
                out.push(Transition {
                    label: Label::Action(ActionLabel::Internal),
                    rule,
                    derivation,
                    winner: Some(j),
                    partner: Some(k),
                    channel: Some(channel.clone()),
                    target: replaced(
                        cs,
                        [
                            (s, Configuration::leaf(smv.continuation(), leaves[s].state.clone())),
                            (r, Configuration::leaf(rmv.continuation(), received)),
                        ],
                    ),
                });
            }
        }
    }
    Ok(Offer::Choices(out))
}
