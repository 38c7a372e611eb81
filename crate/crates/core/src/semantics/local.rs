//! Transitions of a single process-state pair (rules R1 to R6, R15, R16).

use std::collections::HashMap;

use super::error::SemanticsError;
use super::rules::Rule;
use crate::algebra::{Action, EvalError, Name, Process, State, Term, Weights};
use crate::scalar::Scalar;

/// What a local move does.
#[derive(Clone, Debug)]
pub enum MoveKind<F: Scalar> {
    Act(Action<F>),
    /// An offered probabilistic choice; the branches are resolved lazily.
    Prob {
        weights: Weights<F>,
        branches: Vec<Process<F>>,
    },
}

/// One derivable local step. The continuation is kept unsubstituted until
/// the move is taken, since most offered moves never are.
#[derive(Clone, Debug)]
pub struct LocalMove<F: Scalar> {
    pub kind: MoveKind<F>,
    /// Rules used, innermost first.
    pub derivation: Vec<Rule>,
    next: Process<F>,
    /// Pending recursion unfoldings, innermost first.
    substs: Vec<(Name, Process<F>)>,
}

impl<F: Scalar> LocalMove<F> {
    pub fn action(&self) -> Option<&Action<F>> {
        match &self.kind {
            MoveKind::Act(a) => Some(a),
            MoveKind::Prob { .. } => None,
        }
    }

    pub fn is_prob(&self) -> bool {
        matches!(self.kind, MoveKind::Prob { .. })
    }

    /// Internal or transformation step (the α* of the race rules).
    pub fn is_internal(&self) -> bool {
        matches!(
            self.kind,
            MoveKind::Act(Action::Internal) | MoveKind::Act(Action::Transform(_))
        )
    }

    pub fn sends_on(&self) -> Option<&Name> {
        match &self.kind {
            MoveKind::Act(Action::Send { channel, .. }) => Some(channel),
            _ => None,
        }
    }

    pub fn receives_on(&self) -> Option<&Name> {
        match &self.kind {
            MoveKind::Act(Action::Receive { channel, .. }) => Some(channel),
            _ => None,
        }
    }

    /// Outermost rule of the derivation.
    pub fn rule(&self) -> Rule {
        *self.derivation.last().expect("derivations are never empty")
    }

    fn resolve(&self, p: &Process<F>, memos: &mut [HashMap<usize, Process<F>>]) -> Process<F> {
        let mut out = p.clone();
        for ((x, with), memo) in self.substs.iter().zip(memos.iter_mut()) {
            out = out.subst_memo(x, with, memo);
        }
        out
    }

    fn fresh_memos(&self) -> Vec<HashMap<usize, Process<F>>> {
        vec![HashMap::new(); self.substs.len()]
    }

    /// Process reached by an action move.
    pub fn continuation(&self) -> Process<F> {
        self.resolve(&self.next, &mut self.fresh_memos())
    }

    /// Processes reached by the given branches of a probabilistic move.
    pub fn branch_continuations(&self, indices: &[usize]) -> Vec<Process<F>> {
        let MoveKind::Prob { branches, .. } = &self.kind else {
            return Vec::new();
        };
        let mut memos = self.fresh_memos();
        indices
            .iter()
            .map(|&i| self.resolve(&branches[i], &mut memos))
            .collect()
    }

    /// State after an action move, for everything but receives (which need
    /// the sender's payload).
    pub fn apply_local(&self, state: &State<F>) -> Result<State<F>, EvalError> {
        match &self.kind {
            MoveKind::Act(Action::Transform(t)) => t.apply(state),
            _ => Ok(state.clone()),
        }
    }
}

/// A probabilistic move evaluated against the choosing state: surviving
/// (non-zero) branches with their weights, in syntactic order.
#[derive(Clone, Debug)]
pub struct EvaluatedChoice<F: Scalar> {
    pub branches: Vec<usize>,
    pub weights: Vec<F>,
}

/// Evaluates the weights of a probabilistic move, checks they form a
/// distribution and drops zero branches.
pub fn evaluate_choice<F: Scalar>(
    mv: &LocalMove<F>,
    state: &State<F>,
    leaf: usize,
) -> Result<EvaluatedChoice<F>, SemanticsError> {
    let MoveKind::Prob { weights, .. } = &mv.kind else {
        return Err(SemanticsError::IllFormed {
            leaf,
            reason: "not a probabilistic move".into(),
        });
    };
    let ws = weights.evaluate(state).map_err(SemanticsError::eval(leaf))?;
    let mut sum = F::zero();
    let mut out = EvaluatedChoice {
        branches: Vec::new(),
        weights: Vec::new(),
    };
    for (i, &w) in ws.iter().enumerate() {
        if !w.is_finite() || w < F::zero() || w > F::one() + F::of(F::WEIGHT_TOLERANCE) {
            return Err(SemanticsError::BadWeight {
                leaf,
                branch: i,
                weight: w.as_f64(),
            });
        }
        sum = sum + w;
        if w > F::zero() {
            out.branches.push(i);
            out.weights.push(w);
        }
    }
    if (sum.as_f64() - 1.0).abs() > F::WEIGHT_TOLERANCE {
        return Err(SemanticsError::WeightSum {
            leaf,
            sum: sum.as_f64(),
        });
    }
    Ok(out)
}

/// All local moves of `⟪p, σ⟫`, in syntactic order.
pub fn local_moves<F: Scalar>(
    p: &Process<F>,
    state: &State<F>,
    leaf: usize,
) -> Result<Vec<LocalMove<F>>, SemanticsError> {
    let mut out = Vec::new();
    let mut ctx = Ctx {
        state,
        leaf,
        rules: Vec::new(),
        substs: Vec::new(),
    };
    ctx.collect(p, &mut out)?;
    Ok(out)
}

struct Ctx<'a, F> {
    state: &'a State<F>,
    leaf: usize,
    /// Enclosing rules, outermost first.
    rules: Vec<Rule>,
    /// Enclosing recursions, outermost first.
    substs: Vec<(Name, Process<F>)>,
}

impl<F: Scalar> Ctx<'_, F> {
    fn emit(&self, kind: MoveKind<F>, rule: Rule, next: Process<F>, out: &mut Vec<LocalMove<F>>) {
        let mut derivation = Vec::with_capacity(self.rules.len() + 1);
        derivation.push(rule);
        derivation.extend(self.rules.iter().rev());
        out.push(LocalMove {
            kind,
            derivation,
            next,
            substs: self.substs.iter().rev().cloned().collect(),
        });
    }

    fn collect(&mut self, p: &Process<F>, out: &mut Vec<LocalMove<F>>) -> Result<(), SemanticsError> {
        match p.term() {
            Term::Stop | Term::Var(_) => {}
            Term::Prefix(a, g) => {
                let rule = match a {
                    Action::Internal | Action::Send { .. } => Rule::R1,
                    Action::Receive { .. } => Rule::R2,
                    Action::Transform(_) => Rule::R3,
                };
                self.emit(MoveKind::Act(a.clone()), rule, g.clone(), out);
            }
            Term::Guard(c, g) => {
                if !c.holds(self.state).map_err(SemanticsError::eval(self.leaf))? {
                    return Ok(());
                }
                if g.is_probabilistic() {
                    self.emit(MoveKind::Act(Action::Internal), Rule::R4Prime, g.clone(), out);
                } else {
                    self.rules.push(Rule::R4);
                    let r = self.collect(g, out);
                    self.rules.pop();
                    r?;
                }
            }
            Term::Sum(gs) => {
                self.rules.push(Rule::R5);
                for g in gs {
                    if g.is_probabilistic() {
                        self.rules.pop();
                        return Err(SemanticsError::IllFormed {
                            leaf: self.leaf,
                            reason: format!("probabilistic summand `{g}`"),
                        });
                    }
                    if let Err(e) = self.collect(g, out) {
                        self.rules.pop();
                        return Err(e);
                    }
                }
                self.rules.pop();
            }
            Term::Prob(w, gs) => {
                self.emit(
                    MoveKind::Prob {
                        weights: w.clone(),
                        branches: gs.clone(),
                    },
                    Rule::R6,
                    p.clone(),
                    out,
                );
            }
            Term::Rec(x, body) => {
                let rule = if body.is_probabilistic() {
                    Rule::R16
                } else {
                    Rule::R15
                };
                self.rules.push(rule);
                self.substs.push((x.clone(), p.clone()));
                let r = self.collect(body, out);
                self.substs.pop();
                self.rules.pop();
                r?;
            }
        }
        Ok(())
    }
}

/// Successful termination of a component: it is `stop`, possibly behind
/// guards that hold, inside a sum or a recursion.
pub fn is_done<F: Scalar>(p: &Process<F>, state: &State<F>) -> Result<bool, EvalError> {
    Ok(match p.term() {
        Term::Stop => true,
        Term::Guard(c, g) => c.holds(state)? && is_done(g, state)?,
        Term::Sum(gs) => {
            for g in gs {
                if is_done(g, state)? {
                    return Ok(true);
                }
            }
            false
        }
        Term::Rec(_, body) => is_done(body, state)?,
        Term::Var(_) | Term::Prefix(..) | Term::Prob(..) => false,
    })
}
