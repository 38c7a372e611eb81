use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::error::EvalError;
use super::state::{name, Name, State, VarSet};
use crate::scalar::Scalar;

type EffectFn<F> = dyn Fn(&State<F>) -> Result<State<F>, EvalError> + Send + Sync;
type PredicateFn<F> = dyn Fn(&State<F>) -> Result<bool, EvalError> + Send + Sync;
type WeightsFn<F> = dyn Fn(&State<F>) -> Result<Vec<F>, EvalError> + Send + Sync;

/// A named function over states.
///
/// Identity (equality, hashing, rendering) is the name plus a descriptor of
/// the effect, so two registries can be diffed without running anything.
#[derive(Clone)]
pub struct Transformation<F> {
    name: Name,
    descriptor: Name,
    effect: Arc<EffectFn<F>>,
}

impl<F: Scalar> Transformation<F> {
    pub fn new(
        name: &str,
        effect: impl Fn(&State<F>) -> Result<State<F>, EvalError> + Send + Sync + 'static,
    ) -> Self {
        Self::described(name, name, effect)
    }

    pub fn described(
        name_: &str,
        descriptor: &str,
        effect: impl Fn(&State<F>) -> Result<State<F>, EvalError> + Send + Sync + 'static,
    ) -> Self {
        Transformation {
            name: name(name_),
            descriptor: name(descriptor),
            effect: Arc::new(effect),
        }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn apply(&self, state: &State<F>) -> Result<State<F>, EvalError> {
        (self.effect)(state)
    }

    /// Runs `self` then `next` as one transformation.
    pub fn then(&self, next: &Transformation<F>) -> Self {
        let (a, b) = (self.clone(), next.clone());
        Transformation {
            name: name(&format!("{};{}", self.name, next.name)),
            descriptor: name(&format!("{};{}", self.descriptor, next.descriptor)),
            effect: Arc::new(move |s| b.apply(&a.apply(s)?)),
        }
    }
}

impl<F> PartialEq for Transformation<F> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.descriptor == other.descriptor
    }
}

impl<F> Eq for Transformation<F> {}

impl<F> Hash for Transformation<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.descriptor.hash(state);
    }
}

impl<F> fmt::Debug for Transformation<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transformation({})", self.name)
    }
}

/// A named predicate over states.
#[derive(Clone)]
pub struct Condition<F> {
    name: Name,
    predicate: Arc<PredicateFn<F>>,
}

impl<F: Scalar> Condition<F> {
    pub fn new(
        name_: &str,
        predicate: impl Fn(&State<F>) -> Result<bool, EvalError> + Send + Sync + 'static,
    ) -> Self {
        Condition {
            name: name(name_),
            predicate: Arc::new(predicate),
        }
    }

    pub fn constant(value: bool) -> Self {
        Condition::new(if value { "true" } else { "false" }, move |_| Ok(value))
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn holds(&self, state: &State<F>) -> Result<bool, EvalError> {
        (self.predicate)(state)
    }

    /// `¬cond`, named `!name`.
    pub fn negate(&self) -> Self {
        let inner = self.predicate.clone();
        let negated = match self.name.strip_prefix('!') {
            Some(rest) => rest.to_string(),
            None => format!("!{}", self.name),
        };
        Condition {
            name: name(&negated),
            predicate: Arc::new(move |s| inner(s).map(|b| !b)),
        }
    }
}

impl<F> PartialEq for Condition<F> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl<F> Eq for Condition<F> {}

impl<F> Hash for Condition<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
    }
}

impl<F> fmt::Debug for Condition<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Condition({})", self.name)
    }
}

/// Weight expressions of a probabilistic choice, evaluated together against
/// the choosing state. Entry `i` is the weight of branch `i`.
#[derive(Clone)]
pub struct Weights<F> {
    name: Name,
    arity: usize,
    eval: Arc<WeightsFn<F>>,
}

impl<F: Scalar> Weights<F> {
    pub fn new(
        name_: &str,
        arity: usize,
        eval: impl Fn(&State<F>) -> Result<Vec<F>, EvalError> + Send + Sync + 'static,
    ) -> Self {
        Weights {
            name: name(name_),
            arity,
            eval: Arc::new(eval),
        }
    }

    /// State-independent weights.
    pub fn fixed(values: Vec<F>) -> Self {
        let label = values
            .iter()
            .map(|w| w.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let arity = values.len();
        Weights::new(&label, arity, move |_| Ok(values.clone()))
    }

    /// Uniform weights over `arity` branches.
    pub fn uniform(arity: usize) -> Self {
        let w = F::one() / F::of_usize(arity.max(1));
        Weights::fixed(vec![w; arity])
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn evaluate(&self, state: &State<F>) -> Result<Vec<F>, EvalError> {
        let ws = (self.eval)(state)?;
        if ws.len() != self.arity {
            return Err(EvalError::Invalid(format!(
                "weights `{}` produced {} values for {} branches",
                self.name,
                ws.len(),
                self.arity
            )));
        }
        Ok(ws)
    }
}

impl<F> PartialEq for Weights<F> {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

impl<F> Eq for Weights<F> {}

impl<F> Hash for Weights<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.arity.hash(state);
    }
}

impl<F> fmt::Debug for Weights<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weights({})", self.name)
    }
}

/// Prefix actions: μ, a transformation, a send or a receive.
#[derive(Clone, Debug)]
pub enum Action<F> {
    Internal,
    Transform(Transformation<F>),
    /// `c!`. With `vars` only the restriction of the sender's state to
    /// those variables is transmitted.
    Send {
        channel: Name,
        vars: Option<Arc<VarSet>>,
    },
    /// `c?(x)`. The binder is kept for rendering only.
    Receive {
        channel: Name,
        binder: Name,
    },
}

impl<F> PartialEq for Action<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Action::Internal, Action::Internal) => true,
            (Action::Transform(a), Action::Transform(b)) => a == b,
            (
                Action::Send { channel: a, vars: v },
                Action::Send { channel: b, vars: w },
            ) => a == b && v == w,
            (
                Action::Receive { channel: a, binder: x },
                Action::Receive { channel: b, binder: y },
            ) => a == b && x == y,
            _ => false,
        }
    }
}

impl<F> Eq for Action<F> {}

impl<F> Hash for Action<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Action::Internal => 0u8.hash(state),
            Action::Transform(t) => {
                1u8.hash(state);
                t.hash(state);
            }
            Action::Send { channel, vars } => {
                2u8.hash(state);
                channel.hash(state);
                vars.hash(state);
            }
            Action::Receive { channel, binder } => {
                3u8.hash(state);
                channel.hash(state);
                binder.hash(state);
            }
        }
    }
}

impl<F: Scalar> Action<F> {
    pub fn send(channel: &str) -> Self {
        Action::Send {
            channel: name(channel),
            vars: None,
        }
    }

    pub fn send_restricted(channel: &str, vars: Arc<VarSet>) -> Self {
        Action::Send {
            channel: name(channel),
            vars: Some(vars),
        }
    }

    pub fn receive(channel: &str) -> Self {
        Action::Receive {
            channel: name(channel),
            binder: name("x"),
        }
    }

    pub fn channel(&self) -> Option<&Name> {
        match self {
            Action::Send { channel, .. } | Action::Receive { channel, .. } => Some(channel),
            _ => None,
        }
    }

    pub fn label(&self) -> ActionLabel {
        match self {
            Action::Internal => ActionLabel::Internal,
            Action::Transform(t) => ActionLabel::Transform(t.name().clone()),
            Action::Send { channel, .. } => ActionLabel::Send(channel.clone()),
            Action::Receive { channel, .. } => ActionLabel::Receive(channel.clone()),
        }
    }
}

impl<F: Scalar> fmt::Display for Action<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Internal => f.write_str("μ"),
            Action::Transform(t) => f.write_str(t.name()),
            Action::Send { channel, vars: None } => write!(f, "{channel}!"),
            Action::Send {
                channel,
                vars: Some(vars),
            } => {
                write!(f, "{channel}!{{")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str(v)?;
                }
                f.write_str("}")
            }
            Action::Receive { channel, binder } => write!(f, "{channel}?({binder})"),
        }
    }
}

/// Scalar-free view of an action, used for transition labels and traces.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ActionLabel {
    Internal,
    Transform(Name),
    Send(Name),
    Receive(Name),
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Internal => f.write_str("μ"),
            ActionLabel::Transform(t) => f.write_str(t),
            ActionLabel::Send(c) => write!(f, "{c}!"),
            ActionLabel::Receive(c) => write!(f, "{c}?"),
        }
    }
}
