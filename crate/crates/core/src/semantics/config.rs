use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};

use serde_json::{json, Value};

use super::error::SemanticsError;
use crate::algebra::{Process, State};
use crate::scalar::Scalar;

/// `⟪G, σ⟫`
#[derive(Clone, Debug)]
pub struct Leaf<F: Scalar> {
    pub process: Process<F>,
    pub state: State<F>,
}

impl<F: Scalar> Leaf<F> {
    pub fn new(process: Process<F>, state: State<F>) -> Self {
        Leaf { process, state }
    }
}

impl<F: Scalar> PartialEq for Leaf<F> {
    fn eq(&self, other: &Self) -> bool {
        self.process == other.process && self.state == other.state
    }
}

impl<F: Scalar> Eq for Leaf<F> {}

impl<F: Scalar> Hash for Leaf<F> {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.process.hash(h);
        self.state.hash(h);
    }
}

/// A process-state pair, a parallel composition, or a parallel composition
/// in which component `j` has won the race.
#[derive(Clone, Debug)]
pub enum Configuration<F: Scalar> {
    Leaf(Leaf<F>),
    Par(Vec<Configuration<F>>),
    Committed(Vec<Configuration<F>>, usize),
}

impl<F: Scalar> PartialEq for Configuration<F> {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Configuration::Leaf(a), Configuration::Leaf(b)) => a == b,
            (Configuration::Par(a), Configuration::Par(b)) => a == b,
            (Configuration::Committed(a, i), Configuration::Committed(b, j)) => i == j && a == b,
            _ => false,
        }
    }
}

impl<F: Scalar> Eq for Configuration<F> {}

impl<F: Scalar> Hash for Configuration<F> {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match self {
            Configuration::Leaf(l) => {
                0u8.hash(h);
                l.hash(h);
            }
            Configuration::Par(cs) => {
                1u8.hash(h);
                cs.hash(h);
            }
            Configuration::Committed(cs, j) => {
                2u8.hash(h);
                j.hash(h);
                cs.hash(h);
            }
        }
    }
}

impl<F: Scalar> Configuration<F> {
    pub fn leaf(process: Process<F>, state: State<F>) -> Self {
        Configuration::Leaf(Leaf::new(process, state))
    }

    pub fn par(leaves: impl IntoIterator<Item = (Process<F>, State<F>)>) -> Self {
        Configuration::Par(
            leaves
                .into_iter()
                .map(|(p, s)| Configuration::leaf(p, s))
                .collect(),
        )
    }

    /// Components as leaves; a lone leaf is its own single component.
    pub fn leaves(&self) -> Result<Vec<&Leaf<F>>, SemanticsError> {
        match self {
            Configuration::Leaf(l) => Ok(vec![l]),
            Configuration::Par(cs) | Configuration::Committed(cs, _) => cs
                .iter()
                .map(|c| match c {
                    Configuration::Leaf(l) => Ok(l),
                    _ => Err(SemanticsError::NestedParallel),
                })
                .collect(),
        }
    }

    /// States of the components in order.
    pub fn states(&self) -> Vec<State<F>> {
        self.leaves()
            .map(|ls| ls.iter().map(|l| l.state.clone()).collect())
            .unwrap_or_default()
    }

    pub fn state_of(&self, index: usize) -> Option<&State<F>> {
        match self {
            Configuration::Leaf(l) if index == 0 => Some(&l.state),
            Configuration::Leaf(_) => None,
            Configuration::Par(cs) | Configuration::Committed(cs, _) => match cs.get(index)? {
                Configuration::Leaf(l) => Some(&l.state),
                _ => None,
            },
        }
    }

    pub fn state_of_mut(&mut self, index: usize) -> Option<&mut State<F>> {
        match self {
            Configuration::Leaf(l) if index == 0 => Some(&mut l.state),
            Configuration::Leaf(_) => None,
            Configuration::Par(cs) | Configuration::Committed(cs, _) => match cs.get_mut(index)? {
                Configuration::Leaf(l) => Some(&mut l.state),
                _ => None,
            },
        }
    }

    pub fn component_count(&self) -> usize {
        match self {
            Configuration::Leaf(_) => 1,
            Configuration::Par(cs) | Configuration::Committed(cs, _) => cs.len(),
        }
    }

    pub fn is_committed(&self) -> bool {
        matches!(self, Configuration::Committed(..))
    }

    /// Hash used as node identity in exported graphs.
    pub fn canonical_hash(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.hash(&mut h);
        h.finish()
    }

    /// Alpha-normalizes every process.
    pub fn normalized(&self) -> Self {
        match self {
            Configuration::Leaf(l) => {
                Configuration::leaf(l.process.alpha_normalize(), l.state.clone())
            }
            Configuration::Par(cs) => Configuration::Par(cs.iter().map(|c| c.normalized()).collect()),
            Configuration::Committed(cs, j) => {
                Configuration::Committed(cs.iter().map(|c| c.normalized()).collect(), *j)
            }
        }
    }

    pub fn states_json(&self) -> Value {
        Value::Array(self.states().iter().map(|s| s.to_json()).collect())
    }

    pub fn to_json(&self) -> Value {
        match self {
            Configuration::Leaf(l) => json!({
                "process": l.process.to_string(),
                "state": l.state.to_json(),
            }),
            Configuration::Par(cs) => json!({
                "par": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
            Configuration::Committed(cs, j) => json!({
                "committed": j,
                "par": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
            }),
        }
    }
}

impl<F: Scalar> fmt::Display for Configuration<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Configuration::Leaf(l) => write!(f, "⟪{}, {}⟫", l.process, l.state),
            Configuration::Par(cs) | Configuration::Committed(cs, _) => {
                if let Configuration::Committed(_, j) = self {
                    write!(f, "∥^{j} ")?;
                }
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ∥ ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}
