//! Building a configuration for a variant and reading results back out of
//! configurations it reaches.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::algebra::{well_formed, Action, Process, State, Term, Violation};
use crate::scalar::Scalar;
use crate::semantics::Configuration;
use crate::tsp::TspInstance;

use super::coarse;
use super::fine;
use super::ops::{read_trails, Ctx};
use super::params::{AcoParams, ParamError, Variant};
use super::vars::Vars;

/// What a component of a built configuration stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeafRole {
    Ant(usize),
    Graph,
    Copy(usize),
    /// `B`, gathering the copies' solutions.
    Collector,
    /// `G*`, sharing trails between copies.
    Coordinator,
}

impl LeafRole {
    pub fn label(self) -> String {
        match self {
            LeafRole::Ant(k) => format!("ant[{k}]"),
            LeafRole::Graph => "graph".into(),
            LeafRole::Copy(s) => format!("copy[{s}]"),
            LeafRole::Collector => "collector".into(),
            LeafRole::Coordinator => "coordinator".into(),
        }
    }
}

pub(crate) struct Parts<F: Scalar> {
    pub leaves: Vec<(Process<F>, State<F>)>,
    pub roles: Vec<LeafRole>,
}

/// A configuration for one variant together with what is needed to
/// interpret its states.
#[derive(Clone, Debug)]
pub struct BuiltSystem<F: Scalar> {
    pub variant: Variant,
    pub params: AcoParams<F>,
    /// Parameters of each copy; empty for fine variants.
    pub copies: Vec<AcoParams<F>>,
    pub instance: Arc<TspInstance<F>>,
    pub config: Configuration<F>,
    pub roles: Vec<LeafRole>,
    /// Variable names of the graph (fine) or of each copy (coarse).
    pub vars: Vec<Arc<Vars>>,
}

/// Best tour recorded in some state.
#[derive(Clone, Debug, PartialEq)]
pub struct BestTour<F> {
    pub length: F,
    pub path: Vec<usize>,
}

pub fn build_system<F: Scalar>(instance: Arc<TspInstance<F>>, params: AcoParams<F>) -> Result<BuiltSystem<F>, ParamError> {
    let copies = if params.variant.is_fine() {
        Vec::new()
    } else {
        vec![params.clone(); params.p]
    };
    build_system_with_copies(instance, params, copies)
}

/// Like [`build_system`] with individual parameters for each copy of a
/// coarse variant; `copies` is ignored by fine variants. Copies must agree
/// with `params` on the variant, the ant count and, when sharing trails,
/// on the iteration cap and sharing period.
pub fn build_system_with_copies<F: Scalar>(
    instance: Arc<TspInstance<F>>,
    params: AcoParams<F>,
    copies: Vec<AcoParams<F>>,
) -> Result<BuiltSystem<F>, ParamError> {
    let n = instance.n();
    params.validate(n)?;
    if !params.variant.is_fine() {
        if copies.is_empty() {
            return Err(ParamError::Invalid("a coarse variant needs at least one copy".into()));
        }
        for (i, c) in copies.iter().enumerate() {
            c.validate(n)?;
            let shares = params.variant == Variant::CoarseOccasional;
            if c.variant != params.variant
                || c.m != params.m
                || c.effective_algorithm() != params.effective_algorithm()
                || (shares && (c.max_it != params.max_it || c.u != params.u))
            {
                return Err(ParamError::Invalid(format!(
                    "copy {} disagrees with the shared parameters",
                    i + 1
                )));
            }
        }
    }
    let variant = params.variant;
    let algorithm = params.effective_algorithm();
    let ctx = Arc::new(Ctx {
        inst: instance.clone(),
        params: params.clone(),
        vars: Vars::new(n, params.m, ""),
    });
    let (parts, vars) = if variant.is_fine() {
        (fine::build(&ctx, algorithm, variant.is_free()), vec![ctx.vars.clone()])
    } else if variant == Variant::CoarseOccasional {
        coarse::build_occasional(&ctx, &copies, algorithm)
    } else {
        coarse::build_independent(&ctx, &copies, algorithm)
    };
    let mut params = params;
    if !variant.is_fine() {
        params.p = copies.len();
    }
    Ok(BuiltSystem {
        variant,
        params,
        copies,
        instance,
        config: Configuration::par(parts.leaves),
        roles: parts.roles,
        vars,
    })
}

impl<F: Scalar> BuiltSystem<F> {
    fn leaf_of(&self, role: LeafRole) -> Option<usize> {
        self.roles.iter().position(|&r| r == role)
    }

    /// Components as `(process, state)`; empty for committed configurations.
    fn leaves_of<'a>(&self, config: &'a Configuration<F>) -> Vec<(&'a Process<F>, &'a State<F>)> {
        config
            .leaves()
            .map(|ls| ls.into_iter().map(|l| (&l.process, &l.state)).collect())
            .unwrap_or_default()
    }

    /// Components whose state holds the trails: the graph, or every copy.
    pub fn trail_leaves(&self) -> Vec<usize> {
        if self.variant.is_fine() {
            self.leaf_of(LeafRole::Graph).into_iter().collect()
        } else {
            (1..=self.params.p)
                .filter_map(|s| self.leaf_of(LeafRole::Copy(s)))
                .collect()
        }
    }

    /// Trail matrices (row-major, zero diagonal) held in `config`, one per
    /// entry of [`BuiltSystem::vars`].
    pub fn trails(&self, config: &Configuration<F>) -> Option<Vec<Vec<F>>> {
        self.trail_leaves()
            .into_iter()
            .zip(&self.vars)
            .map(|(leaf, v)| read_trails(config.state_of(leaf)?, v).ok())
            .collect()
    }

    /// Completed iterations in the first trail-holding component.
    pub fn iterations(&self, config: &Configuration<F>) -> Option<usize> {
        let leaf = *self.trail_leaves().first()?;
        config.state_of(leaf)?.index("numIt").ok()
    }

    /// Shortest tour recorded by any trail-holding component.
    pub fn best(&self, config: &Configuration<F>) -> Option<BestTour<F>> {
        let mut best: Option<BestTour<F>> = None;
        for (leaf, v) in self.trail_leaves().into_iter().zip(&self.vars) {
            let Some(s) = config.state_of(leaf) else { continue };
            let (Ok(length), Ok(path)) = (s.scalar(&v.best_l), s.index_list(&v.best_path)) else {
                continue;
            };
            if best.as_ref().is_none_or(|b| length < b.length) {
                best = Some(BestTour { length, path });
            }
        }
        best
    }

    /// `result` of the collector, once it has one.
    pub fn collected(&self, config: &Configuration<F>) -> Option<BestTour<F>> {
        let s = config.state_of(self.leaf_of(LeafRole::Collector)?)?;
        let r = s.list("result").ok()?;
        let (&length, path) = r.split_first()?;
        Some(BestTour {
            length,
            path: path.iter().filter_map(|&x| crate::scalar::as_index(x)).collect(),
        })
    }

    /// Well-formedness violations of every component.
    pub fn violations(&self) -> Vec<(usize, Violation)> {
        self.leaves_of(&self.config)
            .into_iter()
            .enumerate()
            .flat_map(|(i, (p, _))| well_formed(p).into_iter().map(move |v| (i, v)))
            .collect()
    }

    /// Names of transformations, conditions, weights and channels used by
    /// the processes, sorted.
    pub fn registry(&self) -> Registry {
        let mut r = Registry::default();
        let mut seen = std::collections::HashSet::new();
        let mut stack: Vec<Process<F>> = self
            .leaves_of(&self.config)
            .into_iter()
            .map(|(p, _)| p.clone())
            .collect();
        while let Some(p) = stack.pop() {
            if !seen.insert(p.addr()) {
                continue;
            }
            match p.term() {
                Term::Prefix(a, _) => match a {
                    Action::Transform(t) => {
                        r.transformations.insert(t.name().to_string());
                    }
                    Action::Send { channel, .. } | Action::Receive { channel, .. } => {
                        r.channels.insert(channel.to_string());
                    }
                    Action::Internal => {}
                },
                Term::Guard(c, _) => {
                    r.conditions.insert(c.name().trim_start_matches('!').to_string());
                }
                Term::Prob(w, _) => {
                    r.weights.insert(w.name().to_string());
                }
                _ => {}
            }
            stack.extend(p.children().iter().cloned());
        }
        r
    }

    pub fn metadata_json(&self) -> Value {
        let r = self.registry();
        json!({
            "variant": self.variant.as_str(),
            "n": self.instance.n(),
            "components": self.roles.iter().map(|r| r.label()).collect::<Vec<_>>(),
            "params": self.params.to_json(),
            "transformations": r.transformations.len(),
            "conditions": r.conditions,
            "channels": r.channels,
            "weights": r.weights,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Registry {
    pub transformations: BTreeSet<String>,
    pub conditions: BTreeSet<String>,
    pub weights: BTreeSet<String>,
    pub channels: BTreeSet<String>,
}
