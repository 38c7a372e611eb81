use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde_json::{Map, Value};

use super::data::DataValue;
use super::error::EvalError;
use crate::scalar::{as_index, Scalar};

/// Variable name. Shared so states clone cheaply.
pub type Name = Arc<str>;

/// A set of variable names, used to restrict transmitted states.
pub type VarSet = BTreeSet<Name>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Finite partial map from variable names to data values.
///
/// Cloning is a reference-count bump; writes copy the map on demand.
#[derive(Clone, Default)]
pub struct State<F> {
    bindings: Arc<BTreeMap<Name, DataValue<F>>>,
}

impl<F: Scalar> State<F> {
    pub fn new() -> Self {
        State {
            bindings: Arc::new(BTreeMap::new()),
        }
    }

    pub fn from_bindings<I, K, V>(bindings: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<DataValue<F>>,
    {
        State {
            bindings: Arc::new(
                bindings
                    .into_iter()
                    .map(|(k, v)| (name(k.as_ref()), v.into()))
                    .collect(),
            ),
        }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// `None` is the distinguished "undefined" outcome.
    pub fn get(&self, var: &str) -> Option<&DataValue<F>> {
        self.bindings.get(var)
    }

    pub fn contains(&self, var: &str) -> bool {
        self.bindings.contains_key(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &DataValue<F>)> {
        self.bindings.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.bindings.keys()
    }

    fn require(&self, var: &str) -> Result<&DataValue<F>, EvalError> {
        self.get(var).ok_or_else(|| EvalError::Undefined {
            var: var.to_string(),
        })
    }

    pub fn scalar(&self, var: &str) -> Result<F, EvalError> {
        match self.require(var)? {
            DataValue::Scalar(x) => Ok(*x),
            other => Err(wrong_kind(var, "scalar", other)),
        }
    }

    pub fn list(&self, var: &str) -> Result<&[F], EvalError> {
        match self.require(var)? {
            DataValue::List(xs) => Ok(xs.as_slice()),
            other => Err(wrong_kind(var, "list", other)),
        }
    }

    pub fn lists(&self, var: &str) -> Result<&[Vec<F>], EvalError> {
        match self.require(var)? {
            DataValue::Lists(xss) => Ok(xss.as_slice()),
            other => Err(wrong_kind(var, "list of lists", other)),
        }
    }

    /// Reads a scalar that must be an integral index.
    pub fn index(&self, var: &str) -> Result<usize, EvalError> {
        let x = self.scalar(var)?;
        as_index(x).ok_or(EvalError::NonIntegralIndex {
            var: var.to_string(),
            value: x.as_f64(),
        })
    }

    /// Reads a list whose entries must all be integral indices.
    pub fn index_list(&self, var: &str) -> Result<Vec<usize>, EvalError> {
        self.list(var)?
            .iter()
            .map(|&x| {
                as_index(x).ok_or(EvalError::NonIntegralIndex {
                    var: var.to_string(),
                    value: x.as_f64(),
                })
            })
            .collect()
    }

    /// In-place single transformation `σ[y ↦ d]`.
    pub fn set(&mut self, var: impl AsRef<str>, value: impl Into<DataValue<F>>) {
        let var = var.as_ref();
        let value = value.into();
        let map = Arc::make_mut(&mut self.bindings);
        match map.get_mut(var) {
            Some(slot) => *slot = value,
            None => {
                map.insert(name(var), value);
            }
        }
    }

    /// Like [`State::set`] but reuses an existing shared name.
    pub fn set_named(&mut self, var: &Name, value: impl Into<DataValue<F>>) {
        let value = value.into();
        let map = Arc::make_mut(&mut self.bindings);
        match map.get_mut(var) {
            Some(slot) => *slot = value,
            None => {
                map.insert(var.clone(), value);
            }
        }
    }

    pub fn remove(&mut self, var: &str) {
        if self.contains(var) {
            Arc::make_mut(&mut self.bindings).remove(var);
        }
    }

    /// The single transformation `σ[y ↦ d]` as a new state.
    pub fn apply_single(&self, var: &str, value: impl Into<DataValue<F>>) -> Self {
        let mut out = self.clone();
        out.set(var, value);
        out
    }

    /// `σ_V`: keeps exactly the bindings of `vars` that this state defines.
    pub fn restrict(&self, vars: &VarSet) -> Self {
        let map: BTreeMap<Name, DataValue<F>> = if vars.len() < self.bindings.len() {
            vars.iter()
                .filter_map(|v| self.bindings.get(v).map(|d| (v.clone(), d.clone())))
                .collect()
        } else {
            self.bindings
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect()
        };
        State {
            bindings: Arc::new(map),
        }
    }

    /// `σ[σ']`: bindings of `received` win, the rest come from `self`.
    pub fn overlay(&self, received: &State<F>) -> Self {
        if received.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return received.clone();
        }
        let mut out = self.clone();
        let map = Arc::make_mut(&mut out.bindings);
        for (k, v) in received.bindings.iter() {
            match map.get_mut(k) {
                Some(slot) => *slot = v.clone(),
                None => {
                    map.insert(k.clone(), v.clone());
                }
            }
        }
        out
    }

    /// Bindings that differ from `before`; `None` marks a removed variable.
    pub fn delta_from(&self, before: &State<F>) -> Vec<(Name, Option<DataValue<F>>)> {
        if Arc::ptr_eq(&self.bindings, &before.bindings) {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (k, v) in self.bindings.iter() {
            if before.get(k) != Some(v) {
                out.push((k.clone(), Some(v.clone())));
            }
        }
        for k in before.bindings.keys() {
            if !self.contains(k) {
                out.push((k.clone(), None));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn is_valid(&self) -> bool {
        self.bindings.values().all(DataValue::is_valid)
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in self.bindings.iter() {
            map.insert(k.to_string(), v.to_json());
        }
        Value::Object(map)
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.bindings, &other.bindings)
    }
}

fn wrong_kind<F: Scalar>(var: &str, expected: &'static str, found: &DataValue<F>) -> EvalError {
    EvalError::WrongKind {
        var: var.to_string(),
        expected,
        found: found.kind(),
    }
}

impl<F: Scalar> PartialEq for State<F> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.bindings, &other.bindings) || self.bindings == other.bindings
    }
}

impl<F: Scalar> Eq for State<F> {}

impl<F: Scalar> Hash for State<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bindings.len().hash(state);
        for (k, v) in self.bindings.iter() {
            k.hash(state);
            v.hash(state);
        }
    }
}

/// Canonical rendering: `{a=1, b=[1, 2]}`, ordered by variable name.
impl<F: Scalar> fmt::Display for State<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

impl<F: Scalar> fmt::Debug for State<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn var_set<'a>(names: impl IntoIterator<Item = &'a str>) -> VarSet {
    names.into_iter().map(name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(pairs: &[(&str, f64)]) -> State<f64> {
        State::from_bindings(pairs.iter().map(|&(k, v)| (k, v)))
    }

    #[test]
    fn restrict_examples() {
        let s = st(&[("a", 1.0), ("b", 2.0)]);
        assert_eq!(s.restrict(&var_set(["a"])), st(&[("a", 1.0)]));
        assert_eq!(st(&[("a", 1.0)]).restrict(&VarSet::new()), State::new());
        // hand-enumerated: only b survives, z is not bound
        let s = st(&[("a", 1.0), ("b", 2.0), ("c", 3.0)]);
        let r = s.restrict(&var_set(["b", "z"]));
        assert_eq!(r.len(), 1);
        assert_eq!(r.scalar("b"), Ok(2.0));
        assert!(r.get("z").is_none());
        assert!(r.get("a").is_none());
    }

    #[test]
    fn single_transformation_examples() {
        let s = st(&[("a", 1.0)]);
        assert_eq!(s.apply_single("a", 5.0), st(&[("a", 5.0)]));
        assert_eq!(s.apply_single("b", 2.0), st(&[("a", 1.0), ("b", 2.0)]));
        assert_eq!(
            s.apply_single("a", 2.0).apply_single("a", 3.0),
            st(&[("a", 3.0)])
        );
    }

    #[test]
    fn overlay_examples() {
        let s = st(&[("a", 1.0), ("b", 2.0)]);
        assert_eq!(s.overlay(&State::new()), s);
        assert_eq!(
            s.overlay(&st(&[("b", 9.0), ("c", 3.0)])),
            st(&[("a", 1.0), ("b", 9.0), ("c", 3.0)])
        );
    }

    #[test]
    fn undefined_reads_are_errors() {
        let s = st(&[("a", 1.0)]);
        assert!(matches!(s.scalar("x"), Err(EvalError::Undefined { .. })));
        assert!(matches!(s.list("a"), Err(EvalError::WrongKind { .. })));
    }

    #[test]
    fn canonical_rendering_is_sorted() {
        let mut s = State::<f64>::new();
        s.set("zeta", 1.0);
        s.set("alpha", vec![1.0, 2.0]);
        assert_eq!(s.to_string(), "{alpha=[1, 2], zeta=1}");
    }

    #[test]
    fn delta_reports_changes_and_removals() {
        let a = st(&[("x", 1.0), ("y", 2.0)]);
        let mut b = a.apply_single("x", 4.0);
        b.remove("y");
        let d = b.delta_from(&a);
        assert_eq!(d.len(), 2);
        assert_eq!(&*d[0].0, "x");
        assert_eq!(d[1].1, None);
    }
}
