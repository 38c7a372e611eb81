use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use super::action::{Action, Condition, Weights};
use super::state::{name, Name};
use crate::scalar::Scalar;

/// Process term. Nodes are reference counted and freely shared, so a term is
/// a DAG; the structural hash and free variables are cached per node.
#[derive(Clone)]
pub struct Process<F>(Arc<Node<F>>);

struct Node<F> {
    term: Term<F>,
    hash: u64,
    free: Box<[Name]>,
}

#[derive(Clone)]
pub enum Term<F> {
    Stop,
    Var(Name),
    Prefix(Action<F>, Process<F>),
    Guard(Condition<F>, Process<F>),
    Sum(Vec<Process<F>>),
    Prob(Weights<F>, Vec<Process<F>>),
    Rec(Name, Process<F>),
}

impl<F: Scalar> Process<F> {
    fn make(term: Term<F>) -> Self {
        let mut h = DefaultHasher::new();
        let mut free: Vec<Name> = Vec::new();
        match &term {
            Term::Stop => 0u8.hash(&mut h),
            Term::Var(x) => {
                1u8.hash(&mut h);
                x.hash(&mut h);
                free.push(x.clone());
            }
            Term::Prefix(a, g) => {
                2u8.hash(&mut h);
                a.hash(&mut h);
                h.write_u64(g.0.hash);
                free.extend(g.free_vars().iter().cloned());
            }
            Term::Guard(c, g) => {
                3u8.hash(&mut h);
                c.hash(&mut h);
                h.write_u64(g.0.hash);
                free.extend(g.free_vars().iter().cloned());
            }
            Term::Sum(gs) => {
                4u8.hash(&mut h);
                gs.len().hash(&mut h);
                for g in gs {
                    h.write_u64(g.0.hash);
                    free.extend(g.free_vars().iter().cloned());
                }
            }
            Term::Prob(w, gs) => {
                5u8.hash(&mut h);
                w.hash(&mut h);
                gs.len().hash(&mut h);
                for g in gs {
                    h.write_u64(g.0.hash);
                    free.extend(g.free_vars().iter().cloned());
                }
            }
            Term::Rec(x, body) => {
                6u8.hash(&mut h);
                x.hash(&mut h);
                h.write_u64(body.0.hash);
                free.extend(body.free_vars().iter().filter(|v| *v != x).cloned());
            }
        }
        free.sort();
        free.dedup();
        Process(Arc::new(Node {
            term,
            hash: h.finish(),
            free: free.into_boxed_slice(),
        }))
    }

    pub fn stop() -> Self {
        Self::make(Term::Stop)
    }

    pub fn var(x: &str) -> Self {
        Self::make(Term::Var(name(x)))
    }

    pub fn prefix(action: Action<F>, then: Process<F>) -> Self {
        Self::make(Term::Prefix(action, then))
    }

    pub fn guard(cond: Condition<F>, then: Process<F>) -> Self {
        Self::make(Term::Guard(cond, then))
    }

    pub fn sum(choices: Vec<Process<F>>) -> Self {
        Self::make(Term::Sum(choices))
    }

    pub fn prob(weights: Weights<F>, branches: Vec<Process<F>>) -> Self {
        Self::make(Term::Prob(weights, branches))
    }

    pub fn rec(x: &str, body: Process<F>) -> Self {
        Self::make(Term::Rec(name(x), body))
    }

    /// `μ;G`
    pub fn internal(then: Process<F>) -> Self {
        Self::prefix(Action::Internal, then)
    }

    pub fn transform(t: &super::action::Transformation<F>, then: Process<F>) -> Self {
        Self::prefix(Action::Transform(t.clone()), then)
    }

    pub fn send(channel: &str, then: Process<F>) -> Self {
        Self::prefix(Action::send(channel), then)
    }

    pub fn receive(channel: &str, then: Process<F>) -> Self {
        Self::prefix(Action::receive(channel), then)
    }

    pub fn term(&self) -> &Term<F> {
        &self.0.term
    }

    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub fn free_vars(&self) -> &[Name] {
        &self.0.free
    }

    pub fn is_closed(&self) -> bool {
        self.0.free.is_empty()
    }

    pub fn ptr_eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn addr(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    pub fn is_stop(&self) -> bool {
        matches!(self.term(), Term::Stop)
    }

    /// Probabilistic processes: a choice `⊕`, or recursion over one.
    pub fn is_probabilistic(&self) -> bool {
        match self.term() {
            Term::Prob(..) => true,
            Term::Rec(_, body) => body.is_probabilistic(),
            _ => false,
        }
    }

    /// `self[with/x]`. Shared subterms stay shared, and subterms without a
    /// free `x` are returned as is.
    pub fn substitute(&self, x: &str, with: &Process<F>) -> Process<F> {
        let mut memo = HashMap::new();
        self.subst_memo(x, with, &mut memo)
    }

    pub(crate) fn subst_memo(
        &self,
        x: &str,
        with: &Process<F>,
        memo: &mut HashMap<usize, Process<F>>,
    ) -> Process<F> {
        if !self.0.free.iter().any(|v| &**v == x) {
            return self.clone();
        }
        if let Some(done) = memo.get(&self.addr()) {
            return done.clone();
        }
        let out = match self.term() {
            Term::Stop => self.clone(),
            Term::Var(_) => with.clone(),
            Term::Prefix(a, g) => Self::prefix(a.clone(), g.subst_memo(x, with, memo)),
            Term::Guard(c, g) => Self::guard(c.clone(), g.subst_memo(x, with, memo)),
            Term::Sum(gs) => Self::sum(gs.iter().map(|g| g.subst_memo(x, with, memo)).collect()),
            Term::Prob(w, gs) => Self::prob(
                w.clone(),
                gs.iter().map(|g| g.subst_memo(x, with, memo)).collect(),
            ),
            // A rebinding of `x` shadows it, and then `x` is not free here.
            Term::Rec(y, body) => Self::make(Term::Rec(y.clone(), body.subst_memo(x, with, memo))),
        };
        memo.insert(self.addr(), out.clone());
        out
    }

    /// One unfolding `body[rec X.body / X]`; `None` unless `self` is a `rec`.
    pub fn unfold(&self) -> Option<Process<F>> {
        match self.term() {
            Term::Rec(x, body) => Some(body.substitute(x, self)),
            _ => None,
        }
    }

    /// Renames every recursion binder to a name determined by its nesting
    /// depth, so alpha-equivalent terms become structurally equal.
    pub fn alpha_normalize(&self) -> Process<F> {
        let mut memo = HashMap::new();
        self.alpha(&mut Vec::new(), &mut memo)
    }

    fn alpha(
        &self,
        env: &mut Vec<(Name, Name)>,
        memo: &mut HashMap<(usize, Vec<(Name, Name)>), Process<F>>,
    ) -> Process<F> {
        let relevant: Vec<(Name, Name)> = env
            .iter()
            .filter(|(old, _)| self.0.free.contains(old))
            .cloned()
            .collect();
        let no_binders = self.0.free.is_empty() && !self.has_binder();
        if no_binders {
            return self.clone();
        }
        let key = (self.addr(), relevant);
        if let Some(done) = memo.get(&key) {
            return done.clone();
        }
        let out = match self.term() {
            Term::Stop => self.clone(),
            Term::Var(x) => match env.iter().rev().find(|(old, _)| old == x) {
                Some((_, new)) => Process::make(Term::Var(new.clone())),
                None => self.clone(),
            },
            Term::Prefix(a, g) => Self::prefix(a.clone(), g.alpha(env, memo)),
            Term::Guard(c, g) => Self::guard(c.clone(), g.alpha(env, memo)),
            Term::Sum(gs) => Self::sum(gs.iter().map(|g| g.alpha(env, memo)).collect()),
            Term::Prob(w, gs) => {
                Self::prob(w.clone(), gs.iter().map(|g| g.alpha(env, memo)).collect())
            }
            Term::Rec(x, body) => {
                let fresh = name(&format!("X{}", env.len()));
                env.push((x.clone(), fresh.clone()));
                let body = body.alpha(env, memo);
                env.pop();
                Process::make(Term::Rec(fresh, body))
            }
        };
        memo.insert(key, out.clone());
        out
    }

    fn has_binder(&self) -> bool {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if !seen.insert(p.addr()) {
                continue;
            }
            match p.term() {
                Term::Rec(..) => return true,
                Term::Stop | Term::Var(_) => {}
                Term::Prefix(_, g) | Term::Guard(_, g) => stack.push(g.clone()),
                Term::Sum(gs) | Term::Prob(_, gs) => stack.extend(gs.iter().cloned()),
            }
        }
        false
    }

    /// Children in syntactic order.
    pub fn children(&self) -> &[Process<F>] {
        match self.term() {
            Term::Stop | Term::Var(_) => &[],
            Term::Prefix(_, g) | Term::Guard(_, g) | Term::Rec(_, g) => std::slice::from_ref(g),
            Term::Sum(gs) | Term::Prob(_, gs) => gs,
        }
    }

    /// Number of distinct nodes of the DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if seen.insert(p.addr()) {
                stack.extend(p.children().iter().cloned());
            }
        }
        seen.len()
    }

    fn struct_eq(&self, other: &Self, memo: &mut HashSet<(usize, usize)>) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.0.hash != other.0.hash {
            return false;
        }
        if !memo.insert((self.addr(), other.addr())) {
            // Already being compared further up, or already found equal.
            return true;
        }
        let all = |a: &[Process<F>], b: &[Process<F>], memo: &mut HashSet<(usize, usize)>| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.struct_eq(y, memo))
        };
        match (self.term(), other.term()) {
            (Term::Stop, Term::Stop) => true,
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Prefix(a, g), Term::Prefix(b, h)) => a == b && g.struct_eq(h, memo),
            (Term::Guard(a, g), Term::Guard(b, h)) => a == b && g.struct_eq(h, memo),
            (Term::Sum(gs), Term::Sum(hs)) => all(gs, hs, memo),
            (Term::Prob(v, gs), Term::Prob(w, hs)) => v == w && all(gs, hs, memo),
            (Term::Rec(x, g), Term::Rec(y, h)) => x == y && g.struct_eq(h, memo),
            _ => false,
        }
    }
}

impl<F: Scalar> PartialEq for Process<F> {
    fn eq(&self, other: &Self) -> bool {
        self.struct_eq(other, &mut HashSet::new())
    }
}

impl<F: Scalar> Eq for Process<F> {}

impl<F: Scalar> Hash for Process<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl<F: Scalar> fmt::Debug for Process<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_process(self))
    }
}

impl<F: Scalar> fmt::Display for Process<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::render::render_process(self))
    }
}
