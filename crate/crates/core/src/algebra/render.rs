//! Canonical text rendering of process terms.
//!
//! Subterms that occur more than once are printed once as a numbered
//! definition and referenced as `#n`, so heavily shared terms stay small.

use std::collections::HashMap;
use std::fmt::Write;

use super::process::{Process, Term};
use crate::scalar::Scalar;

pub fn render_process<F: Scalar>(p: &Process<F>) -> String {
    let mut r = Renderer {
        counts: HashMap::new(),
        ids: HashMap::new(),
        pending: Vec::new(),
    };
    r.count(p);
    let main = r.term(p, true);
    if r.pending.is_empty() {
        return main;
    }
    let mut out = main;
    out.push_str("\nwhere");
    let mut i = 0;
    while i < r.pending.len() {
        let q = r.pending[i].clone();
        let body = r.term(&q, true);
        let _ = write!(out, "\n  #{} = {}", i + 1, body);
        i += 1;
    }
    out
}

struct Renderer<F: Scalar> {
    counts: HashMap<Process<F>, usize>,
    ids: HashMap<Process<F>, usize>,
    pending: Vec<Process<F>>,
}

impl<F: Scalar> Renderer<F> {
    fn count(&mut self, p: &Process<F>) {
        let mut stack = vec![p.clone()];
        let mut expanded = std::collections::HashSet::new();
        while let Some(q) = stack.pop() {
            if !expanded.insert(q.clone()) {
                continue;
            }
            for c in q.children() {
                *self.counts.entry(c.clone()).or_insert(0) += 1;
                stack.push(c.clone());
            }
        }
    }

    fn shared(&self, p: &Process<F>) -> bool {
        !matches!(p.term(), Term::Stop | Term::Var(_))
            && self.counts.get(p).copied().unwrap_or(0) > 1
    }

    fn term(&mut self, p: &Process<F>, top: bool) -> String {
        if !top && self.shared(p) {
            let next = self.pending.len() + 1;
            let id = *self.ids.entry(p.clone()).or_insert(next);
            if id == next {
                self.pending.push(p.clone());
            }
            return format!("#{id}");
        }
        match p.term() {
            Term::Stop => "stop".to_string(),
            Term::Var(x) => x.to_string(),
            Term::Prefix(a, g) => format!("{a};{}", self.term(g, false)),
            Term::Guard(c, g) => format!("[{}]{}", c.name(), self.term(g, false)),
            Term::Sum(gs) => {
                let parts: Vec<String> = gs.iter().map(|g| self.term(g, false)).collect();
                format!("({})", parts.join(" + "))
            }
            Term::Prob(w, gs) => {
                let parts: Vec<String> = gs.iter().map(|g| self.term(g, false)).collect();
                format!("⊕{{{}}}({})", w.name(), parts.join(" | "))
            }
            Term::Rec(x, body) => format!("rec {x}.{}", self.term(body, false)),
        }
    }
}
