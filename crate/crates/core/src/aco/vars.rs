//! Variable names of the built systems, interned once per build.

use std::sync::Arc;

use crate::algebra::{name, Name, VarSet};

/// Names for one graph or copy: ant variables `path[k]`, `edges[k]`,
/// `L[k]` and trails `tau[i][j]`, all carrying `suffix` (empty in the
/// fine-grained systems, `@s` for copy `s`).
#[derive(Clone, Debug)]
pub struct Vars {
    pub n: usize,
    pub m: usize,
    pub suffix: String,
    /// Row-major, diagonal entries unused.
    tau: Vec<Name>,
    path: Vec<Name>,
    edges: Vec<Name>,
    length: Vec<Name>,
    pub num_it: Name,
    pub final_: Name,
    pub waiting: Name,
    pub notified: Name,
    pub info_sent: Name,
    pub search: Name,
    pub paths: Name,
    pub all_edges: Name,
    pub costs: Name,
    pub solution: Name,
    pub best_l: Name,
    pub best_path: Name,
    pub best_edges: Name,
}

impl Vars {
    pub fn new(n: usize, m: usize, suffix: &str) -> Arc<Self> {
        let sfx = |base: String| name(&format!("{base}{suffix}"));
        let mut tau = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                tau.push(sfx(format!("tau[{i}][{j}]")));
            }
        }
        Arc::new(Vars {
            n,
            m,
            suffix: suffix.to_string(),
            tau,
            path: (1..=m).map(|k| sfx(format!("path[{k}]"))).collect(),
            edges: (1..=m).map(|k| sfx(format!("edges[{k}]"))).collect(),
            length: (1..=m).map(|k| sfx(format!("L[{k}]"))).collect(),
            num_it: name("numIt"),
            final_: name("final"),
            waiting: name("waiting"),
            notified: name("notified"),
            info_sent: name("infoSent"),
            search: name("search"),
            paths: name("paths"),
            all_edges: name("edges"),
            costs: name("costs"),
            solution: sfx("solution".into()),
            best_l: sfx("bestL".into()),
            best_path: sfx("bestPath".into()),
            best_edges: sfx("bestEdges".into()),
        })
    }

    /// `tau[i][j]`, 1-based.
    pub fn tau(&self, i: usize, j: usize) -> &Name {
        &self.tau[(i - 1) * self.n + (j - 1)]
    }

    /// Trail names with their 0-based matrix positions, diagonal skipped.
    pub fn tau_entries(&self) -> impl Iterator<Item = (usize, &Name)> {
        let n = self.n;
        self.tau
            .iter()
            .enumerate()
            .filter(move |(e, _)| e / n != e % n)
    }

    pub fn path(&self, k: usize) -> &Name {
        &self.path[k - 1]
    }

    pub fn edges(&self, k: usize) -> &Name {
        &self.edges[k - 1]
    }

    pub fn length(&self, k: usize) -> &Name {
        &self.length[k - 1]
    }

    pub fn ant_set(&self, k: usize) -> VarSet {
        [self.path(k), self.edges(k), self.length(k)]
            .into_iter()
            .cloned()
            .collect()
    }

    pub fn tau_set(&self) -> VarSet {
        self.tau_entries().map(|(_, t)| t.clone()).collect()
    }
}
