//! Direct sequential AS, MMAS and ACS, written as plain loops over a trail
//! matrix. Used as ground truth for runs of the built systems.
//!
//! Arithmetic follows the same order as the process builders (denominators
//! summed by ascending vertex, deposits by ascending ant) so that results
//! agree bit for bit under aligned random streams.

mod verify;

use serde_json::{json, Value};
use thiserror::Error;

use crate::aco::{AcoParams, Algorithm, ParamError, Variant};
use crate::scalar::Scalar;
use crate::semantics::{sample_index, RandomSource};
use crate::tsp::TspInstance;

pub use verify::{verify, Divergence, EngineIteration, IterationObserver, VerifyError, VerifyReport};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("variant {0} has no sequential counterpart")]
    NoCounterpart(&'static str),
    #[error("ant {ant} has nowhere to go from vertex {from}")]
    Stuck { ant: usize, from: usize },
    #[error("instance has {n} vertices, exhaustive search supports at most {max}")]
    InstanceTooLarge { n: usize, max: usize },
}

/// How ants take turns within an iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interleaving {
    /// Ant 1 builds its whole tour, then ant 2, and so on. This is the order
    /// the fixed-priority scheduler realizes on fine-grained systems.
    AntByAnt,
    /// Every ant makes one move per round, ascending; ACS local updates
    /// follow each round. This is the order of a coarse copy.
    MoveRound,
}

/// Which colony to reproduce and where its random draws come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleSetup {
    pub algorithm: Algorithm,
    pub interleaving: Interleaving,
    /// Stream key of ant `k` is `first_stream + k - 1` when `per_ant`,
    /// otherwise every ant draws from `first_stream`.
    pub first_stream: u64,
    pub per_ant: bool,
    /// Stop early once all ants of an iteration took the same path.
    pub stop_on_convergence: bool,
}

impl OracleSetup {
    /// Counterpart of a fine-grained m-ants variant.
    pub fn fine(variant: Variant) -> Result<Self, OracleError> {
        let algorithm = match variant {
            Variant::FineAs => Algorithm::As,
            Variant::FineMmas => Algorithm::Mmas,
            Variant::FineAcs => Algorithm::Acs,
            other => return Err(OracleError::NoCounterpart(other.as_str())),
        };
        Ok(OracleSetup {
            algorithm,
            interleaving: Interleaving::AntByAnt,
            first_stream: 0,
            per_ant: true,
            // The ACS graph unblocks before testing for convergence, so the
            // test never sees all ants waiting.
            stop_on_convergence: algorithm != Algorithm::Acs,
        })
    }

    /// Counterpart of copy `s` (1-based) of an independent coarse variant.
    pub fn copy(algorithm: Algorithm, s: usize) -> Self {
        OracleSetup {
            algorithm,
            interleaving: Interleaving::MoveRound,
            first_stream: s as u64 - 1,
            per_ant: false,
            stop_on_convergence: false,
        }
    }
}

/// State after one iteration's trail update.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord<F> {
    pub iteration: usize,
    /// Row-major `n × n`, zero diagonal.
    pub trails: Vec<F>,
    pub paths: Vec<Vec<usize>>,
    pub costs: Vec<F>,
    pub best_path: Vec<usize>,
    pub best_cost: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleTrace<F> {
    pub algorithm: Algorithm,
    pub n: usize,
    pub iterations: Vec<IterationRecord<F>>,
    pub best_path: Vec<usize>,
    pub best_cost: F,
}

struct Ant<F> {
    path: Vec<usize>,
    edges: Vec<usize>,
    length: F,
}

struct Colony<'a, F: Scalar> {
    inst: &'a TspInstance<F>,
    params: &'a AcoParams<F>,
    setup: OracleSetup,
    n: usize,
    tau: Vec<F>,
    ants: Vec<Ant<F>>,
    rng: RandomSource,
}

impl<F: Scalar> Colony<'_, F> {
    fn stream(&self, k: usize) -> u64 {
        if self.setup.per_ant {
            self.setup.first_stream + k as u64 - 1
        } else {
            self.setup.first_stream
        }
    }

    /// One move of ant `k` (1-based).
    fn step(&mut self, k: usize) -> Result<(), OracleError> {
        let n = self.n;
        let p = self.params;
        let ant = &self.ants[k - 1];
        let i = *ant.path.last().expect("ants always hold a start vertex");
        let mut visited = vec![false; n + 1];
        for &v in &ant.path {
            visited[v] = true;
        }
        let mut candidates = Vec::new();
        let mut weights = Vec::new();
        let mut total = F::zero();
        for j in 1..=n {
            if visited[j] {
                continue;
            }
            let t = self.tau[(i - 1) * n + (j - 1)];
            let w = t.powf(p.alpha) * self.inst.eta(i, j).powf(p.beta);
            total = total + w;
            candidates.push(j);
            weights.push(w);
        }
        if candidates.is_empty() || !(total > F::zero()) {
            return Err(OracleError::Stuck { ant: k, from: i });
        }
        let mut probs: Vec<F> = weights.iter().map(|&w| w / total).collect();
        if self.setup.algorithm == Algorithm::Acs {
            let mut greedy = 0;
            let mut best = F::neg_infinity();
            for (idx, &j) in candidates.iter().enumerate() {
                let v = self.tau[(i - 1) * n + (j - 1)] * self.inst.eta(i, j).powf(p.beta);
                if v > best {
                    best = v;
                    greedy = idx;
                }
            }
            let rest = F::one() - p.q0;
            for (idx, pr) in probs.iter_mut().enumerate() {
                let g = if idx == greedy { p.q0 } else { F::zero() };
                *pr = g + rest * *pr;
            }
        }
        let u = self.rng.uniform(self.stream(k));
        let j = candidates[sample_index(&probs, u)];
        let ant = &mut self.ants[k - 1];
        ant.path.push(j);
        ant.edges.push((i - 1) * n + (j - 1));
        ant.length = ant.length + self.inst.d(i, j);
        if p.closed_tour && ant.path.len() == n {
            let first = ant.path[0];
            ant.edges.push((j - 1) * n + (first - 1));
            ant.length = ant.length + self.inst.d(j, first);
        }
        Ok(())
    }

    fn local_update(&mut self, k: usize) {
        let p = self.params;
        let e = *self.ants[k - 1].edges.last().expect("called after a move");
        let phi = p.phi();
        self.tau[e] = (F::one() - phi) * self.tau[e] + phi * p.tau0;
    }

    fn build_tours(&mut self) -> Result<(), OracleError> {
        let m = self.ants.len();
        let acs = self.setup.algorithm == Algorithm::Acs;
        let steps = self.n - self.ants[0].path.len();
        match self.setup.interleaving {
            Interleaving::AntByAnt => {
                for k in 1..=m {
                    for _ in 0..steps {
                        self.step(k)?;
                        if acs {
                            self.local_update(k);
                        }
                    }
                }
            }
            Interleaving::MoveRound => {
                for _ in 0..steps {
                    for k in 1..=m {
                        self.step(k)?;
                    }
                    if acs {
                        for k in 1..=m {
                            self.local_update(k);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn clamp(&self, x: F) -> F {
        let p = self.params;
        if x > p.tau_max {
            p.tau_max
        } else if x < p.tau_min {
            p.tau_min
        } else {
            x
        }
    }

    /// Evaporation plus elitist deposit on `edges`.
    fn elitist(&mut self, edges: &[usize], length: F) {
        let keep = F::one() - self.params.rho;
        let mut deposit = vec![F::zero(); self.tau.len()];
        if !edges.is_empty() {
            for &e in edges {
                deposit[e] = F::one() / length;
            }
        }
        for e in 0..self.tau.len() {
            if e / self.n != e % self.n {
                self.tau[e] = self.clamp(keep * self.tau[e] + deposit[e]);
            }
        }
    }
}

fn argmin<F: Scalar>(xs: &[F]) -> usize {
    let mut best = 0;
    for (k, &x) in xs.iter().enumerate() {
        if x < xs[best] {
            best = k;
        }
    }
    best
}

/// Runs the sequential algorithm for up to `maxIt` iterations.
pub fn run_oracle<F: Scalar>(
    inst: &TspInstance<F>,
    params: &AcoParams<F>,
    setup: OracleSetup,
    seed: u64,
) -> Result<OracleTrace<F>, OracleError> {
    let n = inst.n();
    params.validate(n)?;
    let m = params.m;
    let mut tau = vec![F::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                tau[i * n + j] = params.tau0;
            }
        }
    }
    let ants = (1..=m)
        .map(|k| Ant {
            path: vec![params.start(k, n)],
            edges: Vec::new(),
            length: F::zero(),
        })
        .collect();
    let mut colony = Colony {
        inst,
        params,
        setup,
        n,
        tau,
        ants,
        rng: RandomSource::new(seed),
    };
    let mut records = Vec::new();
    let mut best: Option<(Vec<usize>, Vec<usize>, F)> = None;
    for iteration in 1..=params.max_it {
        colony.build_tours()?;
        let costs: Vec<F> = colony.ants.iter().map(|a| a.length).collect();
        let paths: Vec<Vec<usize>> = colony.ants.iter().map(|a| a.path.clone()).collect();
        let kb = argmin(&costs);
        if best.as_ref().is_none_or(|b| costs[kb] < b.2) {
            best = Some((paths[kb].clone(), colony.ants[kb].edges.clone(), costs[kb]));
        }
        match setup.algorithm {
            Algorithm::As => {
                let keep = F::one() - params.rho;
                for t in colony.tau.iter_mut() {
                    *t = keep * *t;
                }
                for a in &colony.ants {
                    if a.edges.is_empty() {
                        continue;
                    }
                    let d = params.q / a.length;
                    for &e in &a.edges {
                        colony.tau[e] = colony.tau[e] + d;
                    }
                }
            }
            Algorithm::Mmas => {
                let edges = colony.ants[kb].edges.clone();
                colony.elitist(&edges, costs[kb]);
            }
            Algorithm::Acs => {
                let (edges, length) = if params.acs_global_best {
                    let b = best.as_ref().expect("set above");
                    (b.1.clone(), b.2)
                } else {
                    (colony.ants[kb].edges.clone(), costs[kb])
                };
                colony.elitist(&edges, length);
            }
        }
        let (best_path, _, best_cost) = best.clone().expect("set above");
        records.push(IterationRecord {
            iteration,
            trails: colony.tau.clone(),
            paths: paths.clone(),
            costs,
            best_path,
            best_cost,
        });
        let converged = paths.windows(2).all(|w| w[0] == w[1]);
        if iteration == params.max_it || (setup.stop_on_convergence && converged) {
            break;
        }
        for a in colony.ants.iter_mut() {
            let last = *a.path.last().expect("non-empty");
            a.path = vec![last];
            a.edges.clear();
            a.length = F::zero();
        }
    }
    let (best_path, _, best_cost) = best.expect("maxIt >= 1");
    Ok(OracleTrace {
        algorithm: setup.algorithm,
        n,
        iterations: records,
        best_path,
        best_cost,
    })
}

impl<F: Scalar> OracleTrace<F> {
    pub fn to_json(&self) -> Value {
        let iterations: Vec<Value> = self
            .iterations
            .iter()
            .map(|r| {
                json!({
                    "iteration": r.iteration,
                    "trails": trail_rows(&r.trails, self.n),
                    "paths": r.paths,
                    "costs": r.costs.iter().map(|c| c.as_f64()).collect::<Vec<_>>(),
                    "best_path": r.best_path,
                    "best_cost": r.best_cost.as_f64(),
                })
            })
            .collect();
        json!({
            "algorithm": self.algorithm.as_str(),
            "n": self.n,
            "iterations": iterations,
            "best_path": self.best_path,
            "best_cost": self.best_cost.as_f64(),
        })
    }

    /// One CSV per iteration: the trail matrix, rows by source vertex.
    pub fn trail_csv(&self, iteration: usize) -> Option<String> {
        let r = self.iterations.iter().find(|r| r.iteration == iteration)?;
        Some(trails_csv(&r.trails, self.n))
    }
}

pub fn trail_rows<F: Scalar>(trails: &[F], n: usize) -> Vec<Vec<f64>> {
    trails
        .chunks(n)
        .map(|row| row.iter().map(|t| t.as_f64()).collect())
        .collect()
}

/// A trail matrix as CSV without a header; values print in shortest
/// round-trip form.
pub fn trails_csv<F: Scalar>(trails: &[F], n: usize) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in trails.chunks(n) {
        w.write_record(row.iter().map(|t| t.to_string()))
            .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv is UTF-8")
}

/// Largest instance [`brute_force_optimum`] accepts.
pub const BRUTE_FORCE_MAX: usize = 10;

/// Shortest Hamiltonian path (or cycle when `closed`) starting at vertex 1,
/// lexicographically smallest among ties.
pub fn brute_force_optimum<F: Scalar>(inst: &TspInstance<F>, closed: bool) -> Result<(Vec<usize>, F), OracleError> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX {
        return Err(OracleError::InstanceTooLarge {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    let mut rest: Vec<usize> = (2..=n).collect();
    let mut best: Option<(Vec<usize>, F)> = None;
    // Lexicographic permutation order makes the first minimum the
    // lexicographically smallest.
    loop {
        let mut path = Vec::with_capacity(n);
        path.push(1);
        path.extend_from_slice(&rest);
        let cost = inst.path_cost(&path, closed).expect("a permutation");
        if best.as_ref().is_none_or(|b| cost < b.1) {
            best = Some((path, cost));
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    Ok(best.expect("at least one ordering"))
}

fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("xs[i + 1] qualifies");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}
