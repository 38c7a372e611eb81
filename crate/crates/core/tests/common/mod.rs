//! Shared checks for the integration and acceptance tests.
#![allow(dead_code)]

use aco_algebra::aco::formulas::decode_edge;
use aco_algebra::aco::{BuiltSystem, LeafRole};
use aco_algebra::algebra::{ActionLabel, State};
use aco_algebra::semantics::{
    run_observed, Configuration, Label, Limits, RandomSource, Scheduler, Termination, Trace, TraceEvent, Verbosity,
};

/// Name of the transformation an event executed, if any.
pub fn transform_name(e: &TraceEvent<f64>) -> Option<&str> {
    match &e.label {
        Label::Action(ActionLabel::Transform(t)) => Some(t),
        _ => None,
    }
}

fn parse_move(name: &str) -> Option<(usize, usize, usize)> {
    let rest = name.strip_prefix("move[")?;
    let (k, rest) = rest.split_once("](")?;
    let (i, j) = rest.strip_suffix(')')?.split_once(',')?;
    Some((k.parse().ok()?, i.parse().ok()?, j.parse().ok()?))
}

fn trail_values(s: &State<f64>) -> Vec<(String, f64)> {
    s.iter()
        .filter(|(k, _)| k.starts_with("tau["))
        .filter_map(|(k, _)| s.scalar(k).ok().map(|v| (k.to_string(), v)))
        .collect()
}

/// Violations of the system invariants observed along one run.
#[derive(Default, Debug)]
pub struct InvariantLog {
    pub violations: Vec<String>,
    pub trail_updates: usize,
    pub local_updates: usize,
    pub moves: usize,
    pending_unblock: bool,
}

impl InvariantLog {
    fn fail(&mut self, step: usize, what: String) {
        if self.violations.len() < 20 {
            self.violations.push(format!("step {step}: {what}"));
        }
    }

    pub fn check(&mut self, sys: &BuiltSystem<f64>, e: &TraceEvent<f64>, before: &Configuration<f64>, after: &Configuration<f64>) {
        let n = sys.instance.n();
        let m = sys.params.m;
        // No repeated vertex in any path of the changed leaf.
        if let Some(leaf) = e.winner {
            for l in [Some(leaf), e.partner].into_iter().flatten() {
                if let Some(s) = after.state_of(l) {
                    for (name, _) in s.iter() {
                        if name.starts_with("path[") {
                            if let Ok(p) = s.index_list(name) {
                                let mut seen = vec![false; n + 1];
                                for v in p {
                                    if v == 0 || v > n || seen[v] {
                                        self.fail(e.step, format!("leaf {l}: {name} = {:?}", s.list(name)));
                                        break;
                                    }
                                    seen[v] = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        let Some(name) = transform_name(e) else { return };
        let Some(leaf) = e.winner else { return };
        let (Some(b), Some(a)) = (before.state_of(leaf), after.state_of(leaf)) else {
            return;
        };
        let role = sys.roles[leaf];
        if let Some((k, i, j)) = parse_move(name) {
            self.moves += 1;
            let sfx = match role {
                LeafRole::Copy(s) => format!("@{s}"),
                _ => String::new(),
            };
            let path = a.index_list(&format!("path[{k}]{sfx}")).unwrap();
            let edges = a.index_list(&format!("edges[{k}]{sfx}")).unwrap();
            let lb = b.scalar(&format!("L[{k}]{sfx}")).unwrap();
            let la = a.scalar(&format!("L[{k}]{sfx}")).unwrap();
            if path.last() != Some(&j) || edges.last().map(|&c| decode_edge(n, c)) != Some((i, j)) {
                self.fail(e.step, format!("{name}: path {path:?}, edges {edges:?}"));
            }
            if la != lb + sys.instance.d(i, j) {
                self.fail(e.step, format!("{name}: L went {lb} -> {la}"));
            }
        } else if let Some(k) = name.strip_prefix("localUpd[").and_then(|r| r.strip_suffix(']')) {
            // Only the trail of the ant's last edge may change, and it must
            // move to (1 − φ)τ + φτ0. At τ = τ0 that is a fixed point.
            self.local_updates += 1;
            let sfx = match role {
                LeafRole::Copy(s) => format!("@{s}"),
                _ => String::new(),
            };
            let params = match role {
                LeafRole::Copy(s) => &sys.copies[s - 1],
                _ => &sys.params,
            };
            let edges = a.index_list(&format!("edges[{k}]{sfx}")).unwrap();
            let (i, j) = decode_edge(n, *edges.last().unwrap());
            let target = format!("tau[{i}][{j}]{sfx}");
            for ((name_b, x), (_, y)) in trail_values(b).into_iter().zip(trail_values(a)) {
                if name_b == target {
                    let phi = params.phi();
                    let expect = (1.0 - phi) * x + phi * params.tau0;
                    if y != expect {
                        self.fail(e.step, format!("{name}: {target} {x} -> {y}, expected {expect}"));
                    }
                } else if x != y {
                    self.fail(e.step, format!("{name} changed {name_b}"));
                }
            }
        } else if name == "trailUpd" || name.starts_with("trailUpd[") {
            self.trail_updates += 1;
            if role == LeafRole::Graph && !sys.variant.is_free() {
                let w = b.list("waiting").map(|w| w.len()).unwrap_or(usize::MAX);
                if w != m {
                    self.fail(e.step, format!("trailUpd with {w} waiting ants"));
                }
                self.pending_unblock = true;
            }
        } else if name == "newIt" {
            let (x, y) = (b.index("numIt").unwrap(), a.index("numIt").unwrap());
            let cap = match role {
                LeafRole::Copy(s) => sys.copies[s - 1].max_it,
                _ => sys.params.max_it,
            };
            if y != x + 1 || y > cap {
                self.fail(e.step, format!("numIt {x} -> {y} (cap {cap})"));
            }
        } else if name == "unblock" && self.pending_unblock {
            self.pending_unblock = false;
            if a.list("waiting").map(|w| !w.is_empty()).unwrap_or(true) {
                self.fail(e.step, "waiting not empty after unblock".into());
            }
        }
        if sys.variant.is_free() && role == LeafRole::Graph {
            if a.index("infoSent").unwrap_or(0) > m {
                self.fail(e.step, "infoSent exceeds m".into());
            }
            if a.list("search").map(|s| s.len()).unwrap_or(0) > m {
                self.fail(e.step, "search list exceeds m".into());
            }
        }
    }

    /// Checks made on the final configuration of a terminated run.
    pub fn finish(&mut self, sys: &BuiltSystem<f64>, t: &Trace<f64>) {
        if t.termination != Termination::Terminated {
            self.fail(t.steps, format!("run ended {}", t.termination.as_str()));
            return;
        }
        for (leaf, role) in sys.roles.iter().enumerate() {
            let expected = match role {
                LeafRole::Graph => sys.params.m,
                LeafRole::Coordinator => sys.params.p,
                _ => continue,
            };
            let s = t.final_config.state_of(leaf).unwrap();
            let got = s.list("notified").map(|l| l.len()).unwrap_or(0);
            if got != expected {
                self.fail(t.steps, format!("{} notified {got} of {expected}", role.label()));
            }
        }
    }
}

/// Runs `sys` to the end checking every invariant on the way.
pub fn run_checked(sys: &BuiltSystem<f64>, scheduler: &mut Scheduler, seed: u64) -> (Trace<f64>, InvariantLog) {
    let mut log = InvariantLog::default();
    let t = run_observed(
        sys.config.clone(),
        scheduler,
        &mut RandomSource::new(seed),
        Limits::steps(5_000_000),
        Verbosity::SummaryOnly,
        |e, b, a| log.check(sys, e, b, a),
    )
    .expect("run completes");
    log.finish(sys, &t);
    (t, log)
}
