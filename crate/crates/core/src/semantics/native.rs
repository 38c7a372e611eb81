//! Runs each component on its own thread, communicating over rendezvous
//! channels. Results are not deterministic across runs.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use crossbeam_channel::{bounded, Receiver, Select, Sender};
use rand::Rng;

use super::config::{Configuration, Leaf};
use super::engine::Termination;
use super::error::SemanticsError;
use super::local::{evaluate_choice, is_done, local_moves};
use super::random::{sample_index, substream};
use crate::algebra::{Action, Name, State};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct NativeOptions {
    /// Master seed; leaf `i` draws from substream `i`, as in the engine.
    pub seed: u64,
    /// How long a blocked component waits before checking for deadlock.
    pub poll: Duration,
    /// Bound on the total number of steps taken by all components.
    pub max_steps: Option<usize>,
}

impl Default for NativeOptions {
    fn default() -> Self {
        NativeOptions {
            seed: 0,
            poll: Duration::from_millis(50),
            max_steps: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NativeOutcome<F: Scalar> {
    pub final_config: Configuration<F>,
    pub termination: Termination,
    /// Labels of the steps each component took, in its own order.
    pub labels: Vec<Vec<String>>,
    pub steps: usize,
}

type Pair<F> = (Sender<State<F>>, Receiver<State<F>>);

struct Shared<F: Scalar> {
    channels: Mutex<HashMap<Name, Pair<F>>>,
    total: usize,
    waiting: AtomicUsize,
    finished: AtomicUsize,
    progress: AtomicUsize,
    stop: AtomicBool,
    deadlock: AtomicBool,
    step_limit: AtomicBool,
    max_steps: Option<usize>,
    poll: Duration,
    seed: u64,
}

impl<F: Scalar> Shared<F> {
    fn channel(&self, c: &Name) -> Pair<F> {
        let mut map = self.channels.lock().expect("channel table poisoned");
        map.entry(c.clone()).or_insert_with(|| bounded(0)).clone()
    }

    fn advance(&self) -> bool {
        let n = self.progress.fetch_add(1, Ordering::SeqCst) + 1;
        if self.max_steps.is_some_and(|m| n > m) {
            self.step_limit.store(true, Ordering::SeqCst);
            self.stop.store(true, Ordering::SeqCst);
            return false;
        }
        true
    }
}

pub fn run_native<F: Scalar>(
    c: &Configuration<F>,
    options: &NativeOptions,
) -> Result<NativeOutcome<F>, SemanticsError> {
    let leaves: Vec<Leaf<F>> = c.leaves()?.into_iter().cloned().collect();
    let shared = Arc::new(Shared {
        channels: Mutex::new(HashMap::new()),
        total: leaves.len(),
        waiting: AtomicUsize::new(0),
        finished: AtomicUsize::new(0),
        progress: AtomicUsize::new(0),
        stop: AtomicBool::new(false),
        deadlock: AtomicBool::new(false),
        step_limit: AtomicBool::new(false),
        max_steps: options.max_steps,
        poll: options.poll,
        seed: options.seed,
    });
    let results: Vec<Result<(Leaf<F>, Vec<String>, bool), SemanticsError>> = thread::scope(|s| {
        let handles: Vec<_> = leaves
            .into_iter()
            .enumerate()
            .map(|(i, leaf)| {
                let shared = Arc::clone(&shared);
                s.spawn(move || {
                    let r = worker(i, leaf, &shared);
                    if r.is_err() {
                        shared.stop.store(true, Ordering::SeqCst);
                    }
                    r
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut finals = Vec::with_capacity(results.len());
    let mut labels = Vec::with_capacity(results.len());
    let mut all_done = true;
    for r in results {
        let (leaf, ls, done) = r?;
        all_done &= done;
        finals.push(Configuration::Leaf(leaf));
        labels.push(ls);
    }
    let termination = if shared.step_limit.load(Ordering::SeqCst) {
        Termination::StepLimit
    } else if all_done {
        Termination::Terminated
    } else {
        Termination::Deadlocked
    };
    let final_config = match c {
        Configuration::Leaf(_) => finals.pop().expect("one leaf"),
        _ => Configuration::Par(finals),
    };
    Ok(NativeOutcome {
        final_config,
        termination,
        labels,
        steps: shared.progress.load(Ordering::SeqCst).min(options.max_steps.unwrap_or(usize::MAX)),
    })
}

enum Op<F: Scalar> {
    Send(usize, Sender<State<F>>, State<F>),
    Recv(usize, Receiver<State<F>>),
}

/// Runs one component; returns its final leaf, its labels and whether it
/// finished successfully.
fn worker<F: Scalar>(
    i: usize,
    mut leaf: Leaf<F>,
    shared: &Shared<F>,
) -> Result<(Leaf<F>, Vec<String>, bool), SemanticsError> {
    let mut rng = substream(shared.seed, i as u64);
    let mut labels = Vec::new();
    loop {
        if shared.stop.load(Ordering::SeqCst) {
            return Ok((leaf, labels, false));
        }
        let moves = local_moves(&leaf.process, &leaf.state, i)?;
        if moves.is_empty() {
            let done = is_done(&leaf.process, &leaf.state).map_err(SemanticsError::eval(i))?;
            if done {
                shared.finished.fetch_add(1, Ordering::SeqCst);
            } else {
                // A stuck component waits forever; it only counts towards
                // deadlock detection.
                shared.waiting.fetch_add(1, Ordering::SeqCst);
            }
            return Ok((leaf, labels, done));
        }
        if let Some(mv) = moves.iter().find(|m| m.is_prob()) {
            let ev = evaluate_choice(mv, &leaf.state, i)?;
            let k = sample_index(&ev.weights, rng.gen::<f64>());
            let next = mv.branch_continuations(&ev.branches[k..=k]).remove(0);
            labels.push(format!("p={} #{}", ev.weights[k], ev.branches[k]));
            leaf.process = next;
            if !shared.advance() {
                return Ok((leaf, labels, false));
            }
            continue;
        }
        if let Some(mv) = moves.iter().find(|m| m.is_internal()) {
            leaf.state = mv.apply_local(&leaf.state).map_err(SemanticsError::eval(i))?;
            labels.push(mv.action().expect("action").label().to_string());
            leaf.process = mv.continuation();
            if !shared.advance() {
                return Ok((leaf, labels, false));
            }
            continue;
        }
        let mut ops = Vec::new();
        for (m, mv) in moves.iter().enumerate() {
            match mv.action() {
                Some(Action::Send { channel, vars }) => {
                    if ops.iter().any(|o| matches!(o, Op::Send(k, ..) if moves[*k].sends_on() == Some(channel))) {
                        continue;
                    }
                    let payload = match vars {
                        Some(vs) => leaf.state.restrict(vs),
                        None => leaf.state.clone(),
                    };
                    ops.push(Op::Send(m, shared.channel(channel).0, payload));
                }
                Some(Action::Receive { channel, .. }) => {
                    if ops.iter().any(|o| matches!(o, Op::Recv(k, _) if moves[*k].receives_on() == Some(channel))) {
                        continue;
                    }
                    ops.push(Op::Recv(m, shared.channel(channel).1));
                }
                _ => {}
            }
        }
        shared.waiting.fetch_add(1, Ordering::SeqCst);
        let mut seen = usize::MAX;
        let taken = loop {
            let mut sel = Select::new();
            for op in &ops {
                match op {
                    Op::Send(_, tx, _) => sel.send(tx),
                    Op::Recv(_, rx) => sel.recv(rx),
                };
            }
            match sel.select_timeout(shared.poll) {
                Ok(oper) => {
                    let idx = oper.index();
                    match &ops[idx] {
                        Op::Send(m, tx, payload) => {
                            if oper.send(tx, payload.clone()).is_err() {
                                break None;
                            }
                            break Some((*m, None));
                        }
                        Op::Recv(m, rx) => match oper.recv(rx) {
                            Ok(s) => break Some((*m, Some(s))),
                            Err(_) => break None,
                        },
                    }
                }
                Err(_) => {
                    if shared.stop.load(Ordering::SeqCst) {
                        break None;
                    }
                    let progress = shared.progress.load(Ordering::SeqCst);
                    let idle = shared.waiting.load(Ordering::SeqCst)
                        + shared.finished.load(Ordering::SeqCst);
                    if idle == shared.total && progress == seen {
                        shared.deadlock.store(true, Ordering::SeqCst);
                        shared.stop.store(true, Ordering::SeqCst);
                        break None;
                    }
                    seen = progress;
                }
            }
        };
        shared.waiting.fetch_sub(1, Ordering::SeqCst);
        let Some((m, received)) = taken else {
            return Ok((leaf, labels, false));
        };
        let mv = &moves[m];
        if let Some(payload) = received {
            leaf.state = leaf.state.overlay(&payload);
        }
        labels.push(mv.action().expect("action").label().to_string());
        leaf.process = mv.continuation();
        if !shared.advance() {
            return Ok((leaf, labels, false));
        }
    }
}
