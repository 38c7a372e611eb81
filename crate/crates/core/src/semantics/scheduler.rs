use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::error::SemanticsError;
use super::random::substream;
use super::transition::Transition;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Always the first offered transition.
    FixedPriority,
    /// Race winners taken in rotating order.
    RoundRobin,
    UniformRandom(u64),
    /// Explicit indices, consumed only when two or more transitions are
    /// offered.
    Scripted(Vec<usize>),
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::FixedPriority => "fixed",
            Policy::RoundRobin => "round-robin",
            Policy::UniformRandom(_) => "random",
            Policy::Scripted(_) => "scripted",
        }
    }
}

/// Resolves nondeterministic choices. Every choice among two or more options
/// is recorded as (index, option count) so a run can be replayed with
/// [`Policy::Scripted`].
#[derive(Clone, Debug)]
pub struct Scheduler {
    policy: Policy,
    cursor: usize,
    position: usize,
    rng: Option<ChaCha8Rng>,
    record: Vec<(usize, usize)>,
}

impl Scheduler {
    pub fn new(policy: Policy) -> Self {
        let rng = match &policy {
            Policy::UniformRandom(seed) => Some(substream(*seed, u64::MAX)),
            _ => None,
        };
        Scheduler {
            policy,
            cursor: 0,
            position: 0,
            rng,
            record: Vec::new(),
        }
    }

    pub fn fixed() -> Self {
        Scheduler::new(Policy::FixedPriority)
    }

    pub fn round_robin() -> Self {
        Scheduler::new(Policy::RoundRobin)
    }

    pub fn random(seed: u64) -> Self {
        Scheduler::new(Policy::UniformRandom(seed))
    }

    pub fn scripted(indices: Vec<usize>) -> Self {
        Scheduler::new(Policy::Scripted(indices))
    }

    /// Replays the choices recorded by another scheduler.
    pub fn replay(record: &[(usize, usize)]) -> Self {
        Scheduler::scripted(record.iter().map(|&(i, _)| i).collect())
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn record(&self) -> &[(usize, usize)] {
        &self.record
    }

    pub fn choose<F: Scalar>(&mut self, options: &[Transition<F>]) -> Result<usize, SemanticsError> {
        let n = options.len();
        if n <= 1 {
            return Ok(0);
        }
        let pick = match &self.policy {
            Policy::FixedPriority => 0,
            Policy::RoundRobin => {
                let winners: Vec<Option<usize>> = options
                    .iter()
                    .map(|t| if t.target.is_committed() { t.winner } else { None })
                    .collect();
                if winners.iter().all(Option::is_some) {
                    let at = |i: usize| winners[i].expect("checked");
                    let pick = (0..n)
                        .find(|&i| at(i) >= self.cursor)
                        .unwrap_or(0);
                    self.cursor = at(pick) + 1;
                    pick
                } else {
                    0
                }
            }
            Policy::UniformRandom(_) => self.rng.as_mut().expect("seeded").gen_range(0..n),
            Policy::Scripted(script) => {
                let i = *script.get(self.position).ok_or(SemanticsError::ScriptExhausted {
                    used: self.position,
                })?;
                self.position += 1;
                if i >= n {
                    return Err(SemanticsError::ScriptOutOfRange { index: i, count: n });
                }
                i
            }
        };
        self.record.push((pick, n));
        Ok(pick)
    }
}
