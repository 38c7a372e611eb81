use std::fmt;

use serde::{Serialize, Serializer};

/// Identifiers of the operational rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// `α;G` with `α` a send or μ.
    R1,
    /// Receive: the received state is overlaid.
    R2,
    /// Transformation prefix.
    R3,
    /// Guard over a non-deterministic continuation.
    R4,
    /// Guard over a probabilistic continuation: a μ step.
    R4Prime,
    R5,
    R6,
    /// Race won by an internal or transformation step.
    R7,
    /// Race won by a probabilistic step.
    R8,
    /// Race won by a receiver.
    R9,
    /// Race won by a sender.
    R10,
    R11,
    R12,
    R13,
    R14,
    R15,
    R16,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::R4Prime => "R4'",
            Rule::R5 => "R5",
            Rule::R6 => "R6",
            Rule::R7 => "R7",
            Rule::R8 => "R8",
            Rule::R9 => "R9",
            Rule::R10 => "R10",
            Rule::R11 => "R11",
            Rule::R12 => "R12",
            Rule::R13 => "R13",
            Rule::R14 => "R14",
            Rule::R15 => "R15",
            Rule::R16 => "R16",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}
