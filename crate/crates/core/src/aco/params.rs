use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};
use thiserror::Error;

use crate::scalar::Scalar;

/// The ten system builders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    FineAs,
    FineAsFree,
    FineMmas,
    FineMmasFree,
    FineAcs,
    FineAcsFree,
    CoarseAs,
    CoarseMmas,
    CoarseAcs,
    CoarseOccasional,
}

/// The trail mathematics a variant runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    As,
    Mmas,
    Acs,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::As => "as",
            Algorithm::Mmas => "mmas",
            Algorithm::Acs => "acs",
        }
    }
}

impl FromStr for Algorithm {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, ParamError> {
        match s.to_ascii_lowercase().as_str() {
            "as" => Ok(Algorithm::As),
            "mmas" => Ok(Algorithm::Mmas),
            "acs" => Ok(Algorithm::Acs),
            _ => Err(ParamError::Unknown {
                key: "algorithm".into(),
                value: s.into(),
            }),
        }
    }
}

impl Variant {
    pub const ALL: [Variant; 10] = [
        Variant::FineAs,
        Variant::FineAsFree,
        Variant::FineMmas,
        Variant::FineMmasFree,
        Variant::FineAcs,
        Variant::FineAcsFree,
        Variant::CoarseAs,
        Variant::CoarseMmas,
        Variant::CoarseAcs,
        Variant::CoarseOccasional,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::FineAs => "fine-as",
            Variant::FineAsFree => "fine-as-free",
            Variant::FineMmas => "fine-mmas",
            Variant::FineMmasFree => "fine-mmas-free",
            Variant::FineAcs => "fine-acs",
            Variant::FineAcsFree => "fine-acs-free",
            Variant::CoarseAs => "coarse-as",
            Variant::CoarseMmas => "coarse-mmas",
            Variant::CoarseAcs => "coarse-acs",
            Variant::CoarseOccasional => "coarse-occasional",
        }
    }

    /// Trail mathematics; the occasional variant takes it from the
    /// parameters.
    pub fn algorithm(self) -> Option<Algorithm> {
        match self {
            Variant::FineAs | Variant::FineAsFree | Variant::CoarseAs => Some(Algorithm::As),
            Variant::FineMmas | Variant::FineMmasFree | Variant::CoarseMmas => Some(Algorithm::Mmas),
            Variant::FineAcs | Variant::FineAcsFree | Variant::CoarseAcs => Some(Algorithm::Acs),
            Variant::CoarseOccasional => None,
        }
    }

    pub fn is_fine(self) -> bool {
        matches!(
            self,
            Variant::FineAs
                | Variant::FineAsFree
                | Variant::FineMmas
                | Variant::FineMmasFree
                | Variant::FineAcs
                | Variant::FineAcsFree
        )
    }

    pub fn is_free(self) -> bool {
        matches!(self, Variant::FineAsFree | Variant::FineMmasFree | Variant::FineAcsFree)
    }

    /// Variants with a direct reference implementation.
    pub fn has_oracle(self) -> bool {
        matches!(
            self,
            Variant::FineAs
                | Variant::FineMmas
                | Variant::FineAcs
                | Variant::CoarseAs
                | Variant::CoarseMmas
                | Variant::CoarseAcs
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, ParamError> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == key)
            .ok_or_else(|| ParamError::Unknown {
                key: "variant".into(),
                value: s.into(),
            })
    }
}

/// How copies combine their trails when they share them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SharingFunction {
    /// Every copy adopts the trails of the copy with the best solution so
    /// far (ties to the smallest copy index).
    BestCopy,
    /// Entrywise arithmetic mean over the copies.
    Average,
    /// `λ · own + (1 − λ) · mean`.
    Weighted(f64),
}

impl fmt::Display for SharingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SharingFunction::BestCopy => f.write_str("best"),
            SharingFunction::Average => f.write_str("average"),
            SharingFunction::Weighted(l) => write!(f, "weighted:{l}"),
        }
    }
}

impl FromStr for SharingFunction {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, ParamError> {
        let bad = || ParamError::Unknown {
            key: "sharing".into(),
            value: s.into(),
        };
        match s.to_ascii_lowercase().as_str() {
            "best" | "best-copy" => Ok(SharingFunction::BestCopy),
            "average" | "avg" => Ok(SharingFunction::Average),
            other => {
                let l = other.strip_prefix("weighted:").ok_or_else(bad)?;
                let l: f64 = l.parse().map_err(|_| bad())?;
                Ok(SharingFunction::Weighted(l))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParamError {
    #[error("{name} = {value} is out of range: {rule}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        rule: &'static str,
    },
    #[error("need {expected} start vertices, got {got}")]
    StartCount { expected: usize, got: usize },
    #[error("start vertex {vertex} of ant {ant} is outside 1..={n}")]
    StartOutOfRange { ant: usize, vertex: usize, n: usize },
    #[error("unknown {key} `{value}`")]
    Unknown { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcoParams<F: Scalar> {
    pub variant: Variant,
    /// Trail mathematics of the occasional-communication variant.
    pub algorithm: Algorithm,
    pub m: usize,
    pub alpha: F,
    pub beta: F,
    pub rho: F,
    /// Deposit constant of the AS update.
    pub q: F,
    pub tau0: F,
    pub tau_min: F,
    pub tau_max: F,
    pub q0: F,
    /// ACS local decay; `rho` when unset.
    pub phi: Option<F>,
    pub max_it: usize,
    /// Start vertex of each ant, 1-based; empty means `((k - 1) mod n) + 1`.
    pub starts: Vec<usize>,
    /// Number of copies in coarse variants.
    pub p: usize,
    /// Sharing period of the occasional variant.
    pub u: usize,
    pub sharing: SharingFunction,
    /// Adds the edge back to the first vertex when a tour completes.
    pub closed_tour: bool,
    /// ACS offline update credits the best path found so far instead of the
    /// iteration best.
    pub acs_global_best: bool,
    /// Sends transmit the whole state instead of the variables the receiver
    /// needs.
    pub full_state_sends: bool,
}

impl<F: Scalar> Default for AcoParams<F> {
    fn default() -> Self {
        AcoParams {
            variant: Variant::FineAs,
            algorithm: Algorithm::As,
            m: 4,
            alpha: F::one(),
            beta: F::of(2.0),
            rho: F::of(0.5),
            q: F::one(),
            tau0: F::one(),
            tau_min: F::of(0.01),
            tau_max: F::of(10.0),
            q0: F::of(0.9),
            phi: None,
            max_it: 10,
            starts: Vec::new(),
            p: 2,
            u: 1,
            sharing: SharingFunction::Average,
            closed_tour: false,
            acs_global_best: false,
            full_state_sends: false,
        }
    }
}

impl<F: Scalar> AcoParams<F> {
    pub fn new(variant: Variant) -> Self {
        AcoParams {
            variant,
            algorithm: variant.algorithm().unwrap_or(Algorithm::As),
            ..Self::default()
        }
    }

    /// Trail mathematics in effect.
    pub fn effective_algorithm(&self) -> Algorithm {
        self.variant.algorithm().unwrap_or(self.algorithm)
    }

    pub fn phi(&self) -> F {
        self.phi.unwrap_or(self.rho)
    }

    /// Start vertex of ant `k` (1-based) on an `n`-vertex instance.
    pub fn start(&self, k: usize, n: usize) -> usize {
        self.starts
            .get(k - 1)
            .copied()
            .unwrap_or((k - 1) % n + 1)
    }

    pub fn validate(&self, n: usize) -> Result<(), ParamError> {
        let range = |name: &'static str, v: F, ok: bool, rule: &'static str| {
            if ok && v.is_finite() {
                Ok(())
            } else {
                Err(ParamError::OutOfRange {
                    name,
                    value: v.as_f64(),
                    rule,
                })
            }
        };
        let count = |name: &'static str, v: usize, ok: bool, rule: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(ParamError::OutOfRange {
                    name,
                    value: v as f64,
                    rule,
                })
            }
        };
        let zero = F::zero();
        let one = F::one();
        count("m", self.m, self.m >= 1, "m >= 1")?;
        count("maxIt", self.max_it, self.max_it >= 1, "maxIt >= 1")?;
        count("p", self.p, self.p >= 1, "p >= 1")?;
        count("u", self.u, self.u >= 1, "u >= 1")?;
        range("alpha", self.alpha, self.alpha >= zero, "alpha >= 0")?;
        range("beta", self.beta, self.beta >= zero, "beta >= 0")?;
        range("rho", self.rho, self.rho >= zero && self.rho <= one, "0 <= rho <= 1")?;
        range("Q", self.q, self.q >= zero, "Q >= 0")?;
        range("tau0", self.tau0, self.tau0 > zero, "tau0 > 0")?;
        range("q0", self.q0, self.q0 >= zero && self.q0 <= one, "0 <= q0 <= 1")?;
        let phi = self.phi();
        range("phi", phi, phi >= zero && phi <= one, "0 <= phi <= 1")?;
        if self.effective_algorithm() != Algorithm::As {
            range("tau_min", self.tau_min, self.tau_min >= zero, "tau_min >= 0")?;
            if self.tau_min > self.tau0 || self.tau0 > self.tau_max || self.tau_max.is_nan() {
                return Err(ParamError::Invalid(format!(
                    "need tau_min <= tau0 <= tau_max, got {} <= {} <= {}",
                    self.tau_min, self.tau0, self.tau_max
                )));
            }
        }
        if let SharingFunction::Weighted(l) = self.sharing {
            if !(0.0..=1.0).contains(&l) {
                return Err(ParamError::OutOfRange {
                    name: "sharing",
                    value: l,
                    rule: "0 <= lambda <= 1",
                });
            }
        }
        if !self.starts.is_empty() && self.starts.len() != self.m {
            return Err(ParamError::StartCount {
                expected: self.m,
                got: self.starts.len(),
            });
        }
        for k in 1..=self.m {
            let v = self.start(k, n);
            if v == 0 || v > n {
                return Err(ParamError::StartOutOfRange { ant: k, vertex: v, n });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variant": self.variant.as_str(),
            "algorithm": self.effective_algorithm().as_str(),
            "m": self.m,
            "alpha": self.alpha.as_f64(),
            "beta": self.beta.as_f64(),
            "rho": self.rho.as_f64(),
            "Q": self.q.as_f64(),
            "tau0": self.tau0.as_f64(),
            "tau_min": self.tau_min.as_f64(),
            "tau_max": self.tau_max.as_f64(),
            "q0": self.q0.as_f64(),
            "phi": self.phi().as_f64(),
            "maxIt": self.max_it,
            "starts": self.starts,
            "p": self.p,
            "u": self.u,
            "sharing": self.sharing.to_string(),
            "closed_tour": self.closed_tour,
            "acs_global_best": self.acs_global_best,
            "full_state_sends": self.full_state_sends,
        })
    }
}
