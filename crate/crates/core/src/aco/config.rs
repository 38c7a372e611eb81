//! Parameter files: TOML with one key per [`AcoParams`] field.
//!
//! ```toml
//! variant = "coarse-mmas"
//! m = 8
//! rho = 0.02
//! maxIt = 200
//! sharing = "weighted:0.5"
//!
//! [[copies]]      # optional, one table per copy of a coarse variant
//! rho = 0.1
//! ```
//!
//! Keys that are not parameters are handed back untouched so callers can
//! interpret them.

use serde::Deserialize;
use thiserror::Error;

use super::params::{AcoParams, ParamError, Variant};
use crate::scalar::Scalar;

/// Every key a parameter table may hold.
pub const PARAM_KEYS: &[&str] = &[
    "variant",
    "algorithm",
    "m",
    "alpha",
    "beta",
    "rho",
    "Q",
    "tau0",
    "tau_min",
    "tau_max",
    "q0",
    "phi",
    "maxIt",
    "starts",
    "p",
    "u",
    "sharing",
    "closed_tour",
    "acs_global_best",
    "full_state_sends",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("unknown key `{0}` in copy table")]
    UnknownCopyKey(String),
}

/// Parameter values given explicitly; unset fields keep their current value.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
pub struct ParamOverrides {
    pub variant: Option<String>,
    pub algorithm: Option<String>,
    pub m: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    pub tau0: Option<f64>,
    pub tau_min: Option<f64>,
    pub tau_max: Option<f64>,
    pub q0: Option<f64>,
    pub phi: Option<f64>,
    #[serde(rename = "maxIt")]
    pub max_it: Option<usize>,
    pub starts: Option<Vec<usize>>,
    pub p: Option<usize>,
    pub u: Option<usize>,
    pub sharing: Option<String>,
    pub closed_tour: Option<bool>,
    pub acs_global_best: Option<bool>,
    pub full_state_sends: Option<bool>,
}

impl ParamOverrides {
    /// Values of `other` win over those of `self`.
    pub fn merged(&self, other: &ParamOverrides) -> ParamOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                ParamOverrides { $($f: other.$f.clone().or_else(|| self.$f.clone()),)* }
            };
        }
        pick!(
            variant, algorithm, m, alpha, beta, rho, q, tau0, tau_min, tau_max, q0, phi, max_it, starts, p, u,
            sharing, closed_tour, acs_global_best, full_state_sends
        )
    }

    pub fn variant(&self) -> Result<Option<Variant>, ParamError> {
        self.variant.as_deref().map(str::parse).transpose()
    }

    /// Writes every set value into `params`. Changing the variant resets the
    /// algorithm to the variant's own unless one is given.
    pub fn apply<F: Scalar>(&self, params: &mut AcoParams<F>) -> Result<(), ParamError> {
        if let Some(v) = self.variant()? {
            params.variant = v;
            if let Some(a) = v.algorithm() {
                params.algorithm = a;
            }
        }
        if let Some(a) = &self.algorithm {
            params.algorithm = a.parse()?;
        }
        let set = |slot: &mut F, v: Option<f64>| {
            if let Some(v) = v {
                *slot = F::of(v);
            }
        };
        set(&mut params.alpha, self.alpha);
        set(&mut params.beta, self.beta);
        set(&mut params.rho, self.rho);
        set(&mut params.q, self.q);
        set(&mut params.tau0, self.tau0);
        set(&mut params.tau_min, self.tau_min);
        set(&mut params.tau_max, self.tau_max);
        set(&mut params.q0, self.q0);
        if let Some(phi) = self.phi {
            params.phi = Some(F::of(phi));
        }
        if let Some(m) = self.m {
            params.m = m;
        }
        if let Some(it) = self.max_it {
            params.max_it = it;
        }
        if let Some(s) = &self.starts {
            params.starts = s.clone();
        }
        if let Some(p) = self.p {
            params.p = p;
        }
        if let Some(u) = self.u {
            params.u = u;
        }
        if let Some(s) = &self.sharing {
            params.sharing = s.parse()?;
        }
        if let Some(b) = self.closed_tour {
            params.closed_tour = b;
        }
        if let Some(b) = self.acs_global_best {
            params.acs_global_best = b;
        }
        if let Some(b) = self.full_state_sends {
            params.full_state_sends = b;
        }
        Ok(())
    }
}

/// A parsed parameter file.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    pub params: ParamOverrides,
    /// Per-copy overrides, applied on top of `params`.
    pub copies: Vec<ParamOverrides>,
    /// Top-level keys that are not parameters.
    pub extra: toml::Table,
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let table: toml::Table = text.parse()?;
    let mut params = toml::Table::new();
    let mut extra = toml::Table::new();
    let mut copies = Vec::new();
    for (k, v) in table {
        if k == "copies" {
            copies = v
                .try_into::<Vec<toml::Table>>()?
                .into_iter()
                .map(|t| {
                    if let Some(bad) = t.keys().find(|k| !PARAM_KEYS.contains(&k.as_str())) {
                        return Err(ConfigError::UnknownCopyKey(bad.clone()));
                    }
                    Ok(toml::Value::Table(t).try_into::<ParamOverrides>()?)
                })
                .collect::<Result<_, _>>()?;
        } else if PARAM_KEYS.contains(&k.as_str()) {
            params.insert(k, v);
        } else {
            extra.insert(k, v);
        }
    }
    Ok(ConfigFile {
        params: toml::Value::Table(params).try_into()?,
        copies,
        extra,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aco::params::SharingFunction;

    #[test]
    fn file_keys_reach_params() {
        let cfg = parse_config(
            "variant = \"coarse-occasional\"\nalgorithm = \"mmas\"\nm = 3\nQ = 2.5\nmaxIt = 7\n\
             sharing = \"weighted:0.25\"\nseed = 9\n[[copies]]\nrho = 0.1\n[[copies]]\n",
        )
        .unwrap();
        let mut p = AcoParams::<f64>::default();
        cfg.params.apply(&mut p).unwrap();
        assert_eq!(p.variant, Variant::CoarseOccasional);
        assert_eq!(p.algorithm, crate::aco::Algorithm::Mmas);
        assert_eq!((p.m, p.q, p.max_it), (3, 2.5, 7));
        assert_eq!(p.sharing, SharingFunction::Weighted(0.25));
        assert_eq!(cfg.copies.len(), 2);
        assert_eq!(cfg.copies[0].rho, Some(0.1));
        assert_eq!(cfg.extra.get("seed").and_then(|v| v.as_integer()), Some(9));
    }

    #[test]
    fn later_overrides_win() {
        let a = ParamOverrides {
            m: Some(2),
            rho: Some(0.3),
            ..Default::default()
        };
        let b = ParamOverrides {
            m: Some(5),
            ..Default::default()
        };
        let c = a.merged(&b);
        assert_eq!((c.m, c.rho), (Some(5), Some(0.3)));
    }

    #[test]
    fn bad_values_are_reported() {
        assert!(parse_config("m = \"four\"").is_err());
        assert!(parse_config("[[copies]]\nseed = 1").is_err());
        let cfg = parse_config("variant = \"fine-xyz\"").unwrap();
        assert!(cfg.params.apply(&mut AcoParams::<f64>::default()).is_err());
    }
}
