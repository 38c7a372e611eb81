//! Turns flags and an optional parameter file into a system to run.
//! Precedence: flags, then file keys, then variant defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use aco_algebra::aco::config::{parse_config, ParamOverrides};
use aco_algebra::aco::{build_system_with_copies, AcoParams, BuiltSystem, Variant};
use aco_algebra::algebra::{Process, State};
use aco_algebra::semantics::Configuration;
use aco_algebra::tsp::{generate_euclidean, load_instance, TspInstance};
use anyhow::{bail, Context, Result};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::{Demo, ParamArgs, SchedulerKind, SystemArgs, TraceLevel};

/// Non-parameter keys a parameter file may set.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileKeys {
    pub instance: Option<PathBuf>,
    pub generate: Option<usize>,
    pub instance_seed: Option<u64>,
    pub seed: Option<u64>,
    pub scheduler: Option<SchedulerKind>,
    pub scheduler_seed: Option<u64>,
    pub max_steps: Option<usize>,
    pub time_limit: Option<f64>,
    pub verbosity: Option<TraceLevel>,
}

impl<'de> Deserialize<'de> for SchedulerKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        clap::ValueEnum::from_str(&s, true).map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for TraceLevel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        clap::ValueEnum::from_str(&s, true).map_err(serde::de::Error::custom)
    }
}

pub enum System {
    Aco(Box<BuiltSystem<f64>>),
    Demo(Configuration<f64>),
}

pub struct Resolved {
    pub system: System,
    pub keys: FileKeys,
    /// Effective parameters and instance source, for the summary.
    pub description: Value,
}

impl ParamArgs {
    fn overrides(&self) -> ParamOverrides {
        let flag = |b: bool| b.then_some(true);
        ParamOverrides {
            variant: None,
            algorithm: self.algorithm.clone(),
            m: self.m,
            alpha: self.alpha,
            beta: self.beta,
            rho: self.rho,
            q: self.q,
            tau0: self.tau0,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            q0: self.q0,
            phi: self.phi,
            max_it: self.max_it,
            starts: self.starts.clone(),
            p: self.p,
            u: self.u,
            sharing: self.sharing.clone(),
            closed_tour: flag(self.closed_tour),
            acs_global_best: flag(self.acs_global_best),
            full_state_sends: flag(self.full_state_sends),
        }
    }
}

pub fn demo(d: Demo) -> Configuration<f64> {
    type P = Process<f64>;
    let e = State::new;
    match d {
        Demo::Stop => Configuration::leaf(P::stop(), e()),
        Demo::Mismatched => Configuration::par([
            (P::send("a", P::stop()), e()),
            (P::receive("b", P::stop()), e()),
        ]),
        Demo::Handshake => Configuration::par([
            (P::send("a", P::stop()), e()),
            (P::receive("a", P::stop()), e()),
        ]),
    }
}

fn load(path: &Path) -> Result<TspInstance<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading instance {}", path.display()))?;
    load_instance(&text).with_context(|| format!("parsing instance {}", path.display()))
}

pub fn resolve(args: &SystemArgs) -> Result<Resolved> {
    let (file_params, copies, keys, base_dir) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            let cfg = parse_config(&text).with_context(|| format!("parsing config {}", path.display()))?;
            let keys: FileKeys = toml::Value::Table(cfg.extra)
                .try_into()
                .with_context(|| format!("in config {}", path.display()))?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (cfg.params, cfg.copies, keys, dir)
        }
        None => Default::default(),
    };
    if let Some(d) = args.demo {
        return Ok(Resolved {
            system: System::Demo(demo(d)),
            keys,
            description: json!({ "demo": format!("{d:?}").to_lowercase() }),
        });
    }

    let flags = ParamOverrides {
        variant: args.variant.clone(),
        ..args.params.overrides()
    };
    let merged = file_params.merged(&flags);
    let variant: Variant = merged.variant()?.unwrap_or(Variant::FineAs);
    let mut params = AcoParams::new(variant);
    merged.apply(&mut params)?;

    let (instance, source) = if let Some(path) = &args.instance {
        (load(path)?, json!({ "path": path }))
    } else if let Some(n) = args.generate {
        let seed = args.instance_seed.or(keys.instance_seed).unwrap_or(0);
        (generate_euclidean(n, seed)?, json!({ "generate": n, "seed": seed }))
    } else if let Some(path) = &keys.instance {
        let path = base_dir.join(path);
        (load(&path)?, json!({ "path": path }))
    } else if let Some(n) = keys.generate {
        let seed = args.instance_seed.or(keys.instance_seed).unwrap_or(0);
        (generate_euclidean(n, seed)?, json!({ "generate": n, "seed": seed }))
    } else {
        bail!("no instance: give --instance, --generate or --demo");
    };

    let copy_params = if variant.is_fine() {
        Vec::new()
    } else {
        let count = if copies.is_empty() { params.p } else { copies.len() };
        if let Some(p) = flags.p.filter(|&p| !copies.is_empty() && p != copies.len()) {
            bail!("--p {p} disagrees with the {} copy tables of the config", copies.len());
        }
        (0..count)
            .map(|s| {
                let o = match copies.get(s) {
                    Some(c) => file_params.merged(c).merged(&flags),
                    None => merged.clone(),
                };
                let mut c = AcoParams::new(variant);
                o.apply(&mut c)?;
                Ok(c)
            })
            .collect::<Result<Vec<_>>>()?
    };
    let sys = build_system_with_copies(Arc::new(instance), params, copy_params)?;
    let violations = sys.violations();
    if let Some((leaf, v)) = violations.first() {
        bail!("component {leaf} is ill-formed: {v}");
    }
    let mut description = json!({
        "instance": source,
        "n": sys.instance.n(),
        "params": sys.params.to_json(),
    });
    if !variant.is_fine() {
        description["copies"] = Value::Array(sys.copies.iter().map(|c| c.to_json()).collect());
    }
    Ok(Resolved {
        system: System::Aco(Box::new(sys)),
        keys,
        description,
    })
}
