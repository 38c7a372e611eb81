use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use aco_algebra::aco::{BestTour, BuiltSystem, Variant};
use aco_algebra::oracle::{trails_csv, verify as verify_system, IterationObserver, OracleError, VerifyError};
use aco_algebra::semantics::native::{run_native, NativeOptions};
use aco_algebra::semantics::{
    explore_lts, run_observed, Configuration, Limits, LtsError, Policy, RandomSource, RunError, Scheduler,
    Termination, Verbosity,
};
use aco_algebra::tsp::generate_euclidean;
use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use crate::setup::{resolve, FileKeys, System};
use crate::{ExploreArgs, GenArgs, LimitArgs, RunArgs, SchedulerKind, Status, TraceLevel, VerifyArgs};

fn limits(a: &LimitArgs, keys: &FileKeys) -> Result<Limits> {
    let mut l = Limits::default();
    if let Some(s) = a.max_steps.or(keys.max_steps) {
        l.max_steps = Some(s);
    }
    if let Some(t) = a.time_limit.or(keys.time_limit) {
        if !(t.is_finite() && t > 0.0) {
            bail!("time limit must be a positive number of seconds, got {t}");
        }
        l.wall_budget = Some(Duration::from_secs_f64(t));
    }
    Ok(l)
}

fn limits_json(l: &Limits) -> Value {
    json!({
        "max_steps": l.max_steps,
        "time_limit": l.wall_budget.map(|d| d.as_secs_f64()),
    })
}

fn status_of(t: Termination) -> Status {
    match t {
        Termination::Terminated => Status::Ok,
        Termination::Deadlocked => Status::Deadlock,
        Termination::StepLimit | Termination::TimeLimit => Status::Limit,
    }
}

/// Writes every artifact, or none when the directory cannot be made.
fn write_all(out: &Path, files: &[(PathBuf, String)]) -> Result<()> {
    for (rel, text) in files {
        let path = out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn best_of(sys: &BuiltSystem<f64>, c: &Configuration<f64>) -> Option<BestTour<f64>> {
    if matches!(sys.variant, Variant::CoarseAs | Variant::CoarseMmas | Variant::CoarseAcs) {
        if let Some(b) = sys.collected(c) {
            return Some(b);
        }
    }
    sys.best(c)
}

fn outcome_json(sys: Option<&BuiltSystem<f64>>, c: &Configuration<f64>) -> Value {
    let best = sys.and_then(|s| best_of(s, c));
    json!({
        "variant": sys.map(|s| s.variant.as_str()),
        "best_path": best.as_ref().map(|b| b.path.clone()),
        "best_cost": best.as_ref().map(|b| b.length),
        "iterations": sys.and_then(|s| s.iterations(c)),
    })
}

pub fn run(a: &RunArgs, out: &Path) -> Result<Status> {
    let r = resolve(&a.system)?;
    let seed = a.seed.or(r.keys.seed).unwrap_or(0);
    let kind = a.scheduler.or(r.keys.scheduler).unwrap_or(SchedulerKind::Fixed);
    let scheduler_seed = a.scheduler_seed.or(r.keys.scheduler_seed).unwrap_or(seed);
    let limits = limits(&a.limits, &r.keys)?;
    let level = a.verbosity.or(r.keys.verbosity).unwrap_or(TraceLevel::Events);
    let (sys, config) = match &r.system {
        System::Aco(s) => (Some(&**s), s.config.clone()),
        System::Demo(c) => (None, c.clone()),
    };
    let mut effective = r.description.clone();
    effective["seed"] = json!(seed);
    effective["limits"] = limits_json(&limits);
    effective["runner"] = json!(if a.native { "native" } else { "engine" });

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    let (termination, steps, final_config) = if a.native {
        let o = run_native(
            &config,
            &NativeOptions {
                seed,
                max_steps: limits.max_steps,
                ..NativeOptions::default()
            },
        )?;
        let mut jsonl = String::new();
        for (leaf, labels) in o.labels.iter().enumerate() {
            jsonl.push_str(&json!({ "leaf": leaf, "labels": labels }).to_string());
            jsonl.push('\n');
        }
        files.push(("trace.jsonl".into(), jsonl));
        if let Some(s) = sys {
            for (c, t) in s.trails(&o.final_config).unwrap_or_default().iter().enumerate() {
                files.push((format!("trails/copy{}_final.csv", c + 1).into(), trails_csv(t, s.instance.n())));
            }
        }
        (o.termination, o.steps, o.final_config)
    } else {
        let policy = match kind {
            SchedulerKind::Fixed => Policy::FixedPriority,
            SchedulerKind::RoundRobin => Policy::RoundRobin,
            SchedulerKind::Random => Policy::UniformRandom(scheduler_seed),
        };
        effective["scheduler"] = json!(policy.name());
        if kind == SchedulerKind::Random {
            effective["scheduler_seed"] = json!(scheduler_seed);
        }
        effective["verbosity"] = json!(format!("{level:?}").to_lowercase());
        let verbosity = match level {
            TraceLevel::Summary => Verbosity::SummaryOnly,
            TraceLevel::Events => Verbosity::Events,
            TraceLevel::Deltas => Verbosity::Deltas,
        };
        let mut obs = sys.map(IterationObserver::new);
        let result = run_observed(
            config,
            &mut Scheduler::new(policy),
            &mut RandomSource::new(seed),
            limits,
            verbosity,
            |e, _, after| {
                if let Some(o) = obs.as_mut() {
                    o.observe(e, after);
                }
            },
        );
        let trace = match result {
            Ok(t) => t,
            Err(RunError::LimitExceeded(t)) => *t,
            Err(e) => return Err(e.into()),
        };
        files.push(("trace.jsonl".into(), trace.to_jsonl()));
        if let (Some(s), Some(o)) = (sys, obs) {
            for it in &o.iterations {
                files.push((
                    format!("trails/copy{}_iter{:04}.csv", it.copy, it.iteration).into(),
                    trails_csv(&it.trails, s.instance.n()),
                ));
            }
        }
        (trace.termination, trace.steps, trace.final_config)
    };

    let mut summary = outcome_json(sys, &final_config);
    summary["steps"] = json!(steps);
    summary["termination"] = json!(termination.as_str());
    summary["config"] = effective;
    files.push(("summary.json".into(), pretty(&summary)));
    let trails = out.join("trails");
    if trails.is_dir() {
        fs::remove_dir_all(&trails).with_context(|| format!("clearing {}", trails.display()))?;
    }
    write_all(out, &files)?;

    let status = status_of(termination);
    match status {
        Status::Ok => println!(
            "{} after {steps} steps; best cost {}; artifacts in {}",
            termination.as_str(),
            summary["best_cost"],
            out.display()
        ),
        _ => eprintln!("run {} after {steps} steps; artifacts in {}", termination.as_str(), out.display()),
    }
    Ok(status)
}

pub fn explore(a: &ExploreArgs, out: &Path) -> Result<Status> {
    let r = resolve(&a.system)?;
    let config = match &r.system {
        System::Aco(s) => s.config.clone(),
        System::Demo(c) => c.clone(),
    };
    let (g, complete) = match explore_lts(&config, a.max_states) {
        Ok(g) => (g, true),
        Err(LtsError::LimitExceeded(g)) => (*g, false),
        Err(LtsError::Semantics(e)) => return Err(e.into()),
    };
    let report = json!({
        "states": g.state_count(),
        "transitions": g.transition_count(),
        "deadlocks": g.deadlocks.len(),
        "terminals": g.terminals.len(),
        "committed_dead_ends": g.committed_dead_ends().len(),
        "complete": complete,
        "max_states": a.max_states,
        "deadlock_states": g.deadlocks,
        "system": r.description,
    });
    write_all(out, &[("lts.dot".into(), g.to_dot()), ("lts.json".into(), pretty(&report))])?;
    let line = format!(
        "{} states, {} transitions, {} deadlocks, {} terminals",
        g.state_count(),
        g.transition_count(),
        g.deadlocks.len(),
        g.terminals.len()
    );
    if !complete {
        eprintln!("state limit {} reached: {line} so far", a.max_states);
        return Ok(Status::Limit);
    }
    println!("{line}");
    if a.expect_deadlock_free && !g.deadlocks.is_empty() {
        eprintln!("deadlocks found: states {:?}", g.deadlocks);
        return Ok(Status::Deadlock);
    }
    Ok(Status::Ok)
}

pub fn verify(a: &VerifyArgs, out: &Path) -> Result<Status> {
    let r = resolve(&a.system)?;
    let System::Aco(sys) = &r.system else {
        bail!("demo systems have no reference algorithm");
    };
    let seed = a.seed.or(r.keys.seed).unwrap_or(0);
    let limits = limits(&a.limits, &r.keys)?;
    let report = match verify_system(sys, seed, a.oracle_rho, limits) {
        Ok(report) => report,
        Err(VerifyError::Run(RunError::LimitExceeded(t))) => {
            eprintln!("run stopped by {} after {} steps", t.termination.as_str(), t.steps);
            return Ok(Status::Limit);
        }
        Err(VerifyError::Oracle(e @ OracleError::NoCounterpart(_))) => bail!(e),
        Err(e) => return Err(e.into()),
    };
    let mut doc = report.to_json();
    doc["config"] = r.description.clone();
    doc["config"]["seed"] = json!(seed);
    doc["config"]["oracle_rho"] = json!(a.oracle_rho);
    write_all(out, &[("verify.json".into(), pretty(&doc))])?;
    let worst = report.deviations.iter().map(|d| d.2).fold(0.0_f64, f64::max);
    match &report.first_divergence {
        None => {
            println!(
                "match: {} iterations compared, max trail deviation {worst:e}",
                report.deviations.len()
            );
            Ok(Status::Ok)
        }
        Some(d) => {
            eprintln!("divergence at iteration {}: {d}", d.iteration());
            Ok(Status::Divergence)
        }
    }
}

pub fn gen_instance(a: &GenArgs, out: &Path) -> Result<Status> {
    let inst = generate_euclidean::<f64>(a.n, a.seed)?;
    let path = a
        .file
        .clone()
        .unwrap_or_else(|| out.join(format!("instance-n{}-s{}.txt", a.n, a.seed)));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(&path, inst.to_text()).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(Status::Ok)
}
