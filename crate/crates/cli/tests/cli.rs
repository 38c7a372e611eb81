use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use aco_algebra::tsp::load_instance;
use serde_json::Value;
use tempfile::TempDir;

fn acoalg(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acoalg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("ANTALGEBRA_OUT")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: &[&str] = &["--generate", "3", "--m", "2", "--max-it", "1"];

#[test]
fn small_fine_as_run_terminates_and_writes_artifacts() {
    let dir = TempDir::new().unwrap();
    let o = acoalg(dir.path(), &[&["run"], SMALL].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["termination"], "terminated");
    assert_eq!(s["variant"], "fine-as");
    assert_eq!(s["iterations"], 1);
    assert_eq!(s["config"]["params"]["m"], 2);
    assert_eq!(s["best_path"].as_array().unwrap().len(), 3);
    let trace = fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    assert_eq!(trace.lines().count() as u64, s["steps"].as_u64().unwrap());
    for line in trace.lines() {
        let _: Value = serde_json::from_str(line).unwrap();
    }
    let csv = fs::read_to_string(dir.path().join("trails/copy1_iter0001.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().enumerate().all(|(i, r)| r.len() == 3 && r[i] == 0.0));
}

#[test]
fn same_seeds_give_identical_artifacts() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let args = ["run", "--generate", "5", "--variant", "fine-acs", "--m", "3", "--max-it", "3", "--seed", "9", "--scheduler", "random"];
    assert_eq!(code(&acoalg(a.path(), &args)), 0);
    assert_eq!(code(&acoalg(b.path(), &args)), 0);
    for f in ["summary.json", "trace.jsonl"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn missing_instance_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = acoalg(&out, &["run", "--instance", dir.path().join("absent.txt").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.txt"));
    assert!(!out.exists());
}

#[test]
fn deadlock_and_limit_have_their_own_codes() {
    let dir = TempDir::new().unwrap();
    let o = acoalg(dir.path(), &["run", "--demo", "mismatched"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&dir.path().join("summary.json"))["termination"], "deadlocked");
    let o = acoalg(dir.path(), &[&["run", "--max-steps", "10"], SMALL].concat());
    assert_eq!(code(&o), 3);
    let s = json(&dir.path().join("summary.json"));
    assert_eq!((s["termination"].as_str(), s["steps"].as_u64()), (Some("step-limit"), Some(10)));
}

#[test]
fn explore_reports() {
    let dir = TempDir::new().unwrap();
    let o = acoalg(dir.path(), &["explore", "--demo", "stop"]);
    assert_eq!(code(&o), 0);
    let r = json(&dir.path().join("lts.json"));
    assert_eq!((r["states"].as_u64(), r["deadlocks"].as_u64(), r["terminals"].as_u64()), (Some(1), Some(0), Some(1)));
    assert!(fs::read_to_string(dir.path().join("lts.dot")).unwrap().starts_with("digraph"));

    assert_eq!(code(&acoalg(dir.path(), &["explore", "--demo", "mismatched"])), 0);
    assert_eq!(json(&dir.path().join("lts.json"))["deadlocks"], 1);
    assert_eq!(code(&acoalg(dir.path(), &["explore", "--demo", "mismatched", "--expect-deadlock-free"])), 2);

    let o = acoalg(dir.path(), &[&["explore", "--expect-deadlock-free"], SMALL].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("lts.json"));
    assert_eq!(r["deadlocks"], 0);
    assert!(r["terminals"].as_u64().unwrap() > 0);

    let o = acoalg(dir.path(), &[&["explore", "--max-states", "50"], SMALL].concat());
    assert_eq!(code(&o), 3);
    let r = json(&dir.path().join("lts.json"));
    assert_eq!((r["complete"].as_bool(), r["states"].as_u64()), (Some(false), Some(50)));
}

#[test]
fn verify_codes() {
    let dir = TempDir::new().unwrap();
    let fine = ["verify", "--generate", "6", "--instance-seed", "17", "--m", "4", "--max-it", "10"];
    let o = acoalg(dir.path(), &fine);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["match"], true);
    let compared = r["deviations"].as_array().unwrap().len();
    assert!((1..=10).contains(&compared));

    let o = acoalg(dir.path(), &[&fine[..], &["--oracle-rho", "0.4"]].concat());
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("iteration 1"));

    let coarse = ["verify", "--generate", "6", "--variant", "coarse-mmas", "--p", "2", "--m", "4", "--max-it", "10"];
    assert_eq!(code(&acoalg(dir.path(), &coarse)), 0);
    let free = ["verify", "--generate", "5", "--variant", "fine-as-free", "--m", "2", "--max-it", "2"];
    assert_eq!(code(&acoalg(dir.path(), &free)), 1);
}

#[test]
fn generated_instances_are_deterministic_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    for f in [&a, &b] {
        let o = acoalg(dir.path(), &["gen-instance", "-n", "5", "--seed", "42", "--file", f.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let inst = load_instance::<f64>(&text).unwrap();
    assert_eq!(inst.to_text(), text);

    assert_eq!(code(&acoalg(dir.path(), &["gen-instance", "-n", "3", "--seed", "7"])), 0);
    let t = load_instance::<f64>(&fs::read_to_string(dir.path().join("instance-n3-s7.txt")).unwrap()).unwrap();
    for (i, j, k) in [(1, 2, 3), (2, 3, 1), (3, 1, 2)] {
        assert!(t.d(i, k) <= t.d(i, j) + t.d(j, k) + 1e-12);
    }
    assert_eq!(code(&acoalg(dir.path(), &["gen-instance", "-n", "2"])), 1);
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("inst.txt"), "3\n0 1 2\n1 0 3\n2 3 0\n").unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "variant = \"fine-mmas\"\nm = 3\nrho = 0.25\nmaxIt = 2\ninstance = \"inst.txt\"\nseed = 5\n").unwrap();
    let o = acoalg(dir.path(), &["run", "--config", cfg.to_str().unwrap(), "--m", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let c = &json(&dir.path().join("summary.json"))["config"];
    assert_eq!(c["params"]["variant"], "fine-mmas");
    assert_eq!(c["params"]["m"], 2);
    assert_eq!(c["params"]["rho"], 0.25);
    assert_eq!(c["params"]["maxIt"], 2);
    assert_eq!(c["seed"], 5);
    assert_eq!(c["params"]["tau_min"], 0.01);

    fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(code(&acoalg(dir.path(), &["run", "--config", cfg.to_str().unwrap(), "--demo", "stop"])), 1);
}

#[test]
fn per_copy_tables_reach_the_copies() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("copies.toml");
    fs::write(&cfg, "variant = \"coarse-as\"\nm = 2\nmaxIt = 2\n[[copies]]\nrho = 0.1\n[[copies]]\nrho = 0.7\n").unwrap();
    let o = acoalg(dir.path(), &["run", "--config", cfg.to_str().unwrap(), "--generate", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("summary.json"));
    let copies = s["config"]["copies"].as_array().unwrap();
    assert_eq!((copies[0]["rho"].as_f64(), copies[1]["rho"].as_f64()), (Some(0.1), Some(0.7)));
    assert_eq!(s["config"]["params"]["p"], 2);
    assert!(dir.path().join("trails/copy2_iter0002.csv").exists());
}

#[test]
fn native_runner_terminates() {
    let dir = TempDir::new().unwrap();
    let o = acoalg(dir.path(), &["run", "--native", "--generate", "5", "--variant", "coarse-acs", "--m", "2", "--max-it", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("summary.json"));
    assert_eq!(s["termination"], "terminated");
    assert_eq!(s["config"]["runner"], "native");
    assert!(s["best_cost"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("trails/copy1_final.csv").exists());
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_acoalg"))
        .args(["explore", "--demo", "handshake"])
        .env("ANTALGEBRA_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(json(&dir.path().join("lts.json"))["terminals"], 1);
}
