use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use kinspec::spectral::snapshot::{read_snapshot, Snapshot};
use serde_json::Value;
use tempfile::TempDir;

const SCENARIOS: [&str; 8] = [
    "solve",
    "diagnose-regularization",
    "maxreg",
    "besov",
    "trace-band",
    "smoothing",
    "varcoef",
    "quasilinear",
];

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn config(name: &str) -> PathBuf {
    manifest().join("configs").join(format!("{name}.toml"))
}

fn kinspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinspec"))
        .args(args)
        .env_remove("KINSPEC_OUT")
        .output()
        .unwrap()
}

fn run_scenario(name: &str, cfg: &Path, out: &Path) -> Output {
    kinspec(&[name, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", String::from_utf8_lossy(&o.stderr)))
}

fn schema() -> JSONSchema {
    let text = std::fs::read_to_string(manifest().join("schema/kinspec.schema.json")).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(schema: &JSONSchema, v: &Value, what: &str) {
    if let Err(errors) = schema.validate(v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{what} violates the schema: {msgs:?}");
    }
}

/// Config text with one line removed or replaced.
fn edited(name: &str, from: &str, to: &str, dir: &Path) -> PathBuf {
    let text = std::fs::read_to_string(config(name)).unwrap();
    assert!(text.contains(from), "{from} not in {name}");
    let path = dir.join(format!("{name}-edited.toml"));
    std::fs::write(&path, text.replacen(from, to, 1)).unwrap();
    path
}

#[test]
fn every_scenario_writes_stamped_valid_artifacts() {
    let schema = schema();
    let tmp = TempDir::new().unwrap();
    for name in SCENARIOS {
        let out = tmp.path().join(name);
        let o = run_scenario(name, &config(name), &out);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let run: Value = serde_json::from_str(&std::fs::read_to_string(out.join("run.json")).unwrap()).unwrap();
        assert_eq!(run["passed"], Value::Bool(true), "{name}: {run:#}");
        let hash = run["config_sha256"].as_str().unwrap().to_string();
        let seed = run["seed"].as_u64().unwrap().to_string();
        for entry in std::fs::read_dir(&out).unwrap() {
            let path = entry.unwrap().path();
            match path.extension().and_then(|e| e.to_str()) {
                Some("json") => {
                    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
                    assert_valid(&schema, &v, &path.display().to_string());
                    assert_eq!(v["config_sha256"], Value::String(hash.clone()));
                }
                Some("csv") => {
                    let mut r = csv::Reader::from_path(&path).unwrap();
                    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
                    assert_eq!(&header[header.len() - 2..], ["config_sha256", "seed"], "{}", path.display());
                    for rec in r.records() {
                        let rec = rec.unwrap();
                        assert_eq!(&rec[rec.len() - 2], hash);
                        assert_eq!(&rec[rec.len() - 1], seed);
                    }
                }
                _ => {}
            }
        }
    }
}

#[test]
fn solve_is_contractive_and_snapshots_round_trip() {
    let tmp = TempDir::new().unwrap();
    let o = run_scenario("solve", &config("solve"), tmp.path());
    assert!(o.status.success());
    let mut r = csv::Reader::from_path(tmp.path().join("norms.csv")).unwrap();
    let norms: Vec<f64> = r.records().map(|rec| rec.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(norms.len(), 9);
    assert!(norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-10)));
    match read_snapshot(&tmp.path().join("u_00_0008")).unwrap() {
        Snapshot::Physical(f) => assert_eq!(f.grid().nx, 32),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_key_exits_2_and_names_the_key() {
    let tmp = TempDir::new().unwrap();
    let cfg = edited("solve", "nv = 32\n", "", tmp.path());
    let o = run_scenario("solve", &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "missing_key");
    assert_eq!(err["key"], "grid.nv");
    assert_valid(&schema(), &err, "error");
}

#[test]
fn errors_are_structured() {
    let schema = schema();
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");

    let o = run_scenario("warp-drive", &config("solve"), &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "unknown_scenario");

    let bad_grid = edited("solve", "nx = 32", "nx = 24", tmp.path());
    let o = run_scenario("solve", &bad_grid, &out);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "invalid_parameters");

    let refused = edited("varcoef", "coefficients = \"compact-perturbation\"", "coefficients = \"clipped-distance\"", tmp.path());
    let o = run_scenario("varcoef", &refused, &out);
    assert_eq!(o.status.code(), Some(4));
    let err = stderr_json(&o);
    assert_eq!(err["error"], "hypothesis_refused");
    assert_eq!(err["details"]["passed"], Value::Bool(false));

    let wrong = run_scenario("besov", &config("solve"), &out);
    assert_eq!(wrong.status.code(), Some(2));

    for o in [&o, &wrong] {
        assert_valid(&schema, &stderr_json(o), "error");
    }
}

#[test]
fn report_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        assert!(run_scenario("maxreg", &config("maxreg"), dir).status.success());
        let o = kinspec(&["report", dir.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["summary.json", "summary.dat", "run.json", "ratios.csv", "trend.csv"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    assert_valid(&schema(), &summary, "summary");
    assert_eq!(summary["complete"], Value::Bool(true));
    assert!(summary["run_summary"]["worst_ratio"].is_number());
    assert_eq!(summary["run_summary"]["refinement_trend"].as_array().unwrap().len(), 2);
    // rerunning the report on its own output changes nothing
    assert!(kinspec(&["report", a.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(a.join("summary.json")).unwrap(), std::fs::read(b.join("summary.json")).unwrap());
}

#[test]
fn report_flags_incomplete_runs_and_rejects_empty_directories() {
    let tmp = TempDir::new().unwrap();
    let empty = tmp.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let o = kinspec(&["report", empty.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
    assert_eq!(stderr_json(&o)["error"], "report");

    let run = tmp.path().join("run");
    assert!(run_scenario("besov", &config("besov"), &run).status.success());
    std::fs::remove_file(run.join("run.json")).unwrap();
    assert!(kinspec(&["report", run.to_str().unwrap()]).status.success());
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(run.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["complete"], Value::Bool(false));
    assert_eq!(summary["passed"], Value::Bool(false));
    assert_valid(&schema(), &summary, "partial summary");
}

#[test]
fn seed_flag_and_output_override() {
    let tmp = TempDir::new().unwrap();
    let cfg = config("besov");
    let o = kinspec(&["besov", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap(), "--seed", "99"]);
    assert!(o.status.success());
    let run: Value = serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(run["seed"], 99);

    let env_out = tmp.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_kinspec"))
        .args(["besov", "--config", cfg.to_str().unwrap()])
        .env("KINSPEC_OUT", &env_out)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_out.join("run.json").is_file());
}
