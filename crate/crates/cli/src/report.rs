//! Merges the artifacts of a run directory into `summary.json` and a
//! gnuplot data file `summary.dat` (one indexed block per CSV).

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::artifacts::write_json;
use crate::error::{CliError, CliResult};

const OUTPUTS: [&str; 2] = ["summary.json", "summary.dat"];
const STAMP_COLUMNS: [&str; 2] = ["config_sha256", "seed"];

struct Table {
    name: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> CliResult<Table> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(String::from).collect());
    }
    Ok(Table {
        name: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        columns: header,
        rows,
    })
}

fn gnuplot_field(s: &str) -> String {
    if s.parse::<f64>().is_ok() {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('"', "'"))
    }
}

fn data_block(t: &Table) -> String {
    let keep: Vec<usize> = (0..t.columns.len()).filter(|&i| !STAMP_COLUMNS.contains(&t.columns[i].as_str())).collect();
    let mut s = format!("# {}\n# {}\n", t.name, keep.iter().map(|&i| t.columns[i].as_str()).collect::<Vec<_>>().join(" "));
    for r in &t.rows {
        let fields: Vec<String> = keep.iter().filter_map(|&i| r.get(i)).map(|f| gnuplot_field(f)).collect();
        s.push_str(&fields.join(" "));
        s.push('\n');
    }
    s
}

/// Stamp of a table: the last two columns of its first row.
fn table_stamp(t: &Table) -> Option<(String, u64)> {
    let row = t.rows.first()?;
    let n = t.columns.len();
    if n < 2 || t.columns[n - 2] != "config_sha256" || t.columns[n - 1] != "seed" {
        return None;
    }
    Some((row[n - 2].clone(), row[n - 1].parse().ok()?))
}

pub fn report(dir: &Path, out: Option<&Path>) -> CliResult<Value> {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => return Err(CliError::Report(format!("cannot read run directory {}: {e}", dir.display()))),
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| !OUTPUTS.iter().any(|o| p.file_name().is_some_and(|n| n == *o)))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Report(format!("run directory {} is empty", dir.display())));
    }
    let run: Option<Value> = match std::fs::read_to_string(dir.join("run.json")) {
        Ok(text) => Some(serde_json::from_str(&text)?),
        Err(_) => None,
    };
    let tables = files
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| read_table(p))
        .collect::<CliResult<Vec<_>>>()?;

    let (scenario, hash, seed) = match &run {
        Some(r) => (r["scenario"].clone(), r["config_sha256"].clone(), r["seed"].clone()),
        None => {
            let (h, s) = tables
                .iter()
                .find_map(table_stamp)
                .ok_or_else(|| CliError::Report(format!("{} holds no kinspec run artifacts", dir.display())))?;
            (Value::Null, json!(h), json!(s))
        }
    };
    let mut missing = Vec::new();
    if run.is_none() {
        missing.push("run.json".to_string());
    }
    if let Some(list) = run.as_ref().and_then(|r| r["artifacts"].as_array()) {
        for a in list.iter().filter_map(Value::as_str) {
            if !dir.join(a).is_file() {
                missing.push(a.to_string());
            }
        }
    }
    let complete = missing.is_empty();
    let checks = run.as_ref().map_or(json!([]), |r| r["checks"].clone());
    let passed = complete && checks.as_array().is_some_and(|c| c.iter().all(|c| c["passed"] == json!(true)));

    let mut dat = String::new();
    let mut blocks = Vec::new();
    for (i, t) in tables.iter().enumerate() {
        if i > 0 {
            dat.push_str("\n\n");
        }
        dat.push_str(&data_block(t));
        blocks.push(json!({ "index": i, "name": t.name, "rows": t.rows.len() }));
    }

    let mut body = Map::new();
    body.insert("artifact".into(), json!("summary"));
    body.insert("scenario".into(), scenario);
    body.insert("config_sha256".into(), hash);
    body.insert("seed".into(), seed);
    body.insert("complete".into(), json!(complete));
    body.insert("missing".into(), json!(missing));
    body.insert("passed".into(), json!(passed));
    body.insert("checks".into(), checks);
    body.insert("run_summary".into(), run.as_ref().map_or(Value::Null, |r| r["summary"].clone()));
    body.insert("data_blocks".into(), json!(blocks));
    let summary = Value::Object(body);

    let target = out.unwrap_or(dir);
    std::fs::create_dir_all(target)?;
    write_json(&target.join("summary.json"), &summary)?;
    std::fs::write(target.join("summary.dat"), dat)?;
    Ok(summary)
}
