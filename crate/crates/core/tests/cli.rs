use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qrac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrac"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qrac(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    serde_json::from_str(&stdout(&full)).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qrac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn classical_values() {
    assert!(stdout(&["classical", "--n", "2", "--d", "4"]).contains("= 0.625000"));
    assert!(stdout(&["classical", "--n", "9", "--d", "8"]).contains("0.311789"));
    let v = json(&["classical", "--n", "3", "--d", "2", "--oracle"]);
    assert_eq!(v["value"], 0.75);
    assert_eq!(v["oracle"]["agrees"], true);
}

#[test]
fn oversized_oracle_is_usage_error() {
    let out = qrac(&["classical", "--n", "6", "--d", "5", "--oracle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table1_rows() {
    let rows = csv_rows(&stdout(&["--format", "csv", "table1"]));
    assert_eq!(rows[0], ["d", "pQ", "pC", "ratio"]);
    let d3 = &rows[2];
    assert_eq!(d3[0], "3");
    let pc: f64 = d3[2].parse().unwrap();
    let r: f64 = d3[3].parse().unwrap();
    assert!((pc - 0.593).abs() < 5e-4 && (r - 1.075).abs() < 5e-4);
    let d5: f64 = rows[4][3].parse().unwrap();
    assert!((d5 - 1.0953).abs() < 5e-5);
}

#[test]
fn family_csv() {
    let rows = csv_rows(&stdout(&["--format", "csv", "q2", "--d-range", "2..40"]));
    assert_eq!(rows[0], ["d", "pQ_avg", "pQ_worst", "pC", "ratio"]);
    assert_eq!(rows.len(), 40);
    let best = rows[1..]
        .iter()
        .max_by(|a, b| {
            a[4].parse::<f64>()
                .unwrap()
                .total_cmp(&b[4].parse().unwrap())
        })
        .unwrap();
    assert_eq!(best[0], "6");
    let q6 = json(&["q2", "--d", "6"]);
    assert!((q6["rows"][0]["ratio"].as_f64().unwrap() - 1.207).abs() < 5e-4);
    let q13 = json(&["q3", "--d", "13"]);
    assert!((q13["rows"][0]["ratio"].as_f64().unwrap() - 1.224).abs() < 2e-3);
}

#[test]
fn range_cap() {
    assert_eq!(qrac(&["q3", "--d-range", "60..65"]).status.code(), Some(2));
    assert_eq!(qrac(&["q2", "--d", "1"]).status.code(), Some(2));
}

#[test]
fn seesaw_runs() {
    let v = json(&[
        "--seed",
        "7",
        "seesaw",
        "--n",
        "2",
        "--d",
        "3",
        "--restarts",
        "50",
    ]);
    let closed = 0.5 * (1.0 + 1.0 / 3f64.sqrt());
    assert!((v["best"].as_f64().unwrap() - closed).abs() < 1e-3);
    let v = json(&[
        "--seed",
        "1",
        "seesaw",
        "--n",
        "2",
        "--d",
        "2",
        "--restarts",
        "1",
        "--iters",
        "0",
    ]);
    let best = v["best"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&best));
    assert_eq!(v["trace"].as_array().unwrap().len(), 1);
}

#[test]
fn deterministic_output() {
    for args in [
        &[
            "--seed",
            "3",
            "seesaw",
            "--n",
            "3",
            "--d",
            "2",
            "--restarts",
            "4",
        ][..],
        &["--format", "csv", "q3", "--d-range", "2..6"][..],
        &["experiment"][..],
    ] {
        assert_eq!(stdout(args), stdout(args));
    }
}

#[test]
fn experiment_default_and_bad_data() {
    let v = json(&["experiment"]);
    assert!((v["mean"].as_f64().unwrap() - 0.754).abs() < 0.005);
    assert_eq!(v["classical_bound_violated"], true);

    let shipped = qrac::experiment::TABLE2_CSV;
    let truncated = scratch("truncated.csv");
    std::fs::write(
        &truncated,
        shipped.lines().take(10).collect::<Vec<_>>().join("\n"),
    )
    .unwrap();
    let out = qrac(&["experiment", "--data", truncated.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let bad = scratch("bad.csv");
    std::fs::write(&bad, shipped.replacen("0.786,0.036", "1.2,0.036", 1)).unwrap();
    let out = qrac(&["experiment", "--data", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 16"));
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("table1.csv");
    let out = qrac(&["--format", "csv", "--out", path.to_str().unwrap(), "table1"]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .starts_with("d,pQ,pC,ratio\n"));
}

#[test]
fn usage_errors() {
    assert_eq!(qrac(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qrac(&["seesaw", "--n", "2"]).status.code(), Some(2));
    assert_eq!(
        qrac(&["seesaw", "--n", "2", "--d", "2", "--restarts", "0"])
            .status
            .code(),
        Some(2)
    );
}

fn schema() -> Value {
    let text = include_str!("../docs/output.schema.json");
    serde_json::from_str(text).unwrap()
}

/// Required keys present, no undeclared keys, recursively through `rows`/`oracle`.
fn conforms(value: &Value, def: &Value, defs: &Value) {
    let def = match def.get("$ref").and_then(Value::as_str) {
        Some(r) => &defs[r.trim_start_matches("#/$defs/")],
        None => def,
    };
    match def["type"].as_str() {
        Some("object") => {
            let obj = value.as_object().expect("object");
            for key in def["required"].as_array().unwrap() {
                assert!(obj.contains_key(key.as_str().unwrap()), "missing {key}");
            }
            for (k, v) in obj {
                let sub = def["properties"]
                    .get(k)
                    .unwrap_or_else(|| panic!("undeclared {k}"));
                conforms(v, sub, defs);
            }
        }
        Some("array") => {
            for item in value.as_array().expect("array") {
                conforms(item, &def["items"], defs);
            }
        }
        Some("integer") => assert!(value.is_u64(), "{value} not an integer"),
        Some("number") => assert!(value.is_number()),
        Some("boolean") => assert!(value.is_boolean()),
        Some("string") => assert!(value.is_string()),
        _ => {}
    }
    if let (Some(min), Some(x)) = (def["minimum"].as_f64(), value.as_f64()) {
        assert!(x >= min, "{x} < {min}");
    }
    if let (Some(max), Some(x)) = (def["maximum"].as_f64(), value.as_f64()) {
        assert!(x <= max, "{x} > {max}");
    }
}

#[test]
fn json_matches_schema() {
    let s = schema();
    let defs = &s["$defs"];
    let cases: [(&str, &[&str]); 6] = [
        (
            "classical",
            &["classical", "--n", "3", "--d", "2", "--oracle"],
        ),
        ("table1", &["table1"]),
        ("family", &["q2", "--d-range", "2..5"]),
        ("family", &["q3", "--d-range", "8..10"]),
        (
            "seesaw",
            &["seesaw", "--n", "2", "--d", "2", "--restarts", "2"],
        ),
        ("experiment", &["experiment"]),
    ];
    for (def, args) in cases {
        conforms(&json(args), &defs[def], defs);
    }
}
