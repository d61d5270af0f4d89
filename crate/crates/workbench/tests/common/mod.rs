#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use recollement_workbench::corpus;
use serde_json::Value;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn cli(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_recollement")).args(args).output().expect("binary runs");
    Output {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

/// A shipped scenario as a JSON value, to derive variants from.
pub fn builtin_value(name: &str) -> Value {
    serde_json::from_str(corpus::builtin(name).expect("builtin")).unwrap()
}

/// The z-example with its modules, hints and strategy replaced.
pub fn integer_variant(name: &str, b: Value, c: Value, strategies: Value) -> Value {
    let mut v = builtin_value("z-example");
    v["name"] = name.into();
    v["modules"] = serde_json::json!({ "B": b, "C": c });
    v["hints"] = serde_json::json!({});
    v["strategies"] = strategies;
    v["testset"] = serde_json::json!({ "size": "20" });
    v
}

pub fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("workbench-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn write_scenario(v: &Value) -> PathBuf {
    let name = format!("{}.json", v["name"].as_str().expect("named"));
    write_temp(&name, &serde_json::to_string_pretty(v).unwrap())
}
