#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::path::PathBuf;
use std::process::Command;
use std::process::Output;

use serde_json::json;
use serde_json::Value;

pub use dla_testkit::fixtures_dir;

pub const FIXED_RIGHTS: [&str; 11] = [
    "Access",
    "Tagging",
    "Distribute",
    "Rerepresent",
    "Benchmark",
    "Research",
    "Publish",
    "InternalUse",
    "CommercializeOutput",
    "CommercializeModel",
    "ModelReverseEngineer",
];

pub fn fixture(name: &str) -> PathBuf {
    fixtures_dir().join(name)
}

/// Runs the binary with a clean store environment.
pub fn dla<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_dla")).args(args).env_remove("DLA_STORE").output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

pub fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

pub fn record(id: &str, kind: &str, year: Option<i32>) -> Value {
    json!({
        "subject_id": id,
        "subject_kind": kind,
        "dataset_name": id,
        "origin_year": year,
        "origin_url": "",
        "description": "",
        "collection_process": "",
        "notes": "",
        "license_found_via": "none_found",
    })
}

pub fn vector(name: &str, grant: &str) -> Value {
    let rights = |names: &[&str]| -> Value {
        names.iter().map(|r| (r.to_string(), json!({ "grant": grant }))).collect::<serde_json::Map<_, _>>().into()
    };
    json!({
        "metadata": { "licensor": "someone", "license_name": "some license", "dataset_name": name },
        "standalone_rights": rights(&FIXED_RIGHTS[..4]),
        "model_rights": rights(&FIXED_RIGHTS[4..]),
    })
}

pub fn write_json(path: &Path, value: &Value) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(path, serde_json::to_string_pretty(value).unwrap()).unwrap();
}

/// Writes a bundle: lineage document plus one interpretation per entry.
pub fn write_bundle(dir: &Path, root: &str, records: Vec<Value>, edges: &[(&str, &str)], interps: &[(&str, Value)]) {
    let edges: Vec<Value> = edges.iter().map(|(p, c)| json!({ "parent": p, "child": c })).collect();
    write_json(&dir.join("lineage.json"), &json!({ "root": root, "records": records, "edges": edges }));
    for (id, doc) in interps {
        write_json(&dir.join("interpretations").join(format!("{id}.json")), doc);
    }
}

/// A one-node bundle whose license grants everything.
pub fn permissive_bundle(dir: &Path) {
    write_bundle(
        dir,
        "open",
        vec![record("open", "dataset", Some(2020))],
        &[],
        &[("open", json!({ "subject_id": "open", "vector": vector("open", "granted") }))],
    );
}

/// A two-node bundle whose lineage is cyclic.
pub fn cyclic_bundle(dir: &Path) {
    write_bundle(
        dir,
        "a",
        vec![record("a", "dataset", Some(2020)), record("b", "dataset", Some(2019))],
        &[("a", "b"), ("b", "a")],
        &[
            ("a", json!({ "subject_id": "a", "vector": vector("a", "granted") })),
            ("b", json!({ "subject_id": "b", "vector": vector("b", "granted") })),
        ],
    );
}

/// A one-node bundle whose interpretation lacks a fixed right.
pub fn malformed_vector_bundle(dir: &Path) {
    let mut v = vector("broken", "granted");
    v["model_rights"].as_object_mut().unwrap().remove("CommercializeModel");
    write_bundle(
        dir,
        "broken",
        vec![record("broken", "dataset", Some(2020))],
        &[],
        &[("broken", json!({ "subject_id": "broken", "vector": v }))],
    );
}
