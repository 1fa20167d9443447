//! `validate`: checks standalone documents and whole bundle directories.
//!
//! The document kind is detected from its top-level shape.

use std::fs;
use std::path::Path;

use dla_core::bundle::collect_evidence;
use dla_core::bundle::load_bundle;
use dla_core::catalog::load_rights_vector;
use dla_core::catalog::LicenseTemplate;
use dla_core::document;
use dla_core::document::Strictness;
use dla_core::lineage::CaptureInput;
use dla_core::lineage::LineageDocument;
use dla_core::validate_provenance;
use dla_core::validate_rights_vector;
use dla_core::LineageGraph;
use dla_core::ProvenanceRecord;
use dla_core::UsageScenario;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::context::Context;
use crate::failure::catalog_code;
use crate::failure::class_code;
use crate::failure::document_code;
use crate::failure::EXIT_IO;
use crate::failure::EXIT_LINEAGE;
use crate::failure::EXIT_OK;
use crate::failure::EXIT_VALIDATION;

#[derive(Debug, Serialize)]
struct FileReport {
    path: String,
    kind: &'static str,
    ok: bool,
    #[serde(skip)]
    code: u8,
    errors: Vec<String>,
    warnings: Vec<String>,
}

impl FileReport {
    fn new(path: &Path, kind: &'static str) -> Self {
        Self {
            path: path.display().to_string(),
            kind,
            ok: true,
            code: EXIT_OK,
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn fail(&mut self, code: u8, msg: impl std::fmt::Display) {
        self.ok = false;
        self.code = self.code.max(code);
        self.errors.push(msg.to_string());
    }
}

fn detect_kind(value: &Value) -> &'static str {
    let has = |k: &str| value.get(k).is_some();
    match value {
        Value::Object(_) if has("records") || has("edges") || has("root") => "lineage",
        Value::Object(_) if has("license_id") => "template",
        Value::Object(_) if has("subject_kind") => "provenance",
        Value::Object(_) if has("subject_id") => "interpretation",
        Value::Object(_) if has("standalone_rights") || has("model_rights") => "rights-vector",
        Value::Array(items) => match items.first() {
            None => "capture-list",
            Some(first) if first.get("required_rights").is_some() => "scenarios",
            Some(_) => "capture-list",
        },
        _ => "unknown",
    }
}

fn parse_into<T: DeserializeOwned>(text: &str, strictness: Strictness, report: &mut FileReport) -> Option<T> {
    match document::parse::<T>(text, strictness) {
        Ok(parsed) => {
            report.warnings.extend(parsed.warnings);
            Some(parsed.value)
        }
        Err(e) => {
            report.fail(document_code(&e), e);
            None
        }
    }
}

fn validate_file(ctx: &Context, path: &Path) -> FileReport {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let mut r = FileReport::new(path, "unknown");
            r.fail(EXIT_IO, e);
            return r;
        }
    };
    let value: Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            let mut r = FileReport::new(path, "unknown");
            r.fail(EXIT_IO, format!("malformed JSON: {e}"));
            return r;
        }
    };
    let kind = detect_kind(&value);
    let mut r = FileReport::new(path, kind);
    let strictness = ctx.strictness;
    match kind {
        "lineage" => {
            if let Some(doc) = parse_into::<LineageDocument>(&text, strictness, &mut r) {
                for record in &doc.records {
                    for v in validate_provenance(record).iter() {
                        r.fail(EXIT_VALIDATION, format!("{}: {v}", record.subject_id));
                    }
                }
                if let Err(e) = LineageGraph::from_document(doc) {
                    r.fail(EXIT_LINEAGE, e);
                }
            }
        }
        "template" => {
            if let Some(t) = parse_into::<LicenseTemplate>(&text, strictness, &mut r) {
                for v in validate_rights_vector(&t.vector).iter() {
                    r.fail(EXIT_VALIDATION, format!("vector.{v}"));
                }
            }
        }
        "provenance" => {
            if let Some(record) = parse_into::<ProvenanceRecord>(&text, strictness, &mut r) {
                for v in validate_provenance(&record).iter() {
                    r.fail(EXIT_VALIDATION, v);
                }
            }
        }
        "interpretation" => match ctx.catalog.load_interpretation(&text, strictness) {
            Ok(loaded) => r.warnings.extend(loaded.warnings),
            Err(e) => r.fail(catalog_code(&e), e),
        },
        "rights-vector" => match load_rights_vector(&text, strictness) {
            Ok(parsed) => r.warnings.extend(parsed.warnings),
            Err(e) => r.fail(catalog_code(&e), e),
        },
        "capture-list" => {
            parse_into::<Vec<CaptureInput>>(&text, strictness, &mut r);
        }
        "scenarios" => {
            if let Some(scenarios) = parse_into::<Vec<UsageScenario>>(&text, strictness, &mut r) {
                let mut seen = std::collections::BTreeSet::new();
                for s in &scenarios {
                    if !seen.insert(&s.id) {
                        r.fail(EXIT_VALIDATION, format!("scenario `{}` listed more than once", s.id));
                    }
                }
            }
        }
        _ => r.fail(EXIT_VALIDATION, "unrecognized document kind"),
    }
    r
}

fn validate_bundle(ctx: &Context, dir: &Path) -> FileReport {
    let mut r = FileReport::new(dir, "bundle");
    let bundle =
        match load_bundle(&dir.join("lineage.json"), &dir.join("interpretations"), &ctx.catalog, ctx.strictness) {
            Ok(b) => b,
            Err(e) => {
                r.fail(class_code(e.class()), e);
                return r;
            }
        };
    r.warnings.extend(bundle.warnings);
    if let Err(e) = dla_core::verify(&bundle.graph, &bundle.interpretations, ctx.policy) {
        r.fail(EXIT_VALIDATION, e);
    }
    let captures = dir.join("captures");
    match collect_evidence(&bundle.graph, captures.is_dir().then_some(captures.as_path())) {
        Ok(evidence) => {
            for e in evidence {
                if let Some(err) = e.range_error {
                    r.fail(EXIT_VALIDATION, err);
                }
            }
        }
        Err(e) => r.fail(class_code(e.class()), e),
    }
    r
}

fn is_bundle(dir: &Path) -> bool {
    dir.join("lineage.json").is_file() && dir.join("interpretations").is_dir()
}

fn walk(ctx: &Context, path: &Path, out: &mut Vec<FileReport>) {
    if path.is_dir() {
        if is_bundle(path) {
            out.push(validate_bundle(ctx, path));
            return;
        }
        let mut entries: Vec<_> = match fs::read_dir(path) {
            Ok(rd) => rd.filter_map(Result::ok).map(|e| e.path()).collect(),
            Err(e) => {
                let mut r = FileReport::new(path, "directory");
                r.fail(EXIT_IO, e);
                out.push(r);
                return;
            }
        };
        entries.sort();
        for entry in entries {
            if entry.is_dir() || entry.extension().is_some_and(|x| x == "json") {
                walk(ctx, &entry, out);
            }
        }
    } else {
        out.push(validate_file(ctx, path));
    }
}

pub fn cmd_validate(ctx: &Context, paths: &[std::path::PathBuf]) -> u8 {
    let mut reports = Vec::new();
    for path in paths {
        walk(ctx, path, &mut reports);
    }
    match ctx.format {
        Format::Json => print!("{}", document::to_canonical_string(&reports)),
        Format::Markdown => {
            for r in &reports {
                println!("{} {} ({})", if r.ok { "ok  " } else { "FAIL" }, r.path, r.kind);
                for e in &r.errors {
                    println!("  error: {e}");
                }
                for w in &r.warnings {
                    println!("  warning: {w}");
                }
            }
        }
    }
    reports.iter().map(|r| r.code).max().unwrap_or(EXIT_OK)
}
