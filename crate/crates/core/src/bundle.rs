//! Loading an analysis bundle from disk: a lineage document, a directory of
//! interpretation documents (one `*.json` per subject) and, optionally, a
//! directory of per-source capture lists (`<subject_id>.json`).

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;
use std::path::PathBuf;

use serde::Serialize;

use crate::catalog::Catalog;
use crate::catalog::CatalogError;
use crate::document;
use crate::document::DocumentError;
use crate::document::Strictness;
use crate::engine::Interpretations;
use crate::engine::NodeInterpretation;
use crate::lineage::compute_license_range;
use crate::lineage::select_capture;
use crate::lineage::CaptureInput;
use crate::lineage::LicenseCapture;
use crate::lineage::LineageDocument;
use crate::lineage::LineageError;
use crate::lineage::LineageGraph;
use crate::lineage::RangeError;
use crate::provenance::validate_provenance;
use crate::validation::ValidationReport;

#[derive(Debug, thiserror::Error)]
pub enum BundleError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Document {
        path: PathBuf,
        #[source]
        source: DocumentError,
    },
    #[error("{path}: {source}")]
    Lineage {
        path: PathBuf,
        #[source]
        source: LineageError,
    },
    #[error("{path}: invalid provenance for `{subject_id}`: {report}")]
    Provenance { path: PathBuf, subject_id: String, report: ValidationReport },
    #[error("{path}: {source}")]
    Interpretation {
        path: PathBuf,
        #[source]
        source: CatalogError,
    },
    #[error("{path}: second interpretation for `{subject_id}`")]
    DuplicateInterpretation { path: PathBuf, subject_id: String },
}

/// Coarse failure classes, used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureClass {
    /// Unreadable file or malformed JSON.
    Io,
    /// Well-formed input that breaks a schema rule.
    Validation,
    /// Structural lineage failure (cycle, dangling reference, ...).
    Lineage,
}

impl BundleError {
    pub fn class(&self) -> FailureClass {
        match self {
            BundleError::Io { .. } => FailureClass::Io,
            BundleError::Document { source, .. } if source.is_syntax() => FailureClass::Io,
            BundleError::Interpretation { source: CatalogError::Parse(e), .. } if e.is_syntax() => FailureClass::Io,
            BundleError::Interpretation { source: CatalogError::Io { .. }, .. } => FailureClass::Io,
            BundleError::Lineage { .. } => FailureClass::Lineage,
            _ => FailureClass::Validation,
        }
    }
}

fn read(path: &Path) -> Result<String, BundleError> {
    fs::read_to_string(path).map_err(|source| BundleError::Io { path: path.to_path_buf(), source })
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, BundleError> {
    let io = |source| BundleError::Io { path: dir.to_path_buf(), source };
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

/// Parses, validates and builds a lineage graph. Warnings come from lenient
/// parsing.
pub fn load_lineage(path: &Path, strictness: Strictness) -> Result<(LineageGraph, Vec<String>), BundleError> {
    let text = read(path)?;
    let parsed = document::parse::<LineageDocument>(&text, strictness)
        .map_err(|source| BundleError::Document { path: path.to_path_buf(), source })?;
    for record in &parsed.value.records {
        let report = validate_provenance(record);
        if !report.is_clean() {
            return Err(BundleError::Provenance {
                path: path.to_path_buf(),
                subject_id: record.subject_id.clone(),
                report,
            });
        }
    }
    let graph = LineageGraph::from_document(parsed.value)
        .map_err(|source| BundleError::Lineage { path: path.to_path_buf(), source })?;
    Ok((graph, parsed.warnings))
}

/// Template usage recorded for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateUse {
    pub subject_id: String,
    pub license_id: String,
    pub version: String,
    pub digest: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedInterpretations {
    pub interpretations: Interpretations,
    pub templates: Vec<TemplateUse>,
    pub warnings: Vec<String>,
}

pub fn load_interpretations(
    dir: &Path,
    catalog: &Catalog,
    strictness: Strictness,
) -> Result<LoadedInterpretations, BundleError> {
    let mut out = LoadedInterpretations::default();
    for path in json_files(dir)? {
        let text = read(&path)?;
        let loaded = catalog
            .load_interpretation(&text, strictness)
            .map_err(|source| BundleError::Interpretation { path: path.clone(), source })?;
        let subject_id = loaded.subject_id.clone();
        if out.interpretations.contains_key(&subject_id) {
            return Err(BundleError::DuplicateInterpretation { path, subject_id });
        }
        out.warnings.extend(loaded.warnings.into_iter().map(|w| format!("{}: {w}", path.display())));
        if let Some((license_id, version, digest)) = loaded.template {
            out.templates.push(TemplateUse { subject_id: subject_id.clone(), license_id, version, digest });
        }
        let node = match loaded.vector {
            Some(v) => NodeInterpretation::Interpreted(v),
            None => NodeInterpretation::Unavailable,
        };
        out.interpretations.insert(subject_id, node);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Bundle {
    pub graph: LineageGraph,
    pub interpretations: Interpretations,
    pub templates: Vec<TemplateUse>,
    pub warnings: Vec<String>,
}

pub fn load_bundle(
    lineage_path: &Path,
    interpretations_dir: &Path,
    catalog: &Catalog,
    strictness: Strictness,
) -> Result<Bundle, BundleError> {
    let (graph, mut warnings) = load_lineage(lineage_path, strictness)?;
    let loaded = load_interpretations(interpretations_dir, catalog, strictness)?;
    warnings.extend(loaded.warnings);
    Ok(Bundle { graph, interpretations: loaded.interpretations, templates: loaded.templates, warnings })
}

/// License range and chosen capture for one node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeEvidence {
    pub subject_id: String,
    pub range: Option<crate::lineage::LicenseRange>,
    pub range_error: Option<String>,
    pub capture: Option<LicenseCapture>,
}

/// Computes every node's range and, when `captures_dir` is given, selects
/// the applicable capture from `<captures_dir>/<subject_id>.json` (missing
/// file = no captures).
pub fn collect_evidence(graph: &LineageGraph, captures_dir: Option<&Path>) -> Result<Vec<NodeEvidence>, BundleError> {
    let mut out = Vec::new();
    for id in graph.node_ids() {
        let range: Result<_, RangeError> = compute_license_range(id, graph);
        let capture = match (captures_dir, &range) {
            (Some(dir), Ok(range)) => {
                let path = dir.join(format!("{id}.json"));
                let captures: Vec<CaptureInput> = if path.exists() {
                    document::from_str(&read(&path)?).map_err(|source| BundleError::Document { path, source })?
                } else {
                    Vec::new()
                };
                Some(select_capture(id, &captures, *range))
            }
            _ => None,
        };
        out.push(NodeEvidence {
            subject_id: id.to_string(),
            range: range.as_ref().ok().copied(),
            range_error: range.err().map(|e| e.to_string()),
            capture,
        });
    }
    Ok(out)
}

/// Loads every bundle under `root` that has a `lineage.json` and an
/// `interpretations/` directory, keyed by directory name.
pub fn bundle_dirs(root: &Path) -> io::Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(root)? {
        let path = entry?.path();
        if path.join("lineage.json").is_file() && path.join("interpretations").is_dir() {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                out.insert(name.to_string(), path);
            }
        }
    }
    Ok(out)
}
