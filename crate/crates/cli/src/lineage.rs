//! `lineage` and `range`.

use std::fmt::Write as _;
use std::path::Path;

use dla_core::bundle::collect_evidence;
use dla_core::bundle::load_lineage;
use dla_core::bundle::NodeEvidence;
use dla_core::document;
use dla_core::lineage::CaptureStatus;
use dla_core::lineage::Edge;
use dla_core::provenance::SubjectKind;
use dla_core::LicenseRange;
use dla_core::LineageGraph;
use serde::Serialize;

use crate::args::Format;
use crate::context::lineage_path;
use crate::context::warn;
use crate::context::Context;
use crate::failure::Failure;
use crate::failure::EXIT_OK;
use crate::failure::EXIT_VALIDATION;

fn load(ctx: &Context, input: &Path) -> Result<LineageGraph, Failure> {
    let (graph, warnings) = load_lineage(&lineage_path(input), ctx.strictness)?;
    for w in warnings {
        warn(w);
    }
    Ok(graph)
}

fn kind_str(kind: SubjectKind) -> &'static str {
    match kind {
        SubjectKind::Dataset => "dataset",
        SubjectKind::Website => "website",
        SubjectKind::SearchEngine => "search_engine",
    }
}

fn range_cell(e: &NodeEvidence) -> String {
    match (&e.range, &e.range_error) {
        (Some(r), _) => r.to_string(),
        (None, Some(err)) => format!("error: {err}"),
        (None, None) => String::new(),
    }
}

#[derive(Serialize)]
struct RangeRow<'a> {
    subject_id: &'a str,
    range: Option<LicenseRange>,
    error: Option<&'a str>,
}

pub fn cmd_range(ctx: &Context, input: &Path) -> Result<u8, Failure> {
    let graph = load(ctx, input)?;
    let evidence = collect_evidence(&graph, None)?;
    match ctx.format {
        Format::Json => {
            let rows: Vec<RangeRow> = evidence
                .iter()
                .map(|e| RangeRow { subject_id: &e.subject_id, range: e.range, error: e.range_error.as_deref() })
                .collect();
            print!("{}", document::to_canonical_string(&rows));
        }
        Format::Markdown => {
            let mut out = String::from("| Node | License range |\n|---|---|\n");
            for e in &evidence {
                let _ = writeln!(out, "| {} | {} |", e.subject_id, range_cell(e));
            }
            print!("{out}");
        }
    }
    let failed = evidence.iter().any(|e| e.range_error.is_some());
    Ok(if failed { EXIT_VALIDATION } else { EXIT_OK })
}

#[derive(Serialize)]
struct LineageNode<'a> {
    subject_id: &'a str,
    subject_kind: SubjectKind,
    dataset_name: &'a str,
    #[serde(flatten)]
    evidence: &'a NodeEvidence,
}

#[derive(Serialize)]
struct LineageReport<'a> {
    root: &'a str,
    nodes: Vec<LineageNode<'a>>,
    edges: &'a [Edge],
}

fn capture_cell(e: &NodeEvidence) -> String {
    let Some(c) = &e.capture else {
        return String::new();
    };
    let year = c.capture_year.map(|y| y.to_string()).unwrap_or_default();
    let url = c.capture_url.as_deref().unwrap_or("");
    match c.status {
        CaptureStatus::InRange => format!("in range: {year} {url}"),
        CaptureStatus::OutOfRangeFallback => format!("out of range, earliest: {year} {url}"),
        CaptureStatus::Unavailable => "unavailable".to_string(),
    }
}

pub fn cmd_lineage(ctx: &Context, input: &Path, captures: Option<&Path>) -> Result<u8, Failure> {
    let graph = load(ctx, input)?;
    let default_captures = input.is_dir().then(|| input.join("captures")).filter(|p| p.is_dir());
    let captures = captures.map(Path::to_path_buf).or(default_captures);
    if let Some(dir) = &captures {
        if !dir.is_dir() {
            return Err(Failure::io(format!("{}: not a directory", dir.display())));
        }
    }
    let evidence = collect_evidence(&graph, captures.as_deref())?;

    match ctx.format {
        Format::Json => {
            let nodes = evidence
                .iter()
                .map(|e| {
                    let record = graph.node(&e.subject_id).expect("evidence covers graph nodes");
                    LineageNode {
                        subject_id: &e.subject_id,
                        subject_kind: record.subject_kind,
                        dataset_name: &record.dataset_name,
                        evidence: e,
                    }
                })
                .collect();
            let report = LineageReport { root: graph.root_id(), nodes, edges: graph.edges() };
            print!("{}", document::to_canonical_string(&report));
        }
        Format::Markdown => {
            let root = graph.root();
            let mut out = format!("## Lineage of {} (`{}`)\n\n", root.dataset_name, root.subject_id);
            out.push_str("| Node | Kind | Name | License range | Capture |\n|---|---|---|---|---|\n");
            for e in &evidence {
                let record = graph.node(&e.subject_id).expect("evidence covers graph nodes");
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} |",
                    e.subject_id,
                    kind_str(record.subject_kind),
                    record.dataset_name,
                    range_cell(e),
                    capture_cell(e),
                );
            }
            if !graph.edges().is_empty() {
                out.push_str("\nCollected from:\n");
                for edge in graph.edges() {
                    let _ = writeln!(out, "- {} <- {}", edge.parent, edge.child);
                }
            }
            print!("{out}");
        }
    }
    Ok(EXIT_OK)
}
