//! Lineage graphs, license ranges and capture selection.
//!
//! An edge `parent -> child` means the parent collected data from the child.
//! The root is the dataset under analysis; every other node is one of its
//! (transitive) data sources.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;
use serde::Serialize;

use crate::provenance::ProvenanceRecord;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub parent: String,
    pub child: String,
}

impl Edge {
    pub fn new(parent: impl Into<String>, child: impl Into<String>) -> Self {
        Self { parent: parent.into(), child: child.into() }
    }
}

/// The on-disk lineage document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineageDocument {
    pub root: String,
    pub records: Vec<ProvenanceRecord>,
    #[serde(default)]
    pub edges: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LineageError {
    #[error("cycle detected: {}", .cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("dangling reference to `{id}`")]
    DanglingReference { id: String },
    #[error("node `{id}` is not reachable from the root")]
    UnreachableNode { id: String },
    #[error("duplicate subject id `{id}`")]
    DuplicateNode { id: String },
    #[error("root `{root}` has an incoming edge from `{parent}`")]
    RootHasParent { root: String, parent: String },
}

/// A validated lineage DAG. Nodes and edges are kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineageGraph {
    root_id: String,
    nodes: BTreeMap<String, ProvenanceRecord>,
    edges: Vec<Edge>,
}

impl LineageGraph {
    pub fn root_id(&self) -> &str {
        &self.root_id
    }

    pub fn root(&self) -> &ProvenanceRecord {
        &self.nodes[&self.root_id]
    }

    pub fn nodes(&self) -> &BTreeMap<String, ProvenanceRecord> {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&ProvenanceRecord> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    pub fn children<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |e| e.parent == id).map(|e| e.child.as_str())
    }

    pub fn parents<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.edges.iter().filter(move |e| e.child == id).map(|e| e.parent.as_str())
    }

    pub fn to_document(&self) -> LineageDocument {
        LineageDocument {
            root: self.root_id.clone(),
            records: self.nodes.values().cloned().collect(),
            edges: self.edges.clone(),
        }
    }

    pub fn from_document(doc: LineageDocument) -> Result<Self, LineageError> {
        build_lineage(doc.records, doc.edges, &doc.root)
    }
}

/// Builds and validates a lineage graph. The result does not depend on the
/// order of `records` or `edges`; duplicate edges collapse.
pub fn build_lineage(
    records: Vec<ProvenanceRecord>,
    edges: Vec<Edge>,
    root: &str,
) -> Result<LineageGraph, LineageError> {
    let mut nodes = BTreeMap::new();
    let mut duplicates = BTreeSet::new();
    for r in records {
        let id = r.subject_id.clone();
        if nodes.insert(id.clone(), r).is_some() {
            duplicates.insert(id);
        }
    }
    if let Some(id) = duplicates.into_iter().next() {
        return Err(LineageError::DuplicateNode { id });
    }

    let edges: Vec<Edge> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();

    if !nodes.contains_key(root) {
        return Err(LineageError::DanglingReference { id: root.to_string() });
    }
    let mut dangling = BTreeSet::new();
    for e in &edges {
        for id in [&e.parent, &e.child] {
            if !nodes.contains_key(id) {
                dangling.insert(id.clone());
            }
        }
    }
    if let Some(id) = dangling.into_iter().next() {
        return Err(LineageError::DanglingReference { id });
    }

    let mut adjacency: BTreeMap<&str, Vec<&str>> = nodes.keys().map(|k| (k.as_str(), Vec::new())).collect();
    for e in &edges {
        adjacency.get_mut(e.parent.as_str()).expect("checked above").push(e.child.as_str());
    }

    if let Some(cycle) = find_cycle(&adjacency) {
        return Err(LineageError::CycleDetected { cycle });
    }

    if let Some(e) = edges.iter().find(|e| e.child == root) {
        return Err(LineageError::RootHasParent { root: root.to_string(), parent: e.parent.clone() });
    }

    let mut reached = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        for &child in &adjacency[id] {
            if reached.insert(child) {
                stack.push(child);
            }
        }
    }
    if let Some(id) = nodes.keys().find(|k| !reached.contains(k.as_str())) {
        return Err(LineageError::UnreachableNode { id: id.clone() });
    }

    Ok(LineageGraph { root_id: root.to_string(), nodes, edges })
}

/// Iterative three-colour DFS. Returns one cycle, closed (first == last).
fn find_cycle(adjacency: &BTreeMap<&str, Vec<&str>>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Colour {
        White,
        Grey,
        Black,
    }
    let mut colour: BTreeMap<&str, Colour> = adjacency.keys().map(|k| (*k, Colour::White)).collect();

    for &start in adjacency.keys() {
        if colour[start] != Colour::White {
            continue;
        }
        // (node, index of next child to visit)
        let mut path: Vec<(&str, usize)> = vec![(start, 0)];
        colour.insert(start, Colour::Grey);
        while let Some((node, next)) = path.last_mut() {
            let children = &adjacency[*node];
            if *next < children.len() {
                let child = children[*next];
                *next += 1;
                match colour[child] {
                    Colour::White => {
                        colour.insert(child, Colour::Grey);
                        path.push((child, 0));
                    }
                    Colour::Grey => {
                        let from = path.iter().position(|(n, _)| *n == child).expect("grey nodes are on the path");
                        let mut cycle: Vec<String> = path[from..].iter().map(|(n, _)| n.to_string()).collect();
                        cycle.push(child.to_string());
                        return Some(cycle);
                    }
                    Colour::Black => {}
                }
            } else {
                colour.insert(*node, Colour::Black);
                path.pop();
            }
        }
    }
    None
}

/// Two consecutive years `[end - 1, end]` during which a dataset's content
/// was likely collected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct LicenseRange {
    start_year: i32,
    end_year: i32,
}

#[derive(Deserialize)]
struct RawRange {
    start_year: i32,
    end_year: i32,
}

impl TryFrom<RawRange> for LicenseRange {
    type Error = String;

    fn try_from(raw: RawRange) -> Result<Self, Self::Error> {
        if raw.end_year.checked_sub(1) != Some(raw.start_year) {
            return Err(format!(
                "license range must span two consecutive years, got {}-{}",
                raw.start_year, raw.end_year
            ));
        }
        Ok(LicenseRange::ending(raw.end_year))
    }
}

impl LicenseRange {
    /// The range ending at `origin_year`.
    pub fn ending(origin_year: i32) -> Self {
        Self { start_year: origin_year - 1, end_year: origin_year }
    }

    pub fn start_year(self) -> i32 {
        self.start_year
    }

    pub fn end_year(self) -> i32 {
        self.end_year
    }

    pub fn contains(self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }
}

impl fmt::Display for LicenseRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start_year, self.end_year)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RangeError {
    #[error("unknown node `{id}`")]
    UnknownNode { id: String },
    #[error("dataset `{id}` has no origin year")]
    MissingOriginYear { id: String },
    #[error("data source `{id}` has no dataset ancestor")]
    NoDatasetAncestor { id: String },
    #[error("data source `{id}` has nearest dataset ancestors with different ranges: {}", fmt_candidates(.candidates))]
    AmbiguousRange { id: String, candidates: Vec<(String, LicenseRange)> },
}

fn fmt_candidates(c: &[(String, LicenseRange)]) -> String {
    c.iter().map(|(id, r)| format!("{id} ({r})")).collect::<Vec<_>>().join(", ")
}

/// Datasets use their own origin year. Websites and search engines inherit
/// the range of their nearest dataset ancestor.
pub fn compute_license_range(node_id: &str, graph: &LineageGraph) -> Result<LicenseRange, RangeError> {
    let node = graph.node(node_id).ok_or_else(|| RangeError::UnknownNode { id: node_id.to_string() })?;
    if node.subject_kind.is_dataset() {
        return own_range(node);
    }

    let mut visited = BTreeSet::from([node_id]);
    let mut frontier: Vec<&str> = vec![node_id];
    while !frontier.is_empty() {
        let mut next = BTreeSet::new();
        for id in &frontier {
            for parent in graph.parents(id) {
                if visited.insert(parent) {
                    next.insert(parent);
                }
            }
        }
        let datasets: Vec<&ProvenanceRecord> =
            next.iter().filter_map(|id| graph.node(id)).filter(|r| r.subject_kind.is_dataset()).collect();
        if !datasets.is_empty() {
            let mut candidates = Vec::with_capacity(datasets.len());
            for d in datasets {
                candidates.push((d.subject_id.clone(), own_range(d)?));
            }
            let distinct: BTreeSet<LicenseRange> = candidates.iter().map(|(_, r)| *r).collect();
            if distinct.len() == 1 {
                return Ok(candidates[0].1);
            }
            return Err(RangeError::AmbiguousRange { id: node_id.to_string(), candidates });
        }
        // only non-dataset parents at this depth: keep climbing through them
        frontier = next.into_iter().collect();
    }
    Err(RangeError::NoDatasetAncestor { id: node_id.to_string() })
}

fn own_range(record: &ProvenanceRecord) -> Result<LicenseRange, RangeError> {
    record
        .origin_year
        .map(LicenseRange::ending)
        .ok_or_else(|| RangeError::MissingOriginYear { id: record.subject_id.clone() })
}

/// Ranges for every node, in node order.
pub fn compute_all_ranges(graph: &LineageGraph) -> BTreeMap<String, Result<LicenseRange, RangeError>> {
    graph.node_ids().map(|id| (id.to_string(), compute_license_range(id, graph))).collect()
}

/// One archived license snapshot as supplied by the evidence collector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureInput {
    pub year: i32,
    pub url: String,
    pub content: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaptureStatus {
    InRange,
    OutOfRangeFallback,
    Unavailable,
}

/// The capture chosen for a data source. Year, URL and content are absent
/// exactly when the status is `unavailable`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCapture")]
pub struct LicenseCapture {
    pub source_id: String,
    pub capture_year: Option<i32>,
    pub capture_url: Option<String>,
    pub content: Option<String>,
    pub status: CaptureStatus,
}

#[derive(Deserialize)]
struct RawCapture {
    source_id: String,
    capture_year: Option<i32>,
    capture_url: Option<String>,
    content: Option<String>,
    status: CaptureStatus,
}

impl TryFrom<RawCapture> for LicenseCapture {
    type Error = String;

    fn try_from(raw: RawCapture) -> Result<Self, Self::Error> {
        let unavailable = raw.status == CaptureStatus::Unavailable;
        if unavailable != raw.content.is_none() {
            return Err("status is unavailable iff content is absent".to_string());
        }
        if unavailable != raw.capture_year.is_none() || unavailable != raw.capture_url.is_none() {
            return Err("capture_year and capture_url are absent iff status is unavailable".to_string());
        }
        Ok(LicenseCapture {
            source_id: raw.source_id,
            capture_year: raw.capture_year,
            capture_url: raw.capture_url,
            content: raw.content,
            status: raw.status,
        })
    }
}

/// Earliest capture inside the range; otherwise the earliest capture at
/// all; otherwise `unavailable`. Same-year ties go to the smallest URL.
pub fn select_capture(source_id: &str, captures: &[CaptureInput], range: LicenseRange) -> LicenseCapture {
    let earliest = |it: &mut dyn Iterator<Item = &CaptureInput>| {
        it.min_by(|a, b| (a.year, &a.url).cmp(&(b.year, &b.url))).cloned()
    };

    let (chosen, status) = match earliest(&mut captures.iter().filter(|c| range.contains(c.year))) {
        Some(c) => (Some(c), CaptureStatus::InRange),
        None => match earliest(&mut captures.iter()) {
            Some(c) => (Some(c), CaptureStatus::OutOfRangeFallback),
            None => (None, CaptureStatus::Unavailable),
        },
    };
    LicenseCapture {
        source_id: source_id.to_string(),
        capture_year: chosen.as_ref().map(|c| c.year),
        capture_url: chosen.as_ref().map(|c| c.url.clone()),
        content: chosen.map(|c| c.content),
        status,
    }
}
