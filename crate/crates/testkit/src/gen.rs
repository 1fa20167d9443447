//! Random lineage graphs, rights vectors and interpretations.

use dla_core::build_lineage;
use dla_core::engine::Interpretations;
use dla_core::lineage::Edge;
use dla_core::provenance::Digest;
use dla_core::provenance::SubjectKind;
use dla_core::rights::Grant;
use dla_core::rights::LicenseMetadata;
use dla_core::rights::Obligation;
use dla_core::rights::ObligationKind;
use dla_core::rights::RightEntry;
use dla_core::LineageGraph;
use dla_core::NodeInterpretation;
use dla_core::ProvenanceRecord;
use dla_core::RightName;
use dla_core::RightsVector;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Custom rights that generated vectors may carry.
pub const CUSTOM_POOL: [&str; 2] = ["AdversarialModelTraining", "Resell"];

/// A fixed pool so that the same id always has the same text and kind.
pub fn obligation_pool() -> Vec<Obligation> {
    vec![
        Obligation::new("A", "Provide a link to the license", ObligationKind::LinkLicense),
        Obligation::new("B", "Cite the dataset paper", ObligationKind::Cite),
        Obligation::new("C", "Share alike", ObligationKind::ShareAlike),
        Obligation::new("D", "Honour takedown requests", ObligationKind::Takedown),
        Obligation::new("E", "Indicate changes", ObligationKind::IndicateChanges),
        Obligation::new("F", "Credit the licensor", ObligationKind::Attribution),
    ]
}

pub fn grant(rng: &mut impl Rng) -> Grant {
    *[Grant::Granted, Grant::Denied, Grant::Unspecified].choose(rng).expect("nonempty")
}

pub fn obligations(rng: &mut impl Rng) -> Vec<Obligation> {
    let mut pool = obligation_pool();
    pool.shuffle(rng);
    let n = rng.gen_range(0..=3);
    pool.truncate(n);
    pool
}

pub fn entry(rng: &mut impl Rng) -> RightEntry {
    let g = grant(rng);
    // Denied and unspecified rights rarely carry obligations, but may.
    let obs = if g == Grant::Granted || rng.gen_bool(0.2) { obligations(rng) } else { Vec::new() };
    RightEntry::new(g, obs)
}

/// A complete vector over the fixed rights, plus a random subset of
/// [`CUSTOM_POOL`].
pub fn vector(rng: &mut impl Rng, name: &str) -> RightsVector {
    let mut v = RightsVector::uniform(LicenseMetadata::new("licensor", "license", name), RightEntry::unspecified());
    for r in RightName::fixed() {
        v.set(r, entry(rng));
    }
    for c in CUSTOM_POOL {
        if rng.gen_bool(0.25) {
            v.set(RightName::custom(c), entry(rng));
        }
    }
    v
}

pub fn permissive_vector(name: &str) -> RightsVector {
    RightsVector::uniform(LicenseMetadata::new("licensor", "permissive", name), RightEntry::granted(Vec::new()))
}

pub fn record(rng: &mut impl Rng, id: &str, kind: SubjectKind) -> ProvenanceRecord {
    let year = rng.gen_range(1995..2025);
    let mut r = ProvenanceRecord::minimal(id, kind, format!("name of {id}"), kind.is_dataset().then_some(year));
    if rng.gen_bool(0.3) {
        r.dataset_version = Some(format!("v{}", rng.gen_range(1..5)));
    }
    if kind.is_dataset() && rng.gen_bool(0.5) {
        let hex: String = (0..64).map(|_| char::from(b"0123456789abcdef"[rng.gen_range(0..16)])).collect();
        r.digest = Some(Digest::new("sha256", hex));
        r.size_bytes = Some(rng.gen_range(1..1 << 40));
    }
    r
}

/// A random lineage problem.
#[derive(Debug, Clone)]
pub struct Case {
    pub records: Vec<ProvenanceRecord>,
    pub edges: Vec<Edge>,
    pub root: String,
    pub graph: LineageGraph,
    pub interpretations: Interpretations,
}

/// A DAG of `1..=max_nodes` nodes rooted at a dataset. Every non-root node
/// has at least one parent among earlier nodes, so all nodes are reachable.
/// The root is always interpreted; other nodes are unavailable with
/// probability `p_unavailable`.
pub fn case(rng: &mut impl Rng, max_nodes: usize, p_unavailable: f64) -> Case {
    let n = rng.gen_range(1..=max_nodes);
    // Shuffled ids so lexicographic order is unrelated to topology.
    let mut ids: Vec<String> = (0..n).map(|i| format!("node-{i}")).collect();
    ids.shuffle(rng);

    let records: Vec<ProvenanceRecord> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let kind = if i == 0 {
                SubjectKind::Dataset
            } else {
                *[SubjectKind::Dataset, SubjectKind::Website, SubjectKind::SearchEngine].choose(rng).expect("nonempty")
            };
            record(rng, id, kind)
        })
        .collect();

    let mut edges = Vec::new();
    for j in 1..n {
        let first = rng.gen_range(0..j);
        for i in 0..j {
            if i == first || rng.gen_bool(0.25) {
                edges.push(Edge::new(ids[i].clone(), ids[j].clone()));
            }
        }
    }
    edges.shuffle(rng);

    let root = ids[0].clone();
    let graph = build_lineage(records.clone(), edges.clone(), &root).expect("generated graphs are valid");

    let mut interpretations = Interpretations::new();
    for (i, id) in ids.iter().enumerate() {
        let node = if i > 0 && rng.gen_bool(p_unavailable) {
            NodeInterpretation::Unavailable
        } else {
            NodeInterpretation::Interpreted(vector(rng, id))
        };
        interpretations.insert(id.clone(), node);
    }

    Case { records, edges, root, graph, interpretations }
}
