//! Straightforward reference implementations, written without reference to
//! the engine's internals.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use dla_core::engine::Interpretations;
use dla_core::lineage::CaptureInput;
use dla_core::lineage::CaptureStatus;
use dla_core::LicenseRange;
use dla_core::LineageGraph;
use dla_core::NodeInterpretation;
use dla_core::Policy;
use dla_core::RightName;

/// Expected outcome for one right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedRight {
    pub granted: bool,
    /// Obligation ids in union order.
    pub obligations: Vec<String>,
    /// Set only when the root grants the right but the result is denied.
    pub restrictors: Option<BTreeSet<String>>,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub rights: BTreeMap<RightName, ExpectedRight>,
    pub residual_risk_flags: BTreeSet<String>,
}

/// Per-right AND-fold over every node, with unions over every node in
/// root-then-lexicographic order.
pub fn verify(graph: &LineageGraph, interpretations: &Interpretations, policy: Policy) -> Expected {
    let root = graph.root_id().to_string();
    let mut order: Vec<String> = graph.node_ids().map(str::to_string).filter(|id| *id != root).collect();
    order.sort();
    order.insert(0, root.clone());

    let vectors: Vec<(&String, Option<&dla_core::RightsVector>)> = order
        .iter()
        .map(|id| {
            let v = match &interpretations[id] {
                NodeInterpretation::Interpreted(v) => Some(v),
                NodeInterpretation::Unavailable => None,
            };
            (id, v)
        })
        .collect();

    let mut space: BTreeSet<RightName> = RightName::fixed().collect();
    for (_, v) in &vectors {
        if let Some(v) = v {
            for k in v.custom_rights.keys() {
                space.insert(RightName::custom(k.clone()));
            }
        }
    }

    let mut rights = BTreeMap::new();
    for right in space {
        let node_allows = |v: &Option<&dla_core::RightsVector>| match v {
            Some(v) => matches!(v.entry(&right), Some(e) if e.grant == dla_core::Grant::Granted),
            None => !policy.unknown_denies,
        };
        let mut granted = true;
        for (_, v) in &vectors {
            granted = granted && node_allows(v);
        }

        let mut obligations: Vec<String> = Vec::new();
        if granted {
            for (_, v) in &vectors {
                let Some(v) = v else { continue };
                for o in v.obligations(&right) {
                    if !obligations.contains(&o.id) {
                        obligations.push(o.id.clone());
                    }
                }
            }
        }

        let root_grants = node_allows(&vectors[0].1);
        let restrictors = (root_grants && !granted)
            .then(|| vectors[1..].iter().filter(|(_, v)| !node_allows(v)).map(|(id, _)| (*id).clone()).collect());

        rights.insert(right, ExpectedRight { granted, obligations, restrictors, changed: root_grants != granted });
    }

    let residual_risk_flags = vectors.iter().filter(|(_, v)| v.is_none()).map(|(id, _)| (*id).clone()).collect();
    Expected { rights, residual_risk_flags }
}

/// Ranges by shortest upward distance to a dataset, computed from an
/// all-pairs distance table. `None` for errors of any kind.
pub fn ranges(graph: &LineageGraph) -> BTreeMap<String, Option<LicenseRange>> {
    let ids: Vec<&str> = graph.node_ids().collect();
    let n = ids.len();
    let index = |id: &str| ids.iter().position(|x| *x == id).expect("known node");
    // dist[a][b]: edges from a up to ancestor b.
    let inf = usize::MAX / 2;
    let mut dist = vec![vec![inf; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in graph.edges() {
        dist[index(&e.child)][index(&e.parent)] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if dist[i][k] + dist[k][j] < dist[i][j] {
                    dist[i][j] = dist[i][k] + dist[k][j];
                }
            }
        }
    }

    let mut out = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let record = graph.node(id).expect("known node");
        let range = if record.subject_kind.is_dataset() {
            record.origin_year.map(LicenseRange::ending)
        } else {
            let datasets: Vec<(usize, Option<i32>)> = (0..n)
                .filter(|&j| j != i && dist[i][j] < inf)
                .filter_map(|j| {
                    let r = graph.node(ids[j]).expect("known node");
                    r.subject_kind.is_dataset().then_some((dist[i][j], r.origin_year))
                })
                .collect();
            match datasets.iter().map(|(d, _)| *d).min() {
                None => None,
                Some(best) => {
                    let years: BTreeSet<Option<i32>> =
                        datasets.iter().filter(|(d, _)| *d == best).map(|(_, y)| *y).collect();
                    match years.into_iter().collect::<Vec<_>>()[..] {
                        [Some(y)] => Some(LicenseRange::ending(y)),
                        _ => None,
                    }
                }
            }
        };
        out.insert(id.to_string(), range);
    }
    out
}

/// Sorts all captures and scans for the first in range.
pub fn select_capture(captures: &[CaptureInput], range: LicenseRange) -> (Option<CaptureInput>, CaptureStatus) {
    let mut sorted = captures.to_vec();
    sorted.sort_by(|a, b| a.year.cmp(&b.year).then_with(|| a.url.cmp(&b.url)));
    for c in &sorted {
        if c.year >= range.start_year() && c.year <= range.end_year() {
            return (Some(c.clone()), CaptureStatus::InRange);
        }
    }
    match sorted.into_iter().next() {
        Some(c) => (Some(c), CaptureStatus::OutOfRangeFallback),
        None => (None, CaptureStatus::Unavailable),
    }
}
