//! Restrictive-wins resolution of a root dataset's license against the
//! licenses of everything in its lineage.
//!
//! A right survives only if the root and every interpreted data source grant
//! it; Unspecified counts as a denial. Nodes whose license is unavailable do
//! not deny under the default policy but are reported as residual risk. The
//! obligations of a surviving right are the union (by id) of that right's
//! obligations across all interpreted nodes, root first, then by subject id.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::Deserialize;
use serde::Serialize;

use crate::document;
use crate::lineage::LineageGraph;
use crate::rights::union_obligations_into;
use crate::rights::Grant;
use crate::rights::RightEntry;
use crate::rights::RightName;
use crate::rights::RightsVector;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Policy {
    /// Treat nodes with unavailable licenses as denying every right.
    pub unknown_denies: bool,
}

impl Policy {
    /// Stable flag tokens, used in cache keys and audits.
    pub fn flags(&self) -> Vec<&'static str> {
        let mut flags = Vec::new();
        if self.unknown_denies {
            flags.push("unknown-denies");
        }
        flags
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum NodeInterpretation {
    Interpreted(RightsVector),
    Unavailable,
}

impl NodeInterpretation {
    pub fn vector(&self) -> Option<&RightsVector> {
        match self {
            NodeInterpretation::Interpreted(v) => Some(v),
            NodeInterpretation::Unavailable => None,
        }
    }

    fn digest(&self) -> String {
        match self {
            NodeInterpretation::Interpreted(v) => document::canonical_digest(v),
            NodeInterpretation::Unavailable => document::sha256_hex(b"unavailable"),
        }
    }
}

pub type Interpretations = BTreeMap<String, NodeInterpretation>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("root `{root}` has no interpretation")]
    MissingRootInterpretation { root: String },
    #[error("node `{id}` is neither interpreted nor marked unavailable")]
    UninterpretedNode { id: String },
    #[error("interpretation given for `{id}`, which is not in the lineage graph")]
    UnknownSubject { id: String },
    #[error("right `{right}` is not in the verified right space")]
    RightSpaceMismatch { right: RightName },
}

/// Digests of everything the verification depended on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub engine_version: String,
    pub policy: Policy,
    pub lineage_digest: String,
    pub interpretation_digests: BTreeMap<String, String>,
    /// Digest over all of the above.
    pub input_digest: String,
}

impl Audit {
    pub fn compute(graph: &LineageGraph, interpretations: &Interpretations, policy: Policy) -> Self {
        let lineage_digest = document::canonical_digest(&graph.to_document());
        let interpretation_digests: BTreeMap<String, String> =
            interpretations.iter().map(|(id, i)| (id.clone(), i.digest())).collect();
        let mut combined = String::new();
        combined.push_str("engine=");
        combined.push_str(ENGINE_VERSION);
        combined.push_str("\npolicy=");
        combined.push_str(&policy.flags().join(","));
        combined.push_str("\nlineage=");
        combined.push_str(&lineage_digest);
        for (id, d) in &interpretation_digests {
            combined.push_str(&format!("\n{id}={d}"));
        }
        combined.push('\n');
        Audit {
            engine_version: ENGINE_VERSION.to_string(),
            policy,
            lineage_digest,
            interpretation_digests,
            input_digest: document::sha256_hex(combined.as_bytes()),
        }
    }
}

/// The effective license of the root after checking its lineage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifiedLicense {
    pub root_id: String,
    /// The root's metadata with verified grants. Grants are never Unspecified.
    pub rights: RightsVector,
    /// Per right: the data sources that denied a right the root grants.
    pub restrictors: BTreeMap<RightName, Vec<String>>,
    /// Rights whose effective grant differs from the root's own license.
    pub changed: BTreeSet<RightName>,
    /// Nodes whose license content was unavailable.
    pub residual_risk_flags: Vec<String>,
    pub audit: Audit,
}

impl VerifiedLicense {
    pub fn grant(&self, right: &RightName) -> Grant {
        self.rights.grant(right)
    }

    pub fn restrictors(&self, right: &RightName) -> &[String] {
        self.restrictors.get(right).map_or(&[], Vec::as_slice)
    }

    pub fn right_names(&self) -> impl Iterator<Item = RightName> + '_ {
        self.rights.right_names()
    }

    pub fn dataset_name(&self) -> &str {
        &self.rights.metadata.dataset_name
    }
}

pub fn verify(
    graph: &LineageGraph,
    interpretations: &Interpretations,
    policy: Policy,
) -> Result<VerifiedLicense, EngineError> {
    let root_id = graph.root_id();
    let root = match interpretations.get(root_id) {
        Some(NodeInterpretation::Interpreted(v)) => v,
        _ => return Err(EngineError::MissingRootInterpretation { root: root_id.to_string() }),
    };
    if let Some(id) = graph.node_ids().find(|id| !interpretations.contains_key(*id)) {
        return Err(EngineError::UninterpretedNode { id: id.to_string() });
    }
    if let Some(id) = interpretations.keys().find(|id| graph.node(id).is_none()) {
        return Err(EngineError::UnknownSubject { id: id.clone() });
    }

    // BTreeMap iteration gives lexicographic subject order.
    let sources: Vec<(&str, &NodeInterpretation)> =
        interpretations.iter().filter(|(id, _)| id.as_str() != root_id).map(|(id, i)| (id.as_str(), i)).collect();

    let mut space: BTreeSet<RightName> = RightName::fixed().collect();
    for i in interpretations.values() {
        if let Some(v) = i.vector() {
            space.extend(v.custom_rights.keys().map(|k| RightName::Custom(k.clone())));
        }
    }

    let mut rights = RightsVector {
        metadata: root.metadata.clone(),
        standalone_rights: BTreeMap::new(),
        model_rights: BTreeMap::new(),
        custom_rights: BTreeMap::new(),
    };
    let mut restrictors = BTreeMap::new();
    let mut changed = BTreeSet::new();

    for right in &space {
        let root_grants = root.grant(right).is_granted();
        let deniers: Vec<String> = sources
            .iter()
            .filter(|(_, i)| match i {
                NodeInterpretation::Interpreted(v) => !v.grant(right).is_granted(),
                NodeInterpretation::Unavailable => policy.unknown_denies,
            })
            .map(|(id, _)| id.to_string())
            .collect();
        let granted = root_grants && deniers.is_empty();

        let mut obligations = Vec::new();
        if granted {
            union_obligations_into(&mut obligations, root.obligations(right));
            for (_, i) in &sources {
                if let Some(v) = i.vector() {
                    union_obligations_into(&mut obligations, v.obligations(right));
                }
            }
        }
        if root_grants && !granted {
            restrictors.insert(right.clone(), deniers);
        }
        if root_grants != granted {
            changed.insert(right.clone());
        }
        rights.set(right.clone(), RightEntry::new(Grant::from_bool(granted), obligations));
    }

    let residual_risk_flags = sources
        .iter()
        .filter(|(_, i)| matches!(i, NodeInterpretation::Unavailable))
        .map(|(id, _)| id.to_string())
        .collect();

    Ok(VerifiedLicense {
        root_id: root_id.to_string(),
        rights,
        restrictors,
        changed,
        residual_risk_flags,
        audit: Audit::compute(graph, interpretations, policy),
    })
}

/// Rights whose effective grant differs between `own` and `verified`.
/// Obligations and restrictors are not compared.
pub fn diff_rights(own: &RightsVector, verified: &VerifiedLicense) -> Result<BTreeSet<RightName>, EngineError> {
    let space: BTreeSet<RightName> = verified.right_names().collect();
    if let Some(right) = own.right_names().find(|r| !space.contains(r)) {
        return Err(EngineError::RightSpaceMismatch { right });
    }
    Ok(space.into_iter().filter(|r| own.grant(r).is_granted() != verified.grant(r).is_granted()).collect())
}
