//! Usage scenarios and the final permitted/denied table.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::collections::HashSet;
use std::fmt::Write as _;

use serde::Deserialize;
use serde::Serialize;

use crate::engine::VerifiedLicense;
use crate::rights::union_obligations_into;
use crate::rights::ModelRight;
use crate::rights::Obligation;
use crate::rights::RightName;
use crate::rights::StandaloneRight;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssessmentError {
    #[error("scenario `{scenario}` requires unknown right `{right}`")]
    UnknownRight { scenario: String, right: RightName },
    #[error("scenario `{0}` listed more than once")]
    DuplicateScenario(String),
    #[error("scenario `{0}` requires no rights")]
    EmptyScenario(String),
}

/// A commercial action and the rights it needs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct UsageScenario {
    pub id: String,
    pub required_rights: BTreeSet<RightName>,
}

#[derive(Deserialize)]
struct RawScenario {
    id: String,
    required_rights: BTreeSet<RightName>,
}

impl TryFrom<RawScenario> for UsageScenario {
    type Error = AssessmentError;

    fn try_from(raw: RawScenario) -> Result<Self, Self::Error> {
        UsageScenario::new(raw.id, raw.required_rights)
    }
}

impl UsageScenario {
    pub fn new(
        id: impl Into<String>,
        required_rights: impl IntoIterator<Item = RightName>,
    ) -> Result<Self, AssessmentError> {
        let id = id.into();
        let required_rights: BTreeSet<RightName> = required_rights.into_iter().collect();
        if required_rights.is_empty() {
            return Err(AssessmentError::EmptyScenario(id));
        }
        Ok(Self { id, required_rights })
    }
}

/// DD (distribute the dataset), RPEAI (release a product embedding a model
/// trained on it) and CAI (commercialize the model's output).
pub fn default_scenarios() -> Vec<UsageScenario> {
    let s = |id: &str, r: RightName| UsageScenario::new(id, [r]).expect("nonempty");
    vec![
        s("DD", StandaloneRight::Distribute.into()),
        s("RPEAI", ModelRight::CommercializeModel.into()),
        s("CAI", ModelRight::CommercializeOutput.into()),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingRight {
    pub right: RightName,
    /// Nodes that denied the right; the root itself when its own license does.
    pub restrictors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub permitted: bool,
    pub obligations: Vec<Obligation>,
    pub blocking_rights: Vec<BlockingRight>,
}

pub fn assess(verified: &VerifiedLicense, scenario: &UsageScenario) -> Result<Decision, AssessmentError> {
    let space: BTreeSet<RightName> = verified.right_names().collect();
    if let Some(right) = scenario.required_rights.iter().find(|r| !space.contains(*r)) {
        return Err(AssessmentError::UnknownRight { scenario: scenario.id.clone(), right: right.clone() });
    }

    let mut obligations = Vec::new();
    let mut blocking_rights = Vec::new();
    for right in &scenario.required_rights {
        if verified.grant(right).is_granted() {
            union_obligations_into(&mut obligations, verified.rights.obligations(right));
        } else {
            let restrictors = match verified.restrictors(right) {
                [] => vec![verified.root_id.clone()],
                r => r.to_vec(),
            };
            blocking_rights.push(BlockingRight { right: right.clone(), restrictors });
        }
    }
    let permitted = blocking_rights.is_empty();
    if !permitted {
        obligations.clear();
    }
    Ok(Decision { permitted, obligations, blocking_rights })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentRow {
    pub scenario: String,
    pub permitted: bool,
    /// Obligation ids, in union order.
    pub obligations: Vec<String>,
    pub blocking_rights: Vec<BlockingRight>,
    /// For permitted rows: obligation ids of granted rights the scenario
    /// does not require, for reviewer awareness only.
    pub other_granted_obligations: BTreeMap<RightName, Vec<String>>,
}

impl AssessmentRow {
    /// `Yes(C+D)`, `Yes` or `No`.
    pub fn cell(&self) -> String {
        match (self.permitted, self.obligations.is_empty()) {
            (false, _) => "No".to_string(),
            (true, true) => "Yes".to_string(),
            (true, false) => format!("Yes({})", self.obligations.join("+")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentTable {
    pub dataset_id: String,
    pub dataset_name: String,
    pub rows: Vec<AssessmentRow>,
    /// Every obligation referenced by the table, sorted by id.
    pub legend: Vec<Obligation>,
    pub changed_rights: Vec<RightName>,
    pub residual_risk_flags: Vec<String>,
}

impl AssessmentTable {
    pub fn row(&self, scenario: &str) -> Option<&AssessmentRow> {
        self.rows.iter().find(|r| r.scenario == scenario)
    }

    pub fn all_permitted(&self) -> bool {
        self.rows.iter().all(|r| r.permitted)
    }
}

/// One row per scenario, in input order.
pub fn assess_all(verified: &VerifiedLicense, scenarios: &[UsageScenario]) -> Result<AssessmentTable, AssessmentError> {
    let mut seen = HashSet::new();
    for s in scenarios {
        if !seen.insert(s.id.as_str()) {
            return Err(AssessmentError::DuplicateScenario(s.id.clone()));
        }
    }

    let mut legend: BTreeMap<String, Obligation> = BTreeMap::new();
    let mut rows = Vec::with_capacity(scenarios.len());
    for scenario in scenarios {
        let decision = assess(verified, scenario)?;
        let mut other = BTreeMap::new();
        if decision.permitted {
            for right in verified.right_names() {
                if scenario.required_rights.contains(&right) || !verified.grant(&right).is_granted() {
                    continue;
                }
                let obs = verified.rights.obligations(&right);
                if !obs.is_empty() {
                    for o in obs {
                        legend.entry(o.id.clone()).or_insert_with(|| o.clone());
                    }
                    other.insert(right.clone(), obs.iter().map(|o| o.id.clone()).collect());
                }
            }
        }
        for o in &decision.obligations {
            legend.entry(o.id.clone()).or_insert_with(|| o.clone());
        }
        rows.push(AssessmentRow {
            scenario: scenario.id.clone(),
            permitted: decision.permitted,
            obligations: decision.obligations.iter().map(|o| o.id.clone()).collect(),
            blocking_rights: decision.blocking_rights,
            other_granted_obligations: other,
        });
    }

    Ok(AssessmentTable {
        dataset_id: verified.root_id.clone(),
        dataset_name: verified.dataset_name().to_string(),
        rows,
        legend: legend.into_values().collect(),
        changed_rights: verified.changed.iter().cloned().collect(),
        residual_risk_flags: verified.residual_risk_flags.clone(),
    })
}

/// Renders one or more tables as a single Markdown report: a scenario
/// matrix, an obligation legend, and per-dataset details on what changed and
/// what blocked each denied scenario.
pub fn render_markdown(tables: &[AssessmentTable]) -> String {
    let mut columns: Vec<&str> = Vec::new();
    for t in tables {
        for r in &t.rows {
            if !columns.contains(&r.scenario.as_str()) {
                columns.push(&r.scenario);
            }
        }
    }

    let mut out = String::new();
    out.push_str("| Dataset |");
    for c in &columns {
        let _ = write!(out, " {c} |");
    }
    out.push_str("\n|---|");
    for _ in &columns {
        out.push_str("---|");
    }
    out.push('\n');
    for t in tables {
        let _ = write!(out, "| {} |", t.dataset_name);
        for c in &columns {
            let cell = t.row(c).map_or_else(|| "-".to_string(), AssessmentRow::cell);
            let _ = write!(out, " {cell} |");
        }
        out.push('\n');
    }

    let mut legend: BTreeMap<&str, &Obligation> = BTreeMap::new();
    for t in tables {
        for o in &t.legend {
            legend.entry(&o.id).or_insert(o);
        }
    }
    if !legend.is_empty() {
        out.push_str("\nObligations:\n\n");
        for (id, o) in legend {
            let _ = writeln!(out, "- {id}: {}", o.text);
        }
    }

    for t in tables {
        let _ = write!(out, "\n## {} (`{}`)\n\n", t.dataset_name, t.dataset_id);
        if t.changed_rights.is_empty() {
            out.push_str("Changed rights: none\n");
        } else {
            let names: Vec<String> = t.changed_rights.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "Changed rights: {}", names.join(", "));
        }
        if !t.residual_risk_flags.is_empty() {
            let _ = writeln!(out, "Unavailable licenses (residual risk): {}", t.residual_risk_flags.join(", "));
        }
        for row in &t.rows {
            if row.permitted {
                if !row.other_granted_obligations.is_empty() {
                    let notes: Vec<String> = row
                        .other_granted_obligations
                        .iter()
                        .map(|(r, ids)| format!("{r} ({})", ids.join("+")))
                        .collect();
                    let _ = writeln!(
                        out,
                        "- {}: permitted; other granted rights carry: {}",
                        row.scenario,
                        notes.join(", ")
                    );
                }
                continue;
            }
            let blockers: Vec<String> = row
                .blocking_rights
                .iter()
                .map(|b| format!("{} denied by {}", b.right, b.restrictors.join(", ")))
                .collect();
            let _ = writeln!(out, "- {}: {}", row.scenario, blockers.join("; "));
        }
    }
    out
}
