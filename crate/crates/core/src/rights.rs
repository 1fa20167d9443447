//! Rights vectors: a license decomposed into per-right grants and the
//! obligations attached to each right.
//!
//! Eleven rights are fixed. Four concern the data on its own (access,
//! tagging, distribution, re-representation) and seven concern the data used
//! together with a model. Additional rights may be declared by extending the
//! catalog schema; those live in `custom_rights`.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Deserialize;
use serde::Deserializer;
use serde::Serialize;
use serde::Serializer;

use crate::validation::ValidationReport;
use crate::validation::Violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum StandaloneRight {
    Access,
    Tagging,
    Distribute,
    Rerepresent,
}

impl StandaloneRight {
    pub const ALL: [StandaloneRight; 4] =
        [StandaloneRight::Access, StandaloneRight::Tagging, StandaloneRight::Distribute, StandaloneRight::Rerepresent];

    pub fn as_str(self) -> &'static str {
        match self {
            StandaloneRight::Access => "Access",
            StandaloneRight::Tagging => "Tagging",
            StandaloneRight::Distribute => "Distribute",
            StandaloneRight::Rerepresent => "Rerepresent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ModelRight {
    Benchmark,
    Research,
    Publish,
    InternalUse,
    CommercializeOutput,
    CommercializeModel,
    ModelReverseEngineer,
}

impl ModelRight {
    pub const ALL: [ModelRight; 7] = [
        ModelRight::Benchmark,
        ModelRight::Research,
        ModelRight::Publish,
        ModelRight::InternalUse,
        ModelRight::CommercializeOutput,
        ModelRight::CommercializeModel,
        ModelRight::ModelReverseEngineer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelRight::Benchmark => "Benchmark",
            ModelRight::Research => "Research",
            ModelRight::Publish => "Publish",
            ModelRight::InternalUse => "InternalUse",
            ModelRight::CommercializeOutput => "CommercializeOutput",
            ModelRight::CommercializeModel => "CommercializeModel",
            ModelRight::ModelReverseEngineer => "ModelReverseEngineer",
        }
    }
}

// Deserialized through a string so that error paths keep the map key.
macro_rules! deserialize_by_name {
    ($ty:ty) => {
        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                <$ty>::ALL.into_iter().find(|r| r.as_str() == s).ok_or_else(|| {
                    let expected: Vec<&str> = <$ty>::ALL.iter().map(|r| r.as_str()).collect();
                    serde::de::Error::custom(format!("unknown right `{s}`, expected one of {}", expected.join(", ")))
                })
            }
        }
    };
}

deserialize_by_name!(StandaloneRight);
deserialize_by_name!(ModelRight);

/// Any right name: fixed or custom. Orders fixed standalone rights first,
/// then fixed model rights, then custom rights by name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RightName {
    Standalone(StandaloneRight),
    Model(ModelRight),
    Custom(String),
}

impl RightName {
    /// The eleven fixed rights in canonical order.
    pub fn fixed() -> impl Iterator<Item = RightName> {
        StandaloneRight::ALL
            .into_iter()
            .map(RightName::Standalone)
            .chain(ModelRight::ALL.into_iter().map(RightName::Model))
    }

    pub fn is_fixed(&self) -> bool {
        !matches!(self, RightName::Custom(_))
    }

    /// Parses only the fixed names.
    pub fn fixed_from_str(s: &str) -> Option<RightName> {
        RightName::fixed().find(|r| r.as_str() == s)
    }

    pub fn custom(name: impl Into<String>) -> RightName {
        RightName::Custom(name.into())
    }

    pub fn as_str(&self) -> &str {
        match self {
            RightName::Standalone(r) => r.as_str(),
            RightName::Model(r) => r.as_str(),
            RightName::Custom(name) => name,
        }
    }
}

impl From<StandaloneRight> for RightName {
    fn from(r: StandaloneRight) -> Self {
        RightName::Standalone(r)
    }
}

impl From<ModelRight> for RightName {
    fn from(r: ModelRight) -> Self {
        RightName::Model(r)
    }
}

impl fmt::Display for RightName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("empty right name")]
pub struct EmptyRightName;

impl FromStr for RightName {
    type Err = EmptyRightName;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(EmptyRightName);
        }
        Ok(RightName::fixed_from_str(s).unwrap_or_else(|| RightName::Custom(s.to_string())))
    }
}

impl Serialize for RightName {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RightName {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grant {
    Granted,
    Denied,
    Unspecified,
}

impl Grant {
    /// Unspecified is read as Denied.
    pub fn is_granted(self) -> bool {
        self == Grant::Granted
    }

    pub fn from_bool(granted: bool) -> Self {
        if granted {
            Grant::Granted
        } else {
            Grant::Denied
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObligationKind {
    Attribution,
    Cite,
    LinkLicense,
    ShareAlike,
    IndicateChanges,
    Takedown,
    Indemnify,
    Other,
}

/// A requirement attached to a right. Identity for set operations is `id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Obligation {
    pub id: String,
    pub text: String,
    pub kind: ObligationKind,
}

impl Obligation {
    pub fn new(id: impl Into<String>, text: impl Into<String>, kind: ObligationKind) -> Self {
        Self { id: id.into(), text: text.into(), kind }
    }
}

/// Appends every obligation of `from` whose id is not yet in `into`,
/// preserving first-seen order.
pub fn union_obligations_into(into: &mut Vec<Obligation>, from: &[Obligation]) {
    let mut seen: HashSet<String> = into.iter().map(|o| o.id.clone()).collect();
    for o in from {
        if seen.insert(o.id.clone()) {
            into.push(o.clone());
        }
    }
}

pub fn union_obligations(a: &[Obligation], b: &[Obligation]) -> Vec<Obligation> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    union_obligations_into(&mut out, a);
    union_obligations_into(&mut out, b);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightEntry {
    pub grant: Grant,
    #[serde(default)]
    pub obligations: Vec<Obligation>,
}

impl RightEntry {
    pub fn new(grant: Grant, obligations: Vec<Obligation>) -> Self {
        Self { grant, obligations }
    }

    pub fn granted(obligations: Vec<Obligation>) -> Self {
        Self::new(Grant::Granted, obligations)
    }

    pub fn denied() -> Self {
        Self::new(Grant::Denied, Vec::new())
    }

    pub fn unspecified() -> Self {
        Self::new(Grant::Unspecified, Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseMetadata {
    pub licensor: String,
    pub license_name: String,
    pub dataset_name: String,
    #[serde(default)]
    pub dataset_version: Option<String>,
    #[serde(default)]
    pub credit_notice: Option<String>,
    #[serde(default)]
    pub validity_period: Option<String>,
    #[serde(default)]
    pub liability_warranty: Option<String>,
    #[serde(default)]
    pub designated_third_parties: Option<String>,
    #[serde(default)]
    pub additional_conditions: Option<String>,
}

impl LicenseMetadata {
    pub fn new(licensor: impl Into<String>, license_name: impl Into<String>, dataset_name: impl Into<String>) -> Self {
        Self {
            licensor: licensor.into(),
            license_name: license_name.into(),
            dataset_name: dataset_name.into(),
            dataset_version: None,
            credit_notice: None,
            validity_period: None,
            liability_warranty: None,
            designated_third_parties: None,
            additional_conditions: None,
        }
    }
}

/// One license's interpretation. Maps may be partial as parsed; use
/// [`validate_rights_vector`] to check completeness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RightsVector {
    pub metadata: LicenseMetadata,
    pub standalone_rights: BTreeMap<StandaloneRight, RightEntry>,
    pub model_rights: BTreeMap<ModelRight, RightEntry>,
    #[serde(default)]
    pub custom_rights: BTreeMap<String, RightEntry>,
}

impl RightsVector {
    /// Every fixed right set to a clone of `entry`.
    pub fn uniform(metadata: LicenseMetadata, entry: RightEntry) -> Self {
        let mut v = Self {
            metadata,
            standalone_rights: BTreeMap::new(),
            model_rights: BTreeMap::new(),
            custom_rights: BTreeMap::new(),
        };
        for r in RightName::fixed() {
            v.set(r, entry.clone());
        }
        v
    }

    pub fn entry(&self, right: &RightName) -> Option<&RightEntry> {
        match right {
            RightName::Standalone(r) => self.standalone_rights.get(r),
            RightName::Model(r) => self.model_rights.get(r),
            RightName::Custom(name) => self.custom_rights.get(name),
        }
    }

    pub fn entry_mut(&mut self, right: &RightName) -> Option<&mut RightEntry> {
        match right {
            RightName::Standalone(r) => self.standalone_rights.get_mut(r),
            RightName::Model(r) => self.model_rights.get_mut(r),
            RightName::Custom(name) => self.custom_rights.get_mut(name),
        }
    }

    /// Grant for `right`; absent rights read as Unspecified.
    pub fn grant(&self, right: &RightName) -> Grant {
        self.entry(right).map_or(Grant::Unspecified, |e| e.grant)
    }

    pub fn obligations(&self, right: &RightName) -> &[Obligation] {
        self.entry(right).map_or(&[], |e| e.obligations.as_slice())
    }

    pub fn set(&mut self, right: RightName, entry: RightEntry) {
        match right {
            RightName::Standalone(r) => {
                self.standalone_rights.insert(r, entry);
            }
            RightName::Model(r) => {
                self.model_rights.insert(r, entry);
            }
            RightName::Custom(name) => {
                self.custom_rights.insert(name, entry);
            }
        }
    }

    /// Present right names in canonical order.
    pub fn right_names(&self) -> impl Iterator<Item = RightName> + '_ {
        self.standalone_rights
            .keys()
            .map(|r| RightName::Standalone(*r))
            .chain(self.model_rights.keys().map(|r| RightName::Model(*r)))
            .chain(self.custom_rights.keys().map(|n| RightName::Custom(n.clone())))
    }
}

/// Empty iff both fixed right sets are complete and custom keys neither
/// collide with fixed names nor are empty.
pub fn validate_rights_vector(v: &RightsVector) -> ValidationReport {
    let mut report = ValidationReport::default();
    for r in StandaloneRight::ALL {
        if !v.standalone_rights.contains_key(&r) {
            report.push(Violation::new(
                format!("standalone_rights.{}", r.as_str()),
                "missing right",
                format!("fixed right {} is missing", r.as_str()),
            ));
        }
    }
    for r in ModelRight::ALL {
        if !v.model_rights.contains_key(&r) {
            report.push(Violation::new(
                format!("model_rights.{}", r.as_str()),
                "missing right",
                format!("fixed right {} is missing", r.as_str()),
            ));
        }
    }
    for name in v.custom_rights.keys() {
        if name.trim().is_empty() {
            report.push(Violation::new("custom_rights", "nonempty right name", "custom right name is empty"));
        } else if RightName::fixed_from_str(name).is_some() {
            report.push(Violation::new(
                format!("custom_rights.{name}"),
                "custom key collides",
                format!("custom right {name} collides with a fixed right"),
            ));
        }
    }
    report
}
