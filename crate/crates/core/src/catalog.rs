//! License interpretations and the template catalog.
//!
//! Interpretations are authored by a person reading the license; the engine
//! never derives them from license text. An interpretation document either
//! inlines a full [`RightsVector`] or references a catalog template by id and
//! version, optionally replacing its metadata and appending obligations.
//!
//! ```json
//! {
//!   "subject_id": "ffhq",
//!   "template": { "license_id": "CC-BY-NC-SA-4.0", "version": "4.0" },
//!   "metadata": { "licensor": "...", "license_name": "...", "dataset_name": "FFHQ" },
//!   "additional_obligations": { "Distribute": [ { "id": "D", "text": "...", "kind": "takedown" } ] }
//! }
//! ```
//!
//! A node whose license could not be recovered is recorded with
//! `"status": "unavailable"` and no vector.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use serde::Serialize;

use crate::document;
use crate::document::DocumentError;
use crate::document::Strictness;
use crate::rights::union_obligations_into;
use crate::rights::LicenseMetadata;
use crate::rights::Obligation;
use crate::rights::RightEntry;
use crate::rights::RightName;
use crate::rights::RightsVector;
use crate::validation::ValidationReport;

const BUILTIN_TEMPLATES: [(&str, &str); 3] = [
    ("cc-by-4.0.json", include_str!("../templates/cc-by-4.0.json")),
    ("cc-by-nc-4.0.json", include_str!("../templates/cc-by-nc-4.0.json")),
    ("cc-by-nc-sa-4.0.json", include_str!("../templates/cc-by-nc-sa-4.0.json")),
];

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("{0}")]
    Parse(#[from] DocumentError),
    #[error("schema violation: {0}")]
    SchemaViolation(ValidationReport),
    #[error("unknown license template {license_id} {version}")]
    UnknownLicense { license_id: String, version: String },
    #[error("right `{0}` already exists")]
    DuplicateRight(String),
    #[error("interpretation for `{0}` must give exactly one of `vector` or `template`")]
    AmbiguousSource(String),
    #[error("unavailable interpretation for `{0}` must not carry rights")]
    UnavailableWithRights(String),
    #[error("duplicate template {license_id} {version}")]
    DuplicateTemplate { license_id: String, version: String },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A frozen template file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LicenseTemplate {
    pub license_id: String,
    pub version: String,
    /// Who authored this reading and what it was calibrated against.
    pub provenance_note: String,
    pub vector: RightsVector,
}

/// A template together with the SHA-256 of the file it was loaded from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredTemplate {
    pub template: LicenseTemplate,
    pub digest: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RightScope {
    Standalone,
    Model,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateRef {
    pub license_id: String,
    pub version: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpretationStatus {
    #[default]
    Interpreted,
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpretationDocument {
    pub subject_id: String,
    #[serde(default)]
    pub status: InterpretationStatus,
    #[serde(default)]
    pub template: Option<TemplateRef>,
    #[serde(default)]
    pub metadata: Option<LicenseMetadata>,
    #[serde(default)]
    pub vector: Option<RightsVector>,
    #[serde(default)]
    pub additional_obligations: BTreeMap<RightName, Vec<Obligation>>,
    #[serde(default)]
    pub notes: Option<String>,
}

/// The result of loading one interpretation document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedInterpretation {
    pub subject_id: String,
    /// `None` when the license is unavailable.
    pub vector: Option<RightsVector>,
    /// Template id, version and file digest, when one was used.
    pub template: Option<(String, String, String)>,
    pub warnings: Vec<String>,
}

/// Read-only after construction; share freely.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    templates: BTreeMap<(String, String), StoredTemplate>,
    custom_rights: BTreeMap<String, RightScope>,
}

impl Catalog {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The templates shipped with the crate.
    pub fn builtin() -> Self {
        let mut catalog = Self::empty();
        for (name, text) in BUILTIN_TEMPLATES {
            catalog.add_template_text(text).unwrap_or_else(|e| panic!("built-in template {name} is invalid: {e}"));
        }
        catalog
    }

    /// Adds every `*.json` template in `dir` on top of the current set.
    pub fn load_dir(mut self, dir: &Path) -> Result<Self, CatalogError> {
        let io = |source, path: &Path| CatalogError::Io { path: path.display().to_string(), source };
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| io(e, dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for p in paths {
            let text = fs::read_to_string(&p).map_err(|e| io(e, &p))?;
            self.add_template_text(&text)?;
        }
        Ok(self)
    }

    fn add_template_text(&mut self, text: &str) -> Result<(), CatalogError> {
        let template: LicenseTemplate = document::from_str(text)?;
        let report = crate::rights::validate_rights_vector(&template.vector);
        if !report.is_clean() {
            return Err(CatalogError::SchemaViolation(report));
        }
        let key = (template.license_id.clone(), template.version.clone());
        if self.templates.contains_key(&key) {
            return Err(CatalogError::DuplicateTemplate { license_id: key.0, version: key.1 });
        }
        let digest = document::sha256_hex(text.as_bytes());
        self.templates.insert(key, StoredTemplate { template, digest });
        Ok(())
    }

    pub fn lookup_template(&self, license_id: &str, version: &str) -> Result<&StoredTemplate, CatalogError> {
        self.templates.get(&(license_id.to_string(), version.to_string())).ok_or_else(|| CatalogError::UnknownLicense {
            license_id: license_id.to_string(),
            version: version.to_string(),
        })
    }

    pub fn templates(&self) -> impl Iterator<Item = &StoredTemplate> {
        self.templates.values()
    }

    pub fn custom_rights(&self) -> &BTreeMap<String, RightScope> {
        &self.custom_rights
    }

    /// Declares a new right column.
    pub fn extend_schema(&mut self, right_name: &str, applies_to: RightScope) -> Result<(), CatalogError> {
        if right_name.trim().is_empty()
            || RightName::fixed_from_str(right_name).is_some()
            || self.custom_rights.contains_key(right_name)
        {
            return Err(CatalogError::DuplicateRight(right_name.to_string()));
        }
        self.custom_rights.insert(right_name.to_string(), applies_to);
        Ok(())
    }

    /// Adds every declared custom right missing from `v` as Unspecified.
    /// Returns the names that were filled in.
    pub fn normalize(&self, v: &mut RightsVector) -> Vec<String> {
        let mut filled = Vec::new();
        for name in self.custom_rights.keys() {
            if !v.custom_rights.contains_key(name) {
                v.custom_rights.insert(name.clone(), RightEntry::unspecified());
                filled.push(name.clone());
            }
        }
        filled
    }

    /// Parses and resolves one interpretation document.
    pub fn load_interpretation(
        &self,
        text: &str,
        strictness: Strictness,
    ) -> Result<LoadedInterpretation, CatalogError> {
        let parsed = document::parse::<InterpretationDocument>(text, strictness)?;
        self.resolve(parsed.value, parsed.warnings, strictness)
    }

    pub fn resolve(
        &self,
        doc: InterpretationDocument,
        mut warnings: Vec<String>,
        strictness: Strictness,
    ) -> Result<LoadedInterpretation, CatalogError> {
        if doc.status == InterpretationStatus::Unavailable {
            if doc.vector.is_some() || doc.template.is_some() || !doc.additional_obligations.is_empty() {
                return Err(CatalogError::UnavailableWithRights(doc.subject_id));
            }
            return Ok(LoadedInterpretation { subject_id: doc.subject_id, vector: None, template: None, warnings });
        }

        let (mut vector, template) = match (doc.vector, &doc.template) {
            (Some(v), None) => (v, None),
            (None, Some(t)) => {
                let stored = self.lookup_template(&t.license_id, &t.version)?;
                (stored.template.vector.clone(), Some((t.license_id.clone(), t.version.clone(), stored.digest.clone())))
            }
            _ => return Err(CatalogError::AmbiguousSource(doc.subject_id)),
        };
        if let Some(meta) = doc.metadata {
            vector.metadata = meta;
        }
        for (right, extra) in &doc.additional_obligations {
            match vector.entry_mut(right) {
                Some(entry) => union_obligations_into(&mut entry.obligations, extra),
                None => vector.set(right.clone(), RightEntry::new(crate::rights::Grant::Unspecified, extra.clone())),
            }
        }

        let report = crate::rights::validate_rights_vector(&vector);
        if !report.is_clean() {
            return Err(CatalogError::SchemaViolation(report));
        }

        let filled = self.normalize(&mut vector);
        if strictness == Strictness::Strict && !filled.is_empty() {
            warnings.push(format!("custom right(s) not populated, read as unspecified: {}", filled.join(", ")));
        }

        Ok(LoadedInterpretation { subject_id: doc.subject_id, vector: Some(vector), template, warnings })
    }
}

/// Loads a bare rights-vector document and validates it.
pub fn load_rights_vector(text: &str, strictness: Strictness) -> Result<document::Parsed<RightsVector>, CatalogError> {
    let parsed = document::parse::<RightsVector>(text, strictness)?;
    let report = crate::rights::validate_rights_vector(&parsed.value);
    if !report.is_clean() {
        return Err(CatalogError::SchemaViolation(report));
    }
    Ok(parsed)
}
