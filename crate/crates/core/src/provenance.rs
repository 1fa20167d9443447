//! Provenance records: where a dataset or data source came from, where its
//! license was found, and the digest of the artifact that was inspected.

use serde::Deserialize;
use serde::Serialize;

use crate::validation::ValidationReport;
use crate::validation::Violation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubjectKind {
    Dataset,
    Website,
    SearchEngine,
}

impl SubjectKind {
    pub fn is_dataset(self) -> bool {
        self == SubjectKind::Dataset
    }
}

/// Yes / no / not recorded ("N/A").
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriState {
    Yes,
    No,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LicenseFoundVia {
    OfficialWebsite,
    PackagedFile,
    OwnerContact,
    NoneFound,
}

/// A named content digest, e.g. `MD5` / `c58f...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Digest {
    pub algorithm: String,
    pub hex: String,
}

impl Digest {
    pub fn new(algorithm: impl Into<String>, hex: impl Into<String>) -> Self {
        Self { algorithm: algorithm.into(), hex: hex.into() }
    }

    /// Expected hex length for a known algorithm name (case and dash insensitive).
    pub fn expected_hex_len(algorithm: &str) -> Option<usize> {
        let norm: String =
            algorithm.chars().filter(|c| *c != '-' && *c != '_').collect::<String>().to_ascii_lowercase();
        match norm.as_str() {
            "md5" => Some(32),
            "sha1" => Some(40),
            "sha224" => Some(56),
            "sha256" => Some(64),
            "sha384" => Some(96),
            "sha512" => Some(128),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub subject_id: String,
    pub subject_kind: SubjectKind,
    pub dataset_name: String,
    #[serde(default)]
    pub dataset_version: Option<String>,
    #[serde(default)]
    pub origin_year: Option<i32>,
    pub origin_url: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub collection_process: String,
    #[serde(default)]
    pub downloaded_outlet: Option<String>,
    #[serde(default)]
    pub outlet_licensed: TriState,
    #[serde(default)]
    pub publicly_available: TriState,
    #[serde(default)]
    pub notes: String,
    pub license_found_via: LicenseFoundVia,
    #[serde(default)]
    pub license_location: Option<String>,
    #[serde(default)]
    pub license_content: Option<String>,
    #[serde(default)]
    pub digest: Option<Digest>,
    #[serde(default)]
    pub size_bytes: Option<u64>,
    #[serde(default)]
    pub archive_format: Option<String>,
}

impl ProvenanceRecord {
    /// A record with only the required fields filled in.
    pub fn minimal(
        subject_id: impl Into<String>,
        subject_kind: SubjectKind,
        dataset_name: impl Into<String>,
        origin_year: Option<i32>,
    ) -> Self {
        Self {
            subject_id: subject_id.into(),
            subject_kind,
            dataset_name: dataset_name.into(),
            dataset_version: None,
            origin_year,
            origin_url: String::new(),
            description: String::new(),
            collection_process: String::new(),
            downloaded_outlet: None,
            outlet_licensed: TriState::Unknown,
            publicly_available: TriState::Unknown,
            notes: String::new(),
            license_found_via: LicenseFoundVia::NoneFound,
            license_location: None,
            license_content: None,
            digest: None,
            size_bytes: None,
            archive_format: None,
        }
    }
}

/// Checks the per-record invariants. Uniqueness of `subject_id` across a
/// bundle is checked when the lineage graph is built.
pub fn validate_provenance(record: &ProvenanceRecord) -> ValidationReport {
    let mut report = ValidationReport::default();

    if record.subject_id.trim().is_empty() {
        report.push(Violation::new("subject_id", "nonempty", "subject_id must not be empty"));
    }

    if record.subject_kind.is_dataset() && record.origin_year.is_none() {
        report.push(Violation::new(
            "origin_year",
            "required for datasets",
            "a dataset record must carry its origin year",
        ));
    }

    if record.license_found_via == LicenseFoundVia::NoneFound && record.license_content.is_some() {
        report.push(Violation::new(
            "license_content",
            "absent when no license found",
            "license_found_via is none_found but license_content is present",
        ));
    }

    if let Some(digest) = &record.digest {
        match Digest::expected_hex_len(&digest.algorithm) {
            None => report.push(Violation::new(
                "digest.algorithm",
                "known digest algorithm",
                format!("unknown digest algorithm `{}`", digest.algorithm),
            )),
            Some(expected) => {
                if digest.hex.len() != expected {
                    report.push(Violation::new(
                        "digest.hex",
                        "digest length",
                        format!(
                            "{} digest must have {expected} hex characters, found {}",
                            digest.algorithm,
                            digest.hex.len()
                        ),
                    ));
                }
                if !digest.hex.chars().all(|c| c.is_ascii_hexdigit()) {
                    report.push(Violation::new("digest.hex", "hex characters", "digest contains non-hex characters"));
                }
            }
        }
    }

    report
}
