//! Canonical JSON document handling.
//!
//! Every document type is UTF-8 JSON with snake_case field names. The
//! canonical form is pretty-printed with struct fields in declaration order
//! and maps sorted by key, followed by a single newline, so that
//! `to_canonical_string(parse(s)) == s` for any canonical `s`.
//!
//! Unknown fields are rejected in [`Strictness::Strict`] mode and returned as
//! warnings in [`Strictness::Lenient`] mode.

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::Digest as _;
use sha2::Sha256;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    /// The text is not well-formed JSON (truncated, bad syntax, I/O).
    #[error("malformed JSON: {0}")]
    Syntax(serde_json::Error),
    /// Well-formed JSON that does not match the document schema.
    #[error("invalid value at `{path}`: {source}")]
    Data {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unknown field(s): {}", .0.join(", "))]
    UnknownFields(Vec<String>),
}

impl DocumentError {
    pub fn is_syntax(&self) -> bool {
        matches!(self, DocumentError::Syntax(_))
    }
}

/// A parsed document plus any lenient-mode warnings.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

pub fn parse<T: DeserializeOwned>(text: &str, strictness: Strictness) -> Result<Parsed<T>, DocumentError> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let mut record = |path: serde_ignored::Path<'_>| unknown.push(path.to_string());
    let value = {
        let ignoring = serde_ignored::Deserializer::new(&mut de, &mut record);
        serde_path_to_error::deserialize(ignoring).map_err(|err| {
            let path = err.path().to_string();
            let inner = err.into_inner();
            if inner.is_data() {
                DocumentError::Data { path, source: inner }
            } else {
                DocumentError::Syntax(inner)
            }
        })?
    };
    de.end().map_err(DocumentError::Syntax)?;
    if !unknown.is_empty() && strictness == Strictness::Strict {
        return Err(DocumentError::UnknownFields(unknown));
    }
    let warnings = unknown.into_iter().map(|p| format!("ignored unknown field `{p}`")).collect();
    Ok(Parsed { value, warnings })
}

/// Strict parse, discarding the (necessarily empty) warning list.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    parse(text, Strictness::Strict).map(|p| p.value)
}

pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("document types always serialize");
    out.push('\n');
    out
}

/// Lowercase hex SHA-256 of the canonical serialization.
pub fn canonical_digest<T: Serialize>(value: &T) -> String {
    sha256_hex(to_canonical_string(value).as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
