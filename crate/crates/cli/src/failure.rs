use std::fmt;

use dla_core::assessment::AssessmentError;
use dla_core::bundle::BundleError;
use dla_core::bundle::FailureClass;
use dla_core::catalog::CatalogError;
use dla_core::document::DocumentError;
use dla_core::engine::EngineError;
use dla_core::store::StoreError;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_LINEAGE: u8 = 2;
pub const EXIT_DENIED: u8 = 3;
pub const EXIT_IO: u8 = 64;

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }

    pub fn io(msg: impl fmt::Display) -> Self {
        Self::new(EXIT_IO, anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Many core errors already embed their source in the message.
        let mut shown = String::new();
        for cause in self.error.chain() {
            let text = cause.to_string();
            if shown.contains(&text) {
                continue;
            }
            if !shown.is_empty() {
                shown.push_str(": ");
            }
            shown.push_str(&text);
        }
        f.write_str(&shown)
    }
}

pub fn class_code(class: FailureClass) -> u8 {
    match class {
        FailureClass::Io => EXIT_IO,
        FailureClass::Validation => EXIT_VALIDATION,
        FailureClass::Lineage => EXIT_LINEAGE,
    }
}

pub fn document_code(e: &DocumentError) -> u8 {
    if e.is_syntax() {
        EXIT_IO
    } else {
        EXIT_VALIDATION
    }
}

pub fn catalog_code(e: &CatalogError) -> u8 {
    match e {
        CatalogError::Parse(d) => document_code(d),
        CatalogError::Io { .. } => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

impl From<BundleError> for Failure {
    fn from(e: BundleError) -> Self {
        Failure::new(class_code(e.class()), e)
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::new(EXIT_VALIDATION, e)
    }
}

impl From<AssessmentError> for Failure {
    fn from(e: AssessmentError) -> Self {
        Failure::new(EXIT_VALIDATION, e)
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        let code = match e {
            StoreError::Engine(_) | StoreError::UnknownEntry(_) => EXIT_VALIDATION,
            _ => EXIT_IO,
        };
        Failure::new(code, e)
    }
}
