//! Content-addressed store of completed verifications.
//!
//! Layout: a flat directory holding `index.json` and one `<key>.json` blob
//! per analysis. The index records each blob's SHA-256 and the input digest
//! of the analysis it holds. Writes go to a temporary file in the same
//! directory and are renamed into place. One writer at a time; any number of
//! readers.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::io::Write as _;
use std::path::Path;
use std::path::PathBuf;

use serde::Deserialize;
use serde::Serialize;

use crate::document;
use crate::engine::verify;
use crate::engine::Audit;
use crate::engine::EngineError;
use crate::engine::Interpretations;
use crate::engine::Policy;
use crate::engine::VerifiedLicense;
use crate::lineage::LineageGraph;
use crate::provenance::ProvenanceRecord;

pub const INDEX_FILE: &str = "index.json";
pub const ENV_STORE: &str = "DLA_STORE";

/// Cache key for a dataset under a policy.
///
/// SHA-256 (lowercase hex) of the UTF-8 text
///
/// ```text
/// dla-analysis-key/v1
/// name=<dataset_name>
/// version=<dataset_version or empty>
/// digest=<lowercased algorithm>:<lowercased hex>, or empty
/// policy=<comma-separated policy flags>
/// ```
///
/// with every line, including the last, terminated by `\n`.
pub fn analysis_key(record: &ProvenanceRecord, policy: &Policy) -> String {
    let digest = record
        .digest
        .as_ref()
        .map(|d| format!("{}:{}", d.algorithm.to_ascii_lowercase(), d.hex.to_ascii_lowercase()))
        .unwrap_or_default();
    let text = format!(
        "dla-analysis-key/v1\nname={}\nversion={}\ndigest={}\npolicy={}\n",
        record.dataset_name,
        record.dataset_version.as_deref().unwrap_or(""),
        digest,
        policy.flags().join(","),
    );
    document::sha256_hex(text.as_bytes())
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("store entry `{key}` is corrupt: {reason}")]
    StoreCorrupt { key: String, reason: String },
    #[error("store I/O at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("unknown store entry `{0}`")]
    UnknownEntry(String),
    #[error("store is read-only")]
    ReadOnly,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoreWarning {
    /// An entry exists under the key but was computed from different inputs.
    StaleEntry { key: String },
    /// A miss on a read-only store; the result was not persisted.
    NotPersisted { key: String },
}

impl std::fmt::Display for StoreWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StoreWarning::StaleEntry { key } => write!(f, "stale store entry {key}: inputs changed, re-verifying"),
            StoreWarning::NotPersisted { key } => write!(f, "store is read-only; result for {key} not persisted"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpenMode {
    ReadWrite,
    ReadOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub dataset_name: String,
    pub blob_sha256: String,
    pub input_digest: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Index {
    pub entries: BTreeMap<String, IndexEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct StoredAnalysis {
    key: String,
    input_digest: String,
    verified: VerifiedLicense,
}

#[derive(Debug, Clone)]
pub struct Lookup {
    pub verified: VerifiedLicense,
    pub cache_hit: bool,
    pub key: String,
    pub warnings: Vec<StoreWarning>,
}

#[derive(Debug, Clone)]
pub struct AnalysisStore {
    root: PathBuf,
    mode: OpenMode,
}

impl AnalysisStore {
    /// Opens (and in read-write mode creates) a store rooted at `root`.
    pub fn open(root: impl Into<PathBuf>, mode: OpenMode) -> Result<Self, StoreError> {
        let root = root.into();
        if mode == OpenMode::ReadWrite {
            fs::create_dir_all(&root).map_err(io_err(&root))?;
        }
        Ok(Self { root, mode })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn index(&self) -> Result<Index, StoreError> {
        let path = self.root.join(INDEX_FILE);
        match fs::read_to_string(&path) {
            Ok(text) => document::from_str(&text)
                .map_err(|e| StoreError::StoreCorrupt { key: INDEX_FILE.to_string(), reason: e.to_string() }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Index::default()),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    fn blob_path(&self, key: &str) -> PathBuf {
        self.root.join(format!("{key}.json"))
    }

    /// Loads and integrity-checks the entry for `key`, if indexed.
    fn load(&self, key: &str, index: &Index) -> Result<Option<StoredAnalysis>, StoreError> {
        let Some(entry) = index.entries.get(key) else {
            return Ok(None);
        };
        let path = self.blob_path(key);
        let bytes = fs::read(&path)
            .map_err(|e| StoreError::StoreCorrupt { key: key.to_string(), reason: format!("blob unreadable: {e}") })?;
        if document::sha256_hex(&bytes) != entry.blob_sha256 {
            return Err(StoreError::StoreCorrupt {
                key: key.to_string(),
                reason: "blob digest does not match index".to_string(),
            });
        }
        let text = String::from_utf8(bytes)
            .map_err(|e| StoreError::StoreCorrupt { key: key.to_string(), reason: e.to_string() })?;
        let stored: StoredAnalysis = document::from_str(&text)
            .map_err(|e| StoreError::StoreCorrupt { key: key.to_string(), reason: e.to_string() })?;
        Ok(Some(stored))
    }

    pub fn get(&self, key: &str) -> Result<Option<VerifiedLicense>, StoreError> {
        Ok(self.load(key, &self.index()?)?.map(|s| s.verified))
    }

    /// Persists `verified` under `key`, replacing any previous entry.
    pub fn put(&self, key: &str, verified: &VerifiedLicense) -> Result<(), StoreError> {
        if self.mode == OpenMode::ReadOnly {
            return Err(StoreError::ReadOnly);
        }
        let stored = StoredAnalysis {
            key: key.to_string(),
            input_digest: verified.audit.input_digest.clone(),
            verified: verified.clone(),
        };
        let blob = document::to_canonical_string(&stored);
        self.write_atomic(&self.blob_path(key), blob.as_bytes())?;

        let mut index = self.index()?;
        index.entries.insert(
            key.to_string(),
            IndexEntry {
                dataset_name: verified.dataset_name().to_string(),
                blob_sha256: document::sha256_hex(blob.as_bytes()),
                input_digest: stored.input_digest,
            },
        );
        self.write_atomic(&self.root.join(INDEX_FILE), document::to_canonical_string(&index).as_bytes())
    }

    pub fn remove(&self, key: &str) -> Result<(), StoreError> {
        if self.mode == OpenMode::ReadOnly {
            return Err(StoreError::ReadOnly);
        }
        let mut index = self.index()?;
        if index.entries.remove(key).is_none() {
            return Err(StoreError::UnknownEntry(key.to_string()));
        }
        self.write_atomic(&self.root.join(INDEX_FILE), document::to_canonical_string(&index).as_bytes())?;
        let path = self.blob_path(key);
        match fs::remove_file(&path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root).map_err(io_err(&self.root))?;
        tmp.write_all(bytes).map_err(io_err(path))?;
        tmp.as_file().sync_all().map_err(io_err(path))?;
        tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
        Ok(())
    }

    /// Returns the stored result when one exists for the same inputs;
    /// otherwise verifies, persists (unless read-only) and returns the fresh
    /// result.
    pub fn lookup_or_verify(
        &self,
        graph: &LineageGraph,
        interpretations: &Interpretations,
        policy: Policy,
    ) -> Result<Lookup, StoreError> {
        let key = analysis_key(graph.root(), &policy);
        let input_digest = Audit::compute(graph, interpretations, policy).input_digest;
        let mut warnings = Vec::new();

        let index = self.index()?;
        if let Some(stored) = self.load(&key, &index)? {
            if stored.input_digest == input_digest && stored.verified.audit.input_digest == input_digest {
                return Ok(Lookup { verified: stored.verified, cache_hit: true, key, warnings });
            }
            warnings.push(StoreWarning::StaleEntry { key: key.clone() });
        }

        let verified = verify(graph, interpretations, policy)?;
        match self.mode {
            OpenMode::ReadWrite => self.put(&key, &verified)?,
            OpenMode::ReadOnly => warnings.push(StoreWarning::NotPersisted { key: key.clone() }),
        }
        Ok(Lookup { verified, cache_hit: false, key, warnings })
    }
}
