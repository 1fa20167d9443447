//! Seeded random inputs and brute-force reference implementations for
//! testing `dla-core`.

pub mod gen;
pub mod oracle;

use std::path::PathBuf;

/// The workspace's `fixtures/` directory.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}
