use std::path::Path;
use std::path::PathBuf;

use dla_core::bundle;
use dla_core::bundle::Bundle;
use dla_core::catalog::Catalog;
use dla_core::engine::verify;
use dla_core::store::OpenMode;
use dla_core::AnalysisStore;
use dla_core::Policy;
use dla_core::Strictness;
use dla_core::VerifiedLicense;

use crate::args::Format;
use crate::args::Global;
use crate::failure::catalog_code;
use crate::failure::Failure;

pub struct Context {
    pub catalog: Catalog,
    pub strictness: Strictness,
    pub policy: Policy,
    pub format: Format,
    pub audit_timestamps: bool,
    store: Option<PathBuf>,
    store_read_only: bool,
}

impl Context {
    pub fn new(global: &Global) -> Result<Self, Failure> {
        let mut catalog = Catalog::builtin();
        for dir in &global.template_dirs {
            catalog = catalog.load_dir(dir).map_err(|e| {
                Failure::new(catalog_code(&e), anyhow::Error::new(e).context(format!("templates {}", dir.display())))
            })?;
        }
        for (name, scope) in &global.custom_rights {
            catalog.extend_schema(name, *scope).map_err(|e| Failure::new(catalog_code(&e), e))?;
        }
        Ok(Self {
            catalog,
            strictness: global.strictness(),
            policy: Policy { unknown_denies: global.unknown_denies },
            format: global.format,
            audit_timestamps: global.audit_timestamps,
            store: global.store.clone(),
            store_read_only: global.store_read_only,
        })
    }

    pub fn store(&self) -> Result<Option<AnalysisStore>, Failure> {
        let Some(root) = &self.store else {
            return Ok(None);
        };
        let mode = if self.store_read_only { OpenMode::ReadOnly } else { OpenMode::ReadWrite };
        Ok(Some(AnalysisStore::open(root, mode)?))
    }

    pub fn require_store(&self) -> Result<AnalysisStore, Failure> {
        self.store()?.ok_or_else(|| Failure::io("no analysis store configured; pass --store or set DLA_STORE"))
    }
}

/// Where a bundle's documents live.
#[derive(Debug, Clone)]
pub struct BundlePaths {
    pub lineage: PathBuf,
    pub interpretations: PathBuf,
}

pub fn resolve_bundles(paths: &[PathBuf]) -> Result<Vec<BundlePaths>, Failure> {
    if let [lineage, interpretations] = paths {
        if lineage.is_file() {
            if !interpretations.is_dir() {
                return Err(Failure::io(format!("{}: not a directory", interpretations.display())));
            }
            return Ok(vec![BundlePaths { lineage: lineage.clone(), interpretations: interpretations.clone() }]);
        }
    }
    paths
        .iter()
        .map(|dir| {
            let lineage = dir.join("lineage.json");
            let interpretations = dir.join("interpretations");
            if !lineage.is_file() || !interpretations.is_dir() {
                return Err(Failure::io(format!(
                    "{}: not a bundle directory (expected lineage.json and interpretations/)",
                    dir.display()
                )));
            }
            Ok(BundlePaths { lineage, interpretations })
        })
        .collect()
}

/// A lineage document path, given either the document or its bundle
/// directory.
pub fn lineage_path(input: &Path) -> PathBuf {
    if input.is_dir() {
        input.join("lineage.json")
    } else {
        input.to_path_buf()
    }
}

pub fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

/// A loaded bundle and its verified license.
pub struct Analysis {
    pub bundle: Bundle,
    pub verified: VerifiedLicense,
}

pub fn analyze(ctx: &Context, store: Option<&AnalysisStore>, paths: &BundlePaths) -> Result<Analysis, Failure> {
    let bundle = bundle::load_bundle(&paths.lineage, &paths.interpretations, &ctx.catalog, ctx.strictness)?;
    for w in &bundle.warnings {
        warn(w);
    }
    let verified = match store {
        Some(store) => {
            let lookup = store.lookup_or_verify(&bundle.graph, &bundle.interpretations, ctx.policy)?;
            for w in &lookup.warnings {
                warn(w);
            }
            eprintln!(
                "store: {} {} ({})",
                if lookup.cache_hit { "hit" } else { "miss" },
                lookup.key,
                bundle.graph.root_id()
            );
            lookup.verified
        }
        None => verify(&bundle.graph, &bundle.interpretations, ctx.policy)?,
    };
    Ok(Analysis { bundle, verified })
}

pub fn timestamp() -> String {
    humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string()
}
