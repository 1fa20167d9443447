use std::path::PathBuf;

use clap::Args;
use clap::Parser;
use clap::Subcommand;
use clap::ValueEnum;
use dla_core::catalog::RightScope;
use dla_core::store::ENV_STORE;
use dla_core::Strictness;

/// Dataset license compliance analysis.
///
/// Exit codes: 0 permitted, 1 validation failure, 2 lineage failure,
/// 3 scenario denied, 64 I/O or usage error.
#[derive(Debug, Parser)]
#[command(name = "dla", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,

    /// Analysis store directory.
    #[arg(long, global = true, env = ENV_STORE, value_name = "DIR")]
    pub store: Option<PathBuf>,

    /// Read from the store but never write to it.
    #[arg(long, global = true)]
    pub store_read_only: bool,

    /// Reject unknown fields in input documents (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    pub strict: bool,

    /// Warn about unknown fields in input documents instead of rejecting them.
    #[arg(long, global = true)]
    pub lenient: bool,

    /// Treat sources with unavailable licenses as denying every right.
    #[arg(long, global = true)]
    pub unknown_denies: bool,

    /// Add a generation timestamp to reports.
    #[arg(long, global = true)]
    pub audit_timestamps: bool,

    /// Extra license template directory (repeatable).
    #[arg(long = "templates", global = true, value_name = "DIR")]
    pub template_dirs: Vec<PathBuf>,

    /// Extend the rights schema with a custom right, as NAME=standalone or
    /// NAME=model (repeatable).
    #[arg(long = "custom-right", global = true, value_name = "NAME=SCOPE", value_parser = parse_custom_right)]
    pub custom_rights: Vec<(String, RightScope)>,
}

impl Global {
    pub fn strictness(&self) -> Strictness {
        if self.lenient {
            Strictness::Lenient
        } else {
            Strictness::Strict
        }
    }
}

fn parse_custom_right(s: &str) -> Result<(String, RightScope), String> {
    let (name, scope) = s.split_once('=').ok_or("expected NAME=standalone or NAME=model")?;
    let scope = match scope {
        "standalone" => RightScope::Standalone,
        "model" => RightScope::Model,
        other => return Err(format!("unknown scope `{other}`, expected standalone or model")),
    };
    Ok((name.to_string(), scope))
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Bundle directories (each with lineage.json and interpretations/), or
    /// a lineage document followed by its interpretations directory.
    #[arg(required = true, value_name = "PATH")]
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate documents or bundle directories.
    Validate {
        #[arg(required = true, value_name = "PATH")]
        paths: Vec<PathBuf>,
    },
    /// Show a lineage graph with license ranges and selected captures.
    Lineage {
        /// Lineage document or bundle directory.
        input: PathBuf,
        /// Directory of per-source capture lists (defaults to a bundle's
        /// captures/ directory).
        #[arg(long, value_name = "DIR")]
        captures: Option<PathBuf>,
    },
    /// Print the license range of every node.
    Range {
        /// Lineage document or bundle directory.
        input: PathBuf,
    },
    /// Compute the verified license of each root dataset.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Assess usage scenarios against verified licenses.
    Assess {
        #[command(flatten)]
        inputs: Inputs,
        /// Scenario document (JSON array of {id, required_rights}).
        #[arg(long, value_name = "FILE")]
        scenarios: Option<PathBuf>,
        /// Exit 0 even when a scenario is denied.
        #[arg(long)]
        no_gate: bool,
    },
    /// Inspect or prune the analysis store.
    Store {
        #[command(subcommand)]
        command: StoreCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum StoreCommand {
    /// List stored analyses.
    Ls,
    /// Remove stored analyses by key.
    Rm {
        #[arg(required = true)]
        keys: Vec<String>,
    },
}
