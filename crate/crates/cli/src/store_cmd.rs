//! `store ls` and `store rm`.

use std::fmt::Write as _;

use dla_core::document;

use crate::args::Format;
use crate::args::StoreCommand;
use crate::context::Context;
use crate::failure::Failure;
use crate::failure::EXIT_OK;

pub fn cmd_store(ctx: &Context, command: &StoreCommand) -> Result<u8, Failure> {
    let store = ctx.require_store()?;
    match command {
        StoreCommand::Ls => {
            let index = store.index()?;
            match ctx.format {
                Format::Json => print!("{}", document::to_canonical_string(&index)),
                Format::Markdown => {
                    let mut out = String::from("| Key | Dataset | Input digest |\n|---|---|---|\n");
                    for (key, entry) in &index.entries {
                        let _ = writeln!(out, "| {key} | {} | {} |", entry.dataset_name, entry.input_digest);
                    }
                    print!("{out}");
                }
            }
        }
        StoreCommand::Rm { keys } => {
            for key in keys {
                store.remove(key)?;
                eprintln!("removed {key}");
            }
        }
    }
    Ok(EXIT_OK)
}
