//! `verify` and `assess`.

use std::fmt::Write as _;
use std::path::Path;

use dla_core::assessment::render_markdown;
use dla_core::assessment::AssessmentTable;
use dla_core::bundle::TemplateUse;
use dla_core::document;
use dla_core::engine::NodeInterpretation;
use dla_core::rights::Grant;
use dla_core::UsageScenario;
use dla_core::VerifiedLicense;
use serde::Serialize;

use crate::args::Format;
use crate::context::analyze;
use crate::context::resolve_bundles;
use crate::context::timestamp;
use crate::context::warn;
use crate::context::Analysis;
use crate::context::Context;
use crate::failure::document_code;
use crate::failure::Failure;
use crate::failure::EXIT_DENIED;
use crate::failure::EXIT_OK;

#[derive(Serialize)]
struct Envelope<R> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    reports: Vec<R>,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    verified: &'a VerifiedLicense,
    templates: &'a [TemplateUse],
}

#[derive(Serialize)]
struct AssessReport<'a> {
    table: &'a AssessmentTable,
    verified: &'a VerifiedLicense,
    templates: &'a [TemplateUse],
}

fn analyze_all(ctx: &Context, paths: &[std::path::PathBuf]) -> Result<Vec<Analysis>, Failure> {
    let bundles = resolve_bundles(paths)?;
    let store = ctx.store()?;
    bundles.iter().map(|b| analyze(ctx, store.as_ref(), b)).collect()
}

fn envelope<R>(ctx: &Context, reports: Vec<R>) -> Envelope<R> {
    Envelope { generated_at: ctx.audit_timestamps.then(timestamp), reports }
}

pub fn cmd_verify(ctx: &Context, paths: &[std::path::PathBuf]) -> Result<u8, Failure> {
    let analyses = analyze_all(ctx, paths)?;
    match ctx.format {
        Format::Json => {
            let reports = analyses
                .iter()
                .map(|a| VerifyReport { verified: &a.verified, templates: &a.bundle.templates })
                .collect();
            print!("{}", document::to_canonical_string(&envelope(ctx, reports)));
        }
        Format::Markdown => {
            let mut out = String::new();
            for (i, a) in analyses.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                render_verified(&mut out, a);
            }
            if ctx.audit_timestamps {
                let _ = writeln!(out, "\nGenerated at {}", timestamp());
            }
            print!("{out}");
        }
    }
    Ok(EXIT_OK)
}

fn grant_str(g: Grant) -> &'static str {
    match g {
        Grant::Granted => "granted",
        Grant::Denied => "denied",
        Grant::Unspecified => "unspecified",
    }
}

fn render_verified(out: &mut String, a: &Analysis) {
    let v = &a.verified;
    let own = a.bundle.interpretations.get(&v.root_id).and_then(NodeInterpretation::vector);
    let _ = writeln!(out, "## {} (`{}`)\n", v.dataset_name(), v.root_id);
    out.push_str("| Right | Own | Verified | Obligations | Restricted by |\n|---|---|---|---|---|\n");
    for right in v.right_names() {
        let own_grant = own.map_or(Grant::Unspecified, |o| o.grant(&right));
        let verified = v.grant(&right);
        let mark = if v.changed.contains(&right) { " (changed)" } else { "" };
        let obligations: Vec<&str> = v.rights.obligations(&right).iter().map(|o| o.id.as_str()).collect();
        let _ = writeln!(
            out,
            "| {right} | {} | {}{mark} | {} | {} |",
            grant_str(own_grant),
            grant_str(verified),
            obligations.join(", "),
            v.restrictors(&right).join(", "),
        );
    }
    if !v.residual_risk_flags.is_empty() {
        let _ = writeln!(out, "\nLicense unavailable: {}", v.residual_risk_flags.join(", "));
    }
    for t in &a.bundle.templates {
        let _ =
            writeln!(out, "\nTemplate for `{}`: {} {} (sha256 {})", t.subject_id, t.license_id, t.version, t.digest);
    }
    let _ = writeln!(out, "\nInput digest: {}", v.audit.input_digest);
}

fn load_scenarios(ctx: &Context, path: Option<&Path>) -> Result<Vec<UsageScenario>, Failure> {
    let Some(path) = path else {
        return Ok(dla_core::default_scenarios());
    };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let parsed = document::parse::<Vec<UsageScenario>>(&text, ctx.strictness)
        .map_err(|e| Failure::new(document_code(&e), anyhow::Error::new(e).context(path.display().to_string())))?;
    for w in &parsed.warnings {
        warn(format!("{}: {w}", path.display()));
    }
    Ok(parsed.value)
}

pub fn cmd_assess(
    ctx: &Context,
    paths: &[std::path::PathBuf],
    scenarios: Option<&Path>,
    no_gate: bool,
) -> Result<u8, Failure> {
    let scenarios = load_scenarios(ctx, scenarios)?;
    let analyses = analyze_all(ctx, paths)?;
    let tables =
        analyses.iter().map(|a| dla_core::assess_all(&a.verified, &scenarios)).collect::<Result<Vec<_>, _>>()?;

    match ctx.format {
        Format::Json => {
            let reports = analyses
                .iter()
                .zip(&tables)
                .map(|(a, table)| AssessReport { table, verified: &a.verified, templates: &a.bundle.templates })
                .collect();
            print!("{}", document::to_canonical_string(&envelope(ctx, reports)));
        }
        Format::Markdown => {
            let mut out = render_markdown(&tables);
            let templates: Vec<&TemplateUse> = analyses.iter().flat_map(|a| &a.bundle.templates).collect();
            if !templates.is_empty() {
                out.push_str("\nTemplates:\n");
                for t in templates {
                    let _ = writeln!(out, "- `{}`: {} {} (sha256 {})", t.subject_id, t.license_id, t.version, t.digest);
                }
            }
            if ctx.audit_timestamps {
                let _ = writeln!(out, "\nGenerated at {}", timestamp());
            }
            print!("{out}");
        }
    }

    let denied = tables.iter().any(|t| !t.all_permitted());
    Ok(if denied && !no_gate { EXIT_DENIED } else { EXIT_OK })
}
