use std::fs;
use std::io::Write;

use anyhow::Context;
use matchscope_core::exec::RunManifest;
use serde::{Deserialize, Serialize};

use crate::{Ctx, EXIT_DISCREPANCY, EXIT_OK};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command_line: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
    pub workers: usize,
}

/// Execution details that change the body, present only when non-default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub shard: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub budget_exhausted: bool,
}

impl Execution {
    fn is_default(&self) -> bool {
        *self == Execution::default()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Body<R> {
    pub manifest: RunManifest,
    #[serde(skip_serializing_if = "Execution::is_default", default)]
    pub execution: Execution,
    pub report: R,
}

/// The report file: a header with run metadata and a deterministic body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<R> {
    pub schema_version: u32,
    pub header: Header,
    pub body: Body<R>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn worker_count(requested: usize) -> usize {
    if requested > 0 {
        requested
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    }
}

/// Writes the report and returns the exit code.
pub(crate) fn emit<R: Serialize>(
    ctx: &Ctx,
    manifest: RunManifest,
    execution: Execution,
    report: R,
    discrepancies: usize,
    summary: &[String],
) -> anyhow::Result<i32> {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        header: Header {
            tool: manifest.tool.clone(),
            version: manifest.version.clone(),
            command_line: ctx.command_line.clone(),
            started_at: ctx.started_at.clone(),
            finished_at: now(),
            workers: worker_count(ctx.global.workers),
        },
        body: Body { manifest, execution, report },
    };
    let mut text = serde_json::to_string_pretty(&env)?;
    text.push('\n');
    match &ctx.global.out {
        Some(path) => fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if !ctx.global.quiet {
        for line in summary {
            eprintln!("{line}");
        }
        if discrepancies > 0 {
            eprintln!("THEOREM DISCREPANCY: {discrepancies} certificate(s) in the report");
        }
    }
    Ok(if discrepancies > 0 { EXIT_DISCREPANCY } else { EXIT_OK })
}
