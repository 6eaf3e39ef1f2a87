use std::path::Path;

use anyhow::{bail, Context};
use matchscope_core::exec::RunManifest;
use matchscope_core::WitnessCertificate;
use serde::Serialize;
use serde_json::{json, Value};

use crate::envelope::{emit, Execution};
use crate::{Ctx, EXIT_USAGE};

const KINDS: [&str; 5] =
    ["group-unmatchable", "group-no-acyclic", "linear-unmatched", "linear-no-acyclic", "theorem-discrepancy"];

/// Collects every certificate in `v`, outermost first. A certificate's own
/// nested evidence is verified as part of it, not separately.
fn collect(v: &Value, path: &str, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            if map.get("kind").and_then(Value::as_str).is_some_and(|k| KINDS.contains(&k)) {
                out.push((path.to_string(), v.clone()));
                return;
            }
            for (k, child) in map {
                collect(child, &format!("{path}/{k}"), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                collect(child, &format!("{path}/{i}"), out);
            }
        }
        _ => {}
    }
}

#[derive(Serialize)]
struct Checked {
    location: String,
    kind: String,
    valid: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    certificates: usize,
    valid: usize,
    rejected: usize,
    discrepancies: usize,
    results: Vec<Checked>,
}

pub(crate) fn run(ctx: &Ctx, path: &Path) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let mut found = Vec::new();
    collect(&doc, "", &mut found);
    if found.is_empty() {
        bail!("no certificate found in {}", path.display());
    }
    let mut results = Vec::new();
    let mut discrepancies = 0;
    for (location, v) in found {
        let kind = v["kind"].as_str().unwrap_or_default().to_string();
        let checked = match serde_json::from_value::<WitnessCertificate>(v) {
            Err(e) => Checked { location, kind, valid: false, detail: format!("malformed certificate: {e}") },
            Ok(cert) => match cert.verify() {
                Ok(ver) => {
                    if cert.is_discrepancy() {
                        discrepancies += 1;
                    }
                    Checked { location, kind, valid: true, detail: ver.detail }
                }
                Err(e) => Checked { location, kind, valid: false, detail: e.to_string() },
            },
        };
        results.push(checked);
    }
    let valid = results.iter().filter(|c| c.valid).count();
    let rejected = results.len() - valid;
    let summary: Vec<String> = results
        .iter()
        .map(|c| {
            let at = if c.location.is_empty() { String::new() } else { format!(" at {}", c.location) };
            format!("{} {}{at}: {}", if c.valid { "VALID" } else { "REJECTED" }, c.kind, c.detail)
        })
        .collect();
    let report = VerifyReport { certificates: results.len(), valid, rejected, discrepancies, results };
    let manifest = RunManifest::new("verify", json!({ "certificate": path.display().to_string() }), None);
    let code = emit(ctx, manifest, Execution::default(), report, discrepancies, &summary)?;
    Ok(if rejected > 0 { EXIT_USAGE } else { code })
}
