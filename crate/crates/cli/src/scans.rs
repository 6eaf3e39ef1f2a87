use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use matchscope_core::exec::{execute, merge_partials, read_stream, read_stream_manifest, write_stream, ExecOptions, ScanJob, Stream};
use matchscope_core::free_scan::{FreeScan, FreeScanConfig, FreeScanReport};
use matchscope_core::group_scan::{
    GroupScan, GroupScanConfig, GroupScanReport, PrimeClassification, PrimesConfig, PrimesReport, ScanMode,
};
use matchscope_core::linear::{
    AcyclicScan, AcyclicScanConfig, AcyclicScanReport, PropertyScan, PropertyScanConfig, PropertyScanReport,
};
use matchscope_core::{AbelianGroup, Error};
use serde::de::DeserializeOwned;

use crate::envelope::{emit, Execution};
use crate::Ctx;

/// What the CLI needs from a scan report besides serializing it.
pub(crate) trait ScanSummary {
    fn discrepancy_count(&self) -> usize;
    fn summary(&self) -> Vec<String>;
}

fn coverage_line(c: &matchscope_core::group_scan::Coverage) -> String {
    let kind = if c.exhaustive_coverage { "exhaustive" } else if c.complete { "complete, not exhaustive" } else { "partial" };
    format!("coverage: {}/{} units ({kind})", c.units_classified, c.units_total)
}

impl ScanSummary for GroupScanReport {
    fn discrepancy_count(&self) -> usize {
        self.discrepancies.len()
    }

    fn summary(&self) -> Vec<String> {
        vec![
            format!("{} sizes 1..={} ({:?})", self.group, self.max_size, self.mode),
            format!("matching property: {}", self.matching_property.label()),
            format!("acyclic matching property: {}", self.acyclic_matching_property.label()),
            coverage_line(&self.coverage),
        ]
    }
}

impl ScanSummary for PrimesReport {
    fn discrepancy_count(&self) -> usize {
        self.scans.iter().map(|s| s.discrepancies.len()).sum()
    }

    fn summary(&self) -> Vec<String> {
        self.summary
            .iter()
            .map(|v| {
                format!(
                    "z{} sizes 1..={}{}: matching property {}, acyclic matching property {}",
                    v.p,
                    v.max_size,
                    if v.full_size_range { " (full range)" } else { "" },
                    v.matching_property,
                    v.acyclic_matching_property
                )
            })
            .collect()
    }
}

impl ScanSummary for FreeScanReport {
    fn discrepancy_count(&self) -> usize {
        self.discrepancies.len()
    }

    fn summary(&self) -> Vec<String> {
        vec![
            format!("{} window {} sizes 1..={}", self.group, self.window, self.max_size),
            format!(
                "{} of {} sampled pairs have an acyclic matching ({} without, {} inconclusive)",
                self.pairs_with_acyclic, self.coverage.units_classified, self.pairs_without_acyclic, self.inconclusive_pairs
            ),
            format!("acyclic matching property: {}", self.acyclic_matching_property.label()),
            coverage_line(&self.coverage),
        ]
    }
}

impl ScanSummary for PropertyScanReport {
    fn discrepancy_count(&self) -> usize {
        self.discrepancies.len()
    }

    fn summary(&self) -> Vec<String> {
        vec![
            format!(
                "{} dim {}: {} pairs, {} excluded (1 ∈ B), {} unmatched",
                self.tower, self.dim, self.pairs_total, self.pairs_excluded, self.unmatched_pairs
            ),
            format!(
                "linear matching property: {} (predicted {}, {})",
                self.linear_matching_property.label(),
                self.prediction.predicted,
                self.prediction.agreement
            ),
            coverage_line(&self.coverage),
        ]
    }
}

impl ScanSummary for AcyclicScanReport {
    fn discrepancy_count(&self) -> usize {
        self.discrepancies.len()
    }

    fn summary(&self) -> Vec<String> {
        vec![
            format!(
                "{} dims {:?} ({}): {} with an acyclic strong matching, {} without, {} excluded",
                self.tower, self.dims, self.mode, self.pairs_with_acyclic, self.pairs_without_acyclic, self.pairs_excluded
            ),
            format!("linear acyclic matching property: {}", self.acyclic_matching_property.label()),
            coverage_line(&self.coverage),
        ]
    }
}

fn parse_shard(s: &str) -> anyhow::Result<(usize, usize)> {
    let (i, k) = s.split_once('/').context("shard must look like I/K")?;
    let (i, k) = (i.trim().parse()?, k.trim().parse()?);
    if k == 0 || i >= k {
        bail!("shard {i}/{k}: need 0 <= I < K");
    }
    Ok((i, k))
}

fn stream_path(ctx: &Ctx) -> Option<PathBuf> {
    match &ctx.global.emit_pairs {
        Some(Some(p)) => Some(p.clone()),
        Some(None) => Some(match &ctx.global.out {
            Some(out) => out.with_extension("pairs.jsonl"),
            None => PathBuf::from("pairs.jsonl"),
        }),
        None => None,
    }
}

fn open_stream<R: DeserializeOwned>(path: &Path) -> anyhow::Result<Stream<R>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_stream(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))?)
}

fn check_manifest<J: ScanJob>(job: &J, stream: &Stream<J::Record>, path: &Path) -> anyhow::Result<()> {
    if stream.manifest != *job.manifest() || stream.total != job.unit_count() {
        return Err(Error::MixedManifest(format!("{} was produced under a different manifest", path.display())).into());
    }
    Ok(())
}

fn run_job<J>(ctx: &Ctx, job: J) -> anyhow::Result<i32>
where
    J: ScanJob,
    J::Report: ScanSummary,
{
    let resumed = match &ctx.global.resume {
        Some(path) => {
            let s = open_stream::<J::Record>(path)?;
            check_manifest(&job, &s, path)?;
            s.records
        }
        None => BTreeMap::new(),
    };
    let shard = ctx.global.shard.as_deref().map(parse_shard).transpose()?;
    let deadline = match ctx.global.budget {
        Some(b) if !(b > 0.0 && b.is_finite()) => bail!("budget must be a positive number of seconds"),
        Some(b) => Some(Instant::now() + Duration::from_secs_f64(b)),
        None => None,
    };
    let opts = ExecOptions { workers: ctx.global.workers, deadline, shard };
    let outcome = execute(&job, &opts, resumed)?;
    let execution = Execution { shard: ctx.global.shard.clone(), budget_exhausted: outcome.budget_exhausted };
    finish(ctx, &job, outcome.records, execution)
}

fn finish<J>(ctx: &Ctx, job: &J, records: Vec<Option<J::Record>>, execution: Execution) -> anyhow::Result<i32>
where
    J: ScanJob,
    J::Report: ScanSummary,
{
    if let Some(path) = stream_path(ctx) {
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut w = BufWriter::new(f);
        write_stream(&mut w, job.manifest(), &records)?;
        w.flush()?;
    }
    let report = job.build_report(&records)?;
    let mut summary = report.summary();
    if execution.budget_exhausted {
        summary.push("budget exhausted; unfinished units are not classified".into());
    }
    let n = report.discrepancy_count();
    emit(ctx, job.manifest().clone(), execution, report, n, &summary)
}

pub(crate) fn scan_group(
    ctx: &Ctx,
    group: String,
    max_size: Option<usize>,
    mode: ScanMode,
    samples: Option<usize>,
) -> anyhow::Result<i32> {
    let g = AbelianGroup::parse(&group)?;
    let order = g.order().context("group scans need a finite group; use `scan free` for Z^k")?;
    let sampled = mode == ScanMode::Sampled;
    let config = GroupScanConfig {
        group: g.descriptor(),
        max_size: max_size.unwrap_or(order.saturating_sub(1) as usize),
        mode,
        cap: ctx.global.cap,
        samples: if sampled { Some(samples.unwrap_or(1000)) } else { None },
        seed: sampled.then_some(ctx.global.seed),
    };
    run_job(ctx, GroupScan::new(config)?)
}

pub(crate) fn scan_primes(ctx: &Ctx, primes: Vec<u64>, max_size: usize, mode: ScanMode) -> anyhow::Result<i32> {
    let config = PrimesConfig { primes, max_size, mode, cap: ctx.global.cap };
    run_job(ctx, PrimeClassification::new(config)?)
}

pub(crate) fn scan_free(ctx: &Ctx, rank: usize, window: u32, samples: usize, max_size: usize) -> anyhow::Result<i32> {
    let config = FreeScanConfig { rank, window, max_size, samples, seed: ctx.global.seed, cap: ctx.global.cap };
    run_job(ctx, FreeScan::new(config)?)
}

pub(crate) fn scan_property(ctx: &Ctx, tower: String, dim: usize) -> anyhow::Result<i32> {
    run_job(ctx, PropertyScan::new(PropertyScanConfig { tower, dim })?)
}

pub(crate) fn scan_acyclic(ctx: &Ctx, tower: String, dim: usize, max_deg: usize, samples: usize) -> anyhow::Result<i32> {
    let any = matchscope_core::field::AnyTower::parse(&tower)?;
    let finite = matchscope_core::with_tower!(any, t => t.is_finite_extension());
    let config = if finite {
        AcyclicScanConfig { tower, dim, max_deg: None, samples: None, seed: None }
    } else {
        AcyclicScanConfig { tower, dim, max_deg: Some(max_deg), samples: Some(samples), seed: Some(ctx.global.seed) }
    };
    run_job(ctx, AcyclicScan::new(config)?)
}

fn merge_job<J>(ctx: &Ctx, job: J, inputs: &[PathBuf]) -> anyhow::Result<i32>
where
    J: ScanJob,
    J::Record: PartialEq,
    J::Report: ScanSummary,
{
    let mut parts = Vec::new();
    for path in inputs {
        let s = open_stream::<J::Record>(path)?;
        check_manifest(&job, &s, path)?;
        parts.push(s);
    }
    let merged = merge_partials(parts)?;
    finish(ctx, &job, merged.into_records(), Execution::default())
}

fn params<T: DeserializeOwned>(v: &serde_json::Value) -> anyhow::Result<T> {
    serde_json::from_value(v.clone()).context("stream manifest parameters")
}

/// Merges pair streams and rebuilds the report from the manifest they share.
pub(crate) fn merge(ctx: &Ctx, inputs: &[PathBuf]) -> anyhow::Result<i32> {
    let first = &inputs[0];
    let f = File::open(first).with_context(|| format!("opening {}", first.display()))?;
    let (manifest, _) = read_stream_manifest(BufReader::new(f))?;
    let p = &manifest.parameters;
    match manifest.command.as_str() {
        "scan group" => merge_job(ctx, GroupScan::new(params(p)?)?, inputs),
        "scan primes" => merge_job(ctx, PrimeClassification::new(params(p)?)?, inputs),
        "scan free" => merge_job(ctx, FreeScan::new(params(p)?)?, inputs),
        "linear scan-property" => merge_job(ctx, PropertyScan::new(params(p)?)?, inputs),
        "linear scan-acyclic" => merge_job(ctx, AcyclicScan::new(params(p)?)?, inputs),
        other => bail!("`{other}` does not produce pair streams"),
    }
}
