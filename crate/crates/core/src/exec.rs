//! Deterministic parallel execution of scans.
//!
//! A scan is a fixed, canonically ordered list of work units. Workers share
//! nothing; results are collected by unit index, so the outcome does not
//! depend on the number of workers or on scheduling. Partial results can be
//! streamed as JSONL, resumed, and merged.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters that fully determine a scan's report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, seed: Option<u64>) -> Self {
        Self {
            tool: crate::TOOL_NAME.to_string(),
            version: crate::VERSION.to_string(),
            command: command.to_string(),
            parameters,
            seed,
        }
    }
}

pub trait ScanJob: Sync {
    type Record: Serialize + DeserializeOwned + Clone + Send + Sync;
    type Report: Serialize;

    fn manifest(&self) -> &RunManifest;
    fn unit_count(&self) -> usize;
    fn run_unit(&self, index: usize) -> Self::Record;
    /// `records[i]` is `None` for units that were not run.
    fn build_report(&self, records: &[Option<Self::Record>]) -> Result<Self::Report>;
}

#[derive(Debug, Clone, Default)]
pub struct ExecOptions {
    /// Worker threads; 0 means the rayon default.
    pub workers: usize,
    pub deadline: Option<Instant>,
    /// `(i, k)`: run only units with `index % k == i`.
    pub shard: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct Outcome<R> {
    pub records: Vec<Option<R>>,
    pub budget_exhausted: bool,
}

impl<R> Outcome<R> {
    pub fn completed(&self) -> usize {
        self.records.iter().filter(|r| r.is_some()).count()
    }
}

pub fn execute<J: ScanJob>(
    job: &J,
    opts: &ExecOptions,
    mut resumed: BTreeMap<usize, J::Record>,
) -> Result<Outcome<J::Record>> {
    if let Some((i, k)) = opts.shard {
        if k == 0 || i >= k {
            return Err(Error::Invalid(format!("bad shard {i}/{k}")));
        }
    }
    let n = job.unit_count();
    if let Some(&bad) = resumed.keys().find(|&&i| i >= n) {
        return Err(Error::MixedManifest(format!("resumed record index {bad} out of range")));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
    let computed: Vec<(Option<J::Record>, bool)> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                if resumed.contains_key(&i) {
                    return (None, false);
                }
                if let Some((s, k)) = opts.shard {
                    if i % k != s {
                        return (None, false);
                    }
                }
                if opts.deadline.is_some_and(|d| Instant::now() >= d) {
                    return (None, true);
                }
                (Some(job.run_unit(i)), false)
            })
            .collect()
    });
    let budget_exhausted = computed.iter().any(|(_, out)| *out);
    let records = computed
        .into_iter()
        .enumerate()
        .map(|(i, (r, _))| r.or_else(|| resumed.remove(&i)))
        .collect();
    Ok(Outcome { records, budget_exhausted })
}

#[derive(Serialize, Deserialize)]
struct StreamHeader {
    manifest: RunManifest,
    total: usize,
}

#[derive(Serialize, Deserialize)]
struct StreamLine<R> {
    index: usize,
    record: R,
}

/// Writes a JSONL pair stream: one header line, then one line per record.
pub fn write_stream<R: Serialize>(
    out: &mut impl Write,
    manifest: &RunManifest,
    records: &[Option<R>],
) -> std::io::Result<()> {
    let header = StreamHeader { manifest: manifest.clone(), total: records.len() };
    serde_json::to_writer(&mut *out, &header)?;
    out.write_all(b"\n")?;
    for (index, r) in records.iter().enumerate() {
        if let Some(record) = r {
            serde_json::to_writer(&mut *out, &StreamLine { index, record })?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub struct Stream<R> {
    pub manifest: RunManifest,
    pub total: usize,
    pub records: BTreeMap<usize, R>,
}

/// Reads the header line of a stream without parsing its records.
pub fn read_stream_manifest(input: impl BufRead) -> Result<(RunManifest, usize)> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty pair stream".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let header: StreamHeader =
        serde_json::from_str(&first).map_err(|e| Error::Parse(format!("stream header: {e}")))?;
    Ok((header.manifest, header.total))
}

pub fn read_stream<R: DeserializeOwned>(input: impl BufRead) -> Result<Stream<R>> {
    let mut lines = input.lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::Parse("empty pair stream".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let header: StreamHeader =
        serde_json::from_str(&first).map_err(|e| Error::Parse(format!("stream header: {e}")))?;
    let mut records = BTreeMap::new();
    for line in lines {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        // A truncated final line from an interrupted run is skipped.
        let Ok(entry) = serde_json::from_str::<StreamLine<R>>(&line) else {
            continue;
        };
        if entry.index >= header.total {
            return Err(Error::Parse(format!("record index {} out of range", entry.index)));
        }
        records.insert(entry.index, entry.record);
    }
    Ok(Stream { manifest: header.manifest, total: header.total, records })
}

/// Merges partial streams produced under one manifest. The result does not
/// depend on the order of `parts`.
pub fn merge_partials<R: PartialEq>(parts: Vec<Stream<R>>) -> Result<Stream<R>> {
    let mut iter = parts.into_iter();
    let mut merged = iter.next().ok_or_else(|| Error::MixedManifest("nothing to merge".into()))?;
    for part in iter {
        if part.manifest != merged.manifest || part.total != merged.total {
            return Err(Error::MixedManifest(format!(
                "manifest of `{}` differs from `{}`",
                part.manifest.command, merged.manifest.command
            )));
        }
        for (i, r) in part.records {
            match merged.records.get(&i) {
                Some(existing) if *existing != r => {
                    return Err(Error::MixedManifest(format!("conflicting records for unit {i}")));
                }
                Some(_) => {}
                None => {
                    merged.records.insert(i, r);
                }
            }
        }
    }
    Ok(merged)
}

impl<R> Stream<R> {
    pub fn into_records(mut self) -> Vec<Option<R>> {
        (0..self.total).map(|i| self.records.remove(&i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Squares(RunManifest);

    impl ScanJob for Squares {
        type Record = u64;
        type Report = Vec<Option<u64>>;
        fn manifest(&self) -> &RunManifest {
            &self.0
        }
        fn unit_count(&self) -> usize {
            50
        }
        fn run_unit(&self, i: usize) -> u64 {
            (i * i) as u64
        }
        fn build_report(&self, records: &[Option<u64>]) -> Result<Self::Report> {
            Ok(records.to_vec())
        }
    }

    fn job() -> Squares {
        Squares(RunManifest::new("squares", serde_json::json!({}), Some(1)))
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let j = job();
        let one = execute(&j, &ExecOptions { workers: 1, ..Default::default() }, BTreeMap::new()).unwrap();
        let eight = execute(&j, &ExecOptions { workers: 8, ..Default::default() }, BTreeMap::new()).unwrap();
        assert_eq!(one.records, eight.records);
        assert_eq!(one.completed(), 50);
    }

    #[test]
    fn shards_merge_in_any_order() {
        let j = job();
        let mut parts = Vec::new();
        for s in 0..3 {
            let o = execute(&j, &ExecOptions { shard: Some((s, 3)), ..Default::default() }, BTreeMap::new()).unwrap();
            let mut buf = Vec::new();
            write_stream(&mut buf, j.manifest(), &o.records).unwrap();
            parts.push(buf);
        }
        let full = execute(&j, &ExecOptions::default(), BTreeMap::new()).unwrap();
        for order in [[0, 1, 2], [2, 0, 1]] {
            let streams = order
                .iter()
                .map(|&k| read_stream::<u64>(parts[k].as_slice()).unwrap())
                .collect();
            let merged = merge_partials(streams).unwrap();
            assert_eq!(merged.into_records(), full.records);
        }
    }

    #[test]
    fn mismatched_seed_is_rejected() {
        let a = job();
        let b = Squares(RunManifest::new("squares", serde_json::json!({}), Some(2)));
        let mk = |j: &Squares| {
            let mut buf = Vec::new();
            write_stream::<u64>(&mut buf, j.manifest(), &[None; 50]).unwrap();
            read_stream::<u64>(buf.as_slice()).unwrap()
        };
        assert!(matches!(merge_partials(vec![mk(&a), mk(&b)]), Err(Error::MixedManifest(_))));
    }

    #[test]
    fn resume_completes_a_partial_run() {
        let j = job();
        let partial = execute(&j, &ExecOptions { shard: Some((0, 2)), ..Default::default() }, BTreeMap::new()).unwrap();
        let mut buf = Vec::new();
        write_stream(&mut buf, j.manifest(), &partial.records).unwrap();
        // simulate an interrupted write
        buf.extend_from_slice(b"{\"index\": 7, \"rec");
        let stream = read_stream::<u64>(buf.as_slice()).unwrap();
        let resumed = execute(&j, &ExecOptions::default(), stream.records).unwrap();
        let full = execute(&j, &ExecOptions::default(), BTreeMap::new()).unwrap();
        assert_eq!(resumed.records, full.records);
    }

    #[test]
    fn expired_deadline_marks_budget() {
        let j = job();
        let o = execute(
            &j,
            &ExecOptions { deadline: Some(Instant::now()), ..Default::default() },
            BTreeMap::new(),
        )
        .unwrap();
        assert!(o.budget_exhausted);
        assert_eq!(o.completed(), 0);
    }
}
