use matchscope_core::certificate;
use matchscope_core::exec::RunManifest;
use matchscope_core::matching::{
    acyclic_report, enumerate_matchings, find_matching_or_obstruction, fingerprint, AcyclicReport, Fingerprint,
    HallViolator,
};
use matchscope_core::{AbelianGroup, GroupElement, Matching, SubsetPair, Tristate, WitnessCertificate};
use serde::Serialize;
use serde_json::json;

use crate::envelope::{emit, Execution};
use crate::{Ctx, PairArgs};

fn load(args: &PairArgs) -> anyhow::Result<(AbelianGroup, SubsetPair)> {
    let g = AbelianGroup::parse(&args.group)?;
    let a = g.parse_set(&args.set_a)?;
    let b = g.parse_set(&args.set_b)?;
    let pair = matchscope_core::group::validate_pair(&g, &a, &b)?;
    Ok((g, pair))
}

fn manifest(command: &str, g: &AbelianGroup, pair: &SubsetPair, cap: Option<usize>) -> RunManifest {
    let mut params = json!({
        "group": g.descriptor(),
        "a": g.format_set(pair.a()),
        "b": g.format_set(pair.b()),
    });
    if let Some(cap) = cap {
        params["cap"] = json!(cap);
    }
    RunManifest::new(command, params, None)
}

#[derive(Serialize)]
struct FindReport {
    group: String,
    a: Vec<GroupElement>,
    b: Vec<GroupElement>,
    /// `0 ∉ B`
    admissible: bool,
    matchable: bool,
    matching: Option<Matching>,
    hall_violator: Option<HallViolator>,
    certificate: Option<WitnessCertificate>,
}

pub(crate) fn find(ctx: &Ctx, args: &PairArgs) -> anyhow::Result<i32> {
    let (g, pair) = load(args)?;
    let found = find_matching_or_obstruction(&g, &pair)?;
    let admissible = !pair.zero_in_b();
    let certificate = match (&found, admissible) {
        (Err(_), true) => Some(certificate::group_unmatchable(&g, &pair)?),
        _ => None,
    };
    let (matching, hall_violator) = match found {
        Ok(m) => (Some(m), None),
        Err(h) => (None, Some(h)),
    };
    let summary = vec![match &matching {
        Some(m) => format!("matching: {}", format_matching(m)),
        None => "no matching".to_string(),
    }];
    let report = FindReport {
        group: g.descriptor(),
        a: pair.a().to_vec(),
        b: pair.b().to_vec(),
        admissible,
        matchable: matching.is_some(),
        matching,
        hall_violator,
        certificate,
    };
    emit(ctx, manifest("match find", &g, &pair, None), Execution::default(), report, 0, &summary)
}

#[derive(Serialize)]
struct Entry {
    matching: Matching,
    fingerprint: Fingerprint,
}

#[derive(Serialize)]
struct EnumerateReport {
    group: String,
    a: Vec<GroupElement>,
    b: Vec<GroupElement>,
    exhaustive: bool,
    matching_count: usize,
    matchings: Vec<Entry>,
}

pub(crate) fn enumerate(ctx: &Ctx, args: &PairArgs) -> anyhow::Result<i32> {
    let (g, pair) = load(args)?;
    let cap = ctx.global.cap;
    let en = enumerate_matchings(&g, &pair, cap)?;
    let matchings = en
        .matchings
        .into_iter()
        .map(|m| Ok(Entry { fingerprint: fingerprint(&g, &m)?, matching: m }))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let summary = vec![format!(
        "{} matching(s){}",
        matchings.len(),
        if en.exhaustive { "" } else { " before the cap; enumeration inconclusive" }
    )];
    let report = EnumerateReport {
        group: g.descriptor(),
        a: pair.a().to_vec(),
        b: pair.b().to_vec(),
        exhaustive: en.exhaustive,
        matching_count: matchings.len(),
        matchings,
    };
    emit(ctx, manifest("match enumerate", &g, &pair, Some(cap)), Execution::default(), report, 0, &summary)
}

#[derive(Serialize)]
struct AcyclicCmdReport {
    group: String,
    a: Vec<GroupElement>,
    b: Vec<GroupElement>,
    has_acyclic: Tristate,
    #[serde(flatten)]
    classes: AcyclicReport,
    certificate: Option<WitnessCertificate>,
}

pub(crate) fn acyclic(ctx: &Ctx, args: &PairArgs) -> anyhow::Result<i32> {
    let (g, pair) = load(args)?;
    let cap = ctx.global.cap;
    let rep = acyclic_report(&g, &pair, cap)?;
    let has = rep.has_acyclic();
    let certificate = match has {
        Some(false) if !pair.zero_in_b() => Some(if rep.matching_count == 0 {
            certificate::group_unmatchable(&g, &pair)?
        } else {
            certificate::group_no_acyclic(&g, &pair, cap)?
        }),
        _ => None,
    };
    let summary = vec![match has {
        Some(true) => format!("{} acyclic matching(s) of {}", rep.acyclic_matchings.len(), rep.matching_count),
        Some(false) => format!("no acyclic matching among {} matching(s)", rep.matching_count),
        None => format!("inconclusive: cap of {cap} matchings reached"),
    }];
    let report = AcyclicCmdReport {
        group: g.descriptor(),
        a: pair.a().to_vec(),
        b: pair.b().to_vec(),
        has_acyclic: Tristate::from(has),
        classes: rep,
        certificate,
    };
    emit(ctx, manifest("match acyclic", &g, &pair, Some(cap)), Execution::default(), report, 0, &summary)
}

fn format_matching(m: &Matching) -> String {
    m.pairs().iter().map(|(a, b)| format!("{a}->{b}")).collect::<Vec<_>>().join(" ")
}
