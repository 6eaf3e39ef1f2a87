//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! fails on any failure not listed in `KNOWN_FAILURES`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use itertools::Itertools;
use matchscope_cli::{run, EXIT_DISCREPANCY, EXIT_OK};
use matchscope_core::field::{AnyTower, PrimeField, Subspace, Tower};
use matchscope_core::group::validate_pair;
use matchscope_core::linear::{check_strong_criterion, find_matched_basis, is_matched_basis, verify_unmatched, BasisSeq};
use matchscope_core::matching::enumerate_matchings;
use matchscope_core::AbelianGroup;
use serde_json::{json, Value};
use tempfile::TempDir;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Run {
    code: i32,
    report: Value,
    path: PathBuf,
    body: String,
}

struct Suite {
    dir: TempDir,
    files: usize,
    /// Label and whether two runs under the same manifest gave identical bodies.
    repeats: Vec<(String, bool)>,
}

fn body_text(text: &str) -> String {
    let at = text.find("\"body\":").expect("envelope has a body");
    text[at..].to_string()
}

impl Suite {
    fn new() -> Self {
        Self { dir: tempfile::tempdir().unwrap(), files: 0, repeats: Vec::new() }
    }

    fn cli(&mut self, args: &[&str]) -> Run {
        self.files += 1;
        let path = self.dir.path().join(format!("report-{}.json", self.files));
        let mut argv = vec!["matchscope", "-q", "--out", path.to_str().unwrap()];
        argv.extend_from_slice(args);
        let code = run(argv);
        let text = std::fs::read_to_string(&path).unwrap_or_default();
        let envelope: Value = serde_json::from_str(&text).unwrap_or(Value::Null);
        let body = if text.is_empty() { String::new() } else { body_text(&text) };
        Run { code, report: envelope["body"]["report"].clone(), path, body }
    }

    /// Runs a command twice and records whether the reports agree.
    fn twice(&mut self, args: &[&str]) -> Run {
        let first = self.cli(args);
        let second = self.cli(args);
        self.repeats.push((args.join(" "), first.body == second.body && first.code == second.code));
        first
    }

    fn record<T: serde::Serialize>(&mut self, label: &str, a: &T, b: &T) {
        let same = serde_json::to_string(a).unwrap() == serde_json::to_string(b).unwrap();
        self.repeats.push((label.to_string(), same));
    }

    /// Exit code of `verify` on a report file.
    fn verify(&mut self, run: &Run) -> i32 {
        let path = run.path.to_str().unwrap().to_string();
        self.cli(&["verify", "--certificate", &path]).code
    }

    fn write(&mut self, v: &Value) -> PathBuf {
        self.files += 1;
        let path = self.dir.path().join(format!("cert-{}.json", self.files));
        std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
        path
    }
}

fn status(v: &Value) -> &str {
    v["status"].as_str().unwrap_or("missing")
}

// ---- criterion 1

fn brute_matchings(n: i64, a: &[i64], b: &[i64]) -> BTreeSet<Vec<(i64, i64)>> {
    b.iter()
        .copied()
        .permutations(b.len())
        .filter(|perm| a.iter().zip(perm).all(|(x, y)| !a.contains(&((x + y) % n))))
        .map(|perm| a.iter().copied().zip(perm).collect())
        .collect()
}

fn z7_comparison() -> Value {
    let g = AbelianGroup::cyclic(7).unwrap();
    let el = |xs: &[i64]| xs.iter().map(|&x| g.element(&[x]).unwrap()).collect::<Vec<_>>();
    let (mut pairs, mut matchings, mut discrepancies) = (0u64, 0u64, Vec::new());
    for k in 1..=4 {
        for a in (0..7).combinations(k) {
            for b in (1..7).combinations(k) {
                pairs += 1;
                let p = validate_pair(&g, &el(&a), &el(&b)).unwrap();
                let en = enumerate_matchings(&g, &p, 100_000).unwrap();
                let got: BTreeSet<Vec<(i64, i64)>> = en
                    .matchings
                    .iter()
                    .map(|m| m.pairs().iter().map(|(x, y)| (x.coords()[0], y.coords()[0])).collect())
                    .collect();
                matchings += got.len() as u64;
                if !en.exhaustive || got.len() != en.matchings.len() || got != brute_matchings(7, &a, &b) {
                    discrepancies.push(json!({ "a": a, "b": b }));
                }
            }
        }
    }
    json!({ "pairs": pairs, "matchings": matchings, "discrepancies": discrepancies })
}

fn criterion_1(s: &mut Suite) -> Outcome {
    let start = Instant::now();
    let first = z7_comparison();
    let elapsed = start.elapsed();
    let second = z7_comparison();
    s.record("z7 enumeration vs brute force", &first, &second);
    let bad = first["discrepancies"].as_array().unwrap().len();
    ensure!(bad == 0, "{bad} discrepancies");
    ensure!(first["pairs"] == 1582, "covered {} pairs", first["pairs"]);
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{} pairs, {} matchings, 0 discrepancies in {:.1?}", first["pairs"], first["matchings"], elapsed))
}

// ---- criteria 2 and 3

fn prime_runs(s: &mut Suite) -> Result<(Value, Value), String> {
    let small = ["scan", "primes", "--primes", "2,3,5,7", "--max-size", "6"];
    let large = ["scan", "primes", "--primes", "11", "--max-size", "5"];
    let mut out = Vec::new();
    for args in [&small[..], &large[..]] {
        let mut one = vec!["--workers", "1"];
        one.extend_from_slice(args);
        let mut eight = vec!["--workers", "8"];
        eight.extend_from_slice(args);
        let a = s.cli(&one);
        let b = s.cli(&eight);
        s.repeats.push((args.join(" "), a.body == b.body));
        ensure!(a.code == EXIT_OK, "`{}` exited {}", args.join(" "), a.code);
        ensure!(a.body == b.body, "`{}` differs between --workers 1 and --workers 8", args.join(" "));
        out.push(a.report);
    }
    let large = out.pop().unwrap();
    Ok((out.pop().unwrap(), large))
}

fn verdicts(reports: &[&Value]) -> Vec<Value> {
    reports.iter().flat_map(|r| r["summary"].as_array().unwrap().clone()).collect()
}

fn criterion_2(s: &mut Suite, primes: &[&Value]) -> Outcome {
    for v in verdicts(primes) {
        ensure!(v["matching_property"] == "holds", "z{}: matching property {}", v["p"], v["matching_property"]);
    }
    let mut witnesses = Vec::new();
    for n in [4u64, 6, 8, 9, 10] {
        let group = format!("z{n}");
        let max = 4.min(n - 1).to_string();
        let r = s.twice(&["scan", "group", "--group", &group, "--max-size", &max]);
        ensure!(r.code == EXIT_OK, "{group} scan exited {}", r.code);
        let mp = &r.report["matching_property"];
        ensure!(status(mp) == "fails", "{group}: matching property {}", status(mp));
        ensure!(!r.report["certificates"].as_array().unwrap().is_empty(), "{group}: no certificate");
        ensure!(s.verify(&r) == EXIT_OK, "{group}: certificates do not verify");
        let w = &mp["witness"];
        witnesses.push(format!("{group} {}/{}", w["a"], w["b"]));
    }
    for (group, a, b) in [("z4", "0,2", "1,2"), ("z6", "0,3", "1,3")] {
        let r = s.twice(&["match", "find", "--group", group, "--set-a", a, "--set-b", b]);
        ensure!(r.report["matchable"] == false, "{group} {{{a}}}/{{{b}}} has a matching");
        ensure!(r.report["certificate"]["kind"] == "group-unmatchable", "{group}: no certificate");
        ensure!(s.verify(&r) == EXIT_OK, "{group} {{{a}}}/{{{b}}} does not verify");
    }
    Ok(format!("primes hold; witnesses {}", witnesses.join(", ")))
}

fn criterion_3(primes: &[&Value]) -> Outcome {
    let all = verdicts(primes);
    for v in &all {
        for prop in ["matching_property", "acyclic_matching_property"] {
            ensure!(v[prop] != "inconclusive", "z{}: {prop} inconclusive", v["p"]);
        }
        let p = v["p"].as_u64().unwrap();
        let want = if p == 11 { 5 } else { p - 1 };
        ensure!(v["max_size"] == want, "z{p} scanned to size {}", v["max_size"]);
    }
    let z2 = all.iter().find(|v| v["p"] == 2).ok_or("no z2 verdict")?;
    ensure!(z2["acyclic_matching_property"] == "holds", "z2 acyclic verdict {}", z2["acyclic_matching_property"]);
    let line = all
        .iter()
        .map(|v| format!("z{} {}/{}", v["p"], v["matching_property"].as_str().unwrap(), v["acyclic_matching_property"].as_str().unwrap()))
        .join(", ");
    Ok(format!("{line}; identical for 1 and 8 workers"))
}

// ---- criterion 4

fn criterion_4(s: &mut Suite) -> Outcome {
    let r = s.twice(&["--seed", "4", "scan", "free", "--rank", "1", "--window", "10", "--samples", "500", "--max-size", "5"]);
    let with = r.report["pairs_with_acyclic"].as_u64().unwrap_or(0);
    let discrepancies = r.report["discrepancies"].as_array().map_or(0, Vec::len) as u64;
    ensure!(r.report["coverage"]["units_classified"] == 500, "classified {}", r.report["coverage"]["units_classified"]);
    if discrepancies > 0 {
        ensure!(r.code == EXIT_DISCREPANCY, "discrepancies with exit code {}", r.code);
        ensure!(s.verify(&r) == EXIT_DISCREPANCY, "discrepancy certificates do not verify");
        return Ok(format!("{discrepancies} certified discrepancies, exit code 2"));
    }
    ensure!(r.code == EXIT_OK && with == 500, "{with}/500 with an acyclic matching, exit {}", r.code);
    Ok("500/500 sampled pairs in Z have an acyclic matching".into())
}

// ---- criterion 5

#[derive(Clone, Copy)]
struct Gf2 {
    d: u32,
    modulus: u32,
}

impl Gf2 {
    fn mul(self, mut x: u32, mut y: u32) -> u32 {
        let mut acc = 0;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            y >>= 1;
            x <<= 1;
            if x >> self.d & 1 == 1 {
                x ^= self.modulus;
            }
        }
        acc
    }
}

fn span(gens: &[u32]) -> BTreeSet<u32> {
    let mut out = BTreeSet::from([0u32]);
    for &g in gens {
        let next: Vec<u32> = out.iter().map(|x| x ^ g).collect();
        out.extend(next);
    }
    out
}

fn matched(f: Gf2, a: &BTreeSet<u32>, b: &BTreeSet<u32>, ba: &[u32], bb: &[u32]) -> bool {
    ba.iter().enumerate().all(|(i, &ai)| {
        let others: Vec<u32> = bb.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        let others = span(&others);
        b.iter().filter(|&&v| a.contains(&f.mul(ai, v))).all(|v| others.contains(v))
    })
}

fn mask(v: &[u32]) -> u32 {
    v.iter().enumerate().map(|(i, &c)| c << i).sum()
}

fn masks(t: &Tower<PrimeField>, s: &Subspace<PrimeField>) -> BTreeSet<u32> {
    s.vectors(t.base()).unwrap().iter().map(|v| mask(v)).collect()
}

fn matched_basis_comparison() -> Value {
    let (mut cases, mut matched_cases, mut discrepancies) = (0u64, 0u64, Vec::new());
    for (desc, d, modulus) in [("gf(2^2):x^2+x+1", 2, 0b111), ("gf(2^3):x^3+x+1", 3, 0b1011), ("gf(2^4):x^4+x+1", 4, 0b10011)] {
        let AnyTower::Prime(t) = AnyTower::parse(desc).unwrap() else { unreachable!() };
        let f = Gf2 { d, modulus };
        for n in 1..(d as usize).min(4) {
            let subs = Subspace::enumerate(t.base(), t.ambient(), n).unwrap();
            for a in &subs {
                let ma = masks(&t, a);
                for b in &subs {
                    let mb = masks(&t, b);
                    let nonzero: Vec<u32> = mb.iter().copied().filter(|&x| x != 0).collect();
                    let all_bases: Vec<Vec<u32>> =
                        nonzero.into_iter().permutations(n).filter(|c| span(c).len() == 1 << n).collect();
                    for basis in a.bases_up_to_scaling(t.base()).unwrap() {
                        cases += 1;
                        let bam: Vec<u32> = basis.iter().map(|v| mask(v)).collect();
                        let oracle = all_bases.iter().any(|bb| matched(f, &ma, &mb, &bam, bb));
                        let ba = BasisSeq::of(&t, basis.clone(), a).unwrap();
                        let agrees = match find_matched_basis(&t, &ba, b).unwrap() {
                            Ok(bb) => {
                                matched_cases += 1;
                                let bbm: Vec<u32> = bb.elems().iter().map(|v| mask(v)).collect();
                                oracle && matched(f, &ma, &mb, &bam, &bbm) && is_matched_basis(&t, &ba, &bb).unwrap().0
                            }
                            Err(v) => {
                                let fmt = |vs: &[Vec<u32>]| vs.iter().map(|x| t.format_element(x)).collect::<Vec<_>>();
                                !oracle
                                    && verify_unmatched(&t.descriptor(), &fmt(a.rows()), &fmt(b.rows()), &fmt(&basis), &v.indices)
                                        .is_ok()
                            }
                        };
                        if !agrees {
                            discrepancies.push(json!({ "tower": desc, "a": bam, "b": mb }));
                        }
                    }
                }
            }
        }
    }
    json!({ "cases": cases, "matched": matched_cases, "discrepancies": discrepancies })
}

fn criterion_5(s: &mut Suite) -> Outcome {
    let start = Instant::now();
    let first = matched_basis_comparison();
    let elapsed = start.elapsed();
    let second = matched_basis_comparison();
    s.record("matched bases vs brute force", &first, &second);
    let bad = first["discrepancies"].as_array().unwrap().len();
    ensure!(bad == 0, "{bad} discrepancies");
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!("{} (A, B, basis) cases, {} matched, 0 discrepancies in {:.1?}", first["cases"], first["matched"], elapsed))
}

// ---- criterion 6

/// Pairs of `GF(16)` subspaces of dim <= 2 with `AB ∩ A ≠ {0}` on which every
/// isomorphism is a strong matching, by exhaustive bitmask enumeration.
fn gf16_only_if_counterexamples() -> u64 {
    let f = Gf2 { d: 4, modulus: 0b10011 };
    let mut found = 0;
    for n in 1..=2usize {
        let subs: BTreeSet<BTreeSet<u32>> =
            (1..16u32).combinations(n).map(|c| span(&c)).filter(|s| s.len() == 1 << n).collect();
        for a in &subs {
            let a_bases: Vec<Vec<u32>> =
                a.iter().copied().filter(|&x| x != 0).permutations(n).filter(|c| span(c).len() == 1 << n).collect();
            let gens = &a_bases[0];
            for b in &subs {
                let products: Vec<u32> = a.iter().flat_map(|&x| b.iter().map(move |&y| f.mul(x, y))).collect();
                if span(&products).intersection(a).count() == 1 {
                    continue;
                }
                let images =
                    b.iter().copied().filter(|&x| x != 0).permutations(n).filter(|c| span(c).len() == 1 << n);
                let all_strong = images.into_iter().all(|im| {
                    let apply = |v: u32| {
                        // coordinates of v in `gens`, by search
                        (0u32..1 << n)
                            .find(|c| (0..n).filter(|i| c >> i & 1 == 1).fold(0, |acc, i| acc ^ gens[i]) == v)
                            .map(|c| (0..n).filter(|i| c >> i & 1 == 1).fold(0, |acc, i| acc ^ im[i]))
                            .unwrap()
                    };
                    a_bases.iter().all(|ba| {
                        let bb: Vec<u32> = ba.iter().map(|&x| apply(x)).collect();
                        matched(f, a, b, ba, &bb)
                    })
                });
                if all_strong {
                    found += 1;
                }
            }
        }
    }
    found
}

/// `AB ∩ A = {0}` implies every map is strong in both fields, but over
/// `GF(16)` the converse fails: `AB` is spanned by products, and a sum of
/// products can land in `A` while no single product does. Those pairs are
/// reported as a FAIL; the test accepts that outcome only when each such
/// pair is confirmed independently and nothing else disagrees.
fn criterion_6(s: &mut Suite) -> Outcome {
    let mut parts = Vec::new();
    let mut only_if = 0;
    for desc in ["gf(2^4)", "gf(3^2)"] {
        let first = check_strong_criterion(desc, 2, 20, 6).map_err(|e| e.to_string())?;
        let second = check_strong_criterion(desc, 2, 20, 6).map_err(|e| e.to_string())?;
        s.record(&format!("strong criterion {desc}"), &first, &second);
        let r = &first;
        if r.if_failures > 0 || r.pointwise_discrepancies > 0 {
            return Err(format!("{desc}: unexplained discrepancies {:?}", r.discrepancies));
        }
        if desc == "gf(2^4)" && r.only_if_failures != gf16_only_if_counterexamples() {
            return Err(format!("{desc}: {} converse failures not confirmed by the oracle", r.only_if_failures));
        }
        only_if += r.only_if_failures;
        parts.push(format!(
            "{desc}: {} pairs, {} maps, {} converse failures",
            r.pairs, r.isomorphisms_tested, r.only_if_failures
        ));
    }
    if only_if > 0 {
        Err(format!("{}; every pair with AB ∩ A = {{0}} agrees, but the converse fails on confirmed pairs", parts.join("; ")))
    } else {
        Ok(format!("{}, 0 discrepancies", parts.join("; ")))
    }
}

/// Failures that are confirmed counterexamples rather than defects.
const KNOWN_FAILURES: [u32; 1] = [6];

// ---- criterion 7

fn criterion_7(s: &mut Suite) -> Outcome {
    let r = s.twice(&["linear", "scan-property", "--tower", "gf(2^4)", "--dim", "2"]);
    ensure!(status(&r.report["linear_matching_property"]) == "fails", "gf(2^4) verdict {}", status(&r.report["linear_matching_property"]));
    ensure!(r.code == EXIT_OK, "gf(2^4) scan exited {}", r.code);
    ensure!(s.verify(&r) == EXIT_OK, "gf(2^4) witness does not verify");

    let r = s.twice(&["linear", "scan-property", "--tower", "gf(2^5)", "--dim", "2"]);
    ensure!(r.report["pairs_total"] == 155 * 155, "gf(2^5) covered {} pairs", r.report["pairs_total"]);
    ensure!(r.report["coverage"]["complete"] == true, "gf(2^5) scan incomplete");
    let v = status(&r.report["linear_matching_property"]).to_string();
    match v.as_str() {
        "holds" => ensure!(r.code == EXIT_OK, "gf(2^5) holds with exit {}", r.code),
        "fails" => {
            ensure!(r.code == EXIT_DISCREPANCY, "gf(2^5) fails with exit {}", r.code);
            ensure!(s.verify(&r) == EXIT_DISCREPANCY, "gf(2^5) counter-witness does not verify");
        }
        other => return Err(format!("gf(2^5) verdict {other}")),
    }
    Ok(format!("gf(2^4) fails with a verified witness; gf(2^5) {v} over 155x155 pairs"))
}

// ---- criterion 8

fn criterion_8(s: &mut Suite) -> Outcome {
    let mut parts = Vec::new();
    for tower in ["fp(2)(t)", "fp(3)(t)"] {
        let r = s.twice(&["--seed", "8", "linear", "scan-acyclic", "--tower", tower, "--dim", "2", "--max-deg", "3", "--samples", "50"]);
        let with = r.report["pairs_with_acyclic"].as_u64().unwrap_or(0);
        let without = r.report["pairs_without_acyclic"].as_u64().unwrap_or(0);
        let discrepancies = r.report["discrepancies"].as_array().map_or(0, Vec::len) as u64;
        ensure!(with + without == 50, "{tower}: {} instances classified", with + without);
        ensure!(without == discrepancies, "{tower}: {without} without an acyclic matching, {discrepancies} certificates");
        if discrepancies > 0 {
            ensure!(r.code == EXIT_DISCREPANCY, "{tower}: exit {}", r.code);
            ensure!(s.verify(&r) == EXIT_DISCREPANCY, "{tower}: certificates do not verify");
        } else {
            ensure!(r.code == EXIT_OK, "{tower}: exit {}", r.code);
        }
        parts.push(format!("{tower} {with}/50 acyclic"));
    }
    Ok(parts.join(", "))
}

// ---- criterion 9

fn criterion_9(s: &mut Suite) -> Outcome {
    let mut parts = Vec::new();
    for tower in ["gf(2^2)", "gf(2^3)", "gf(3^2)"] {
        for dim in ["1", "2"] {
            let r = s.twice(&["linear", "scan-acyclic", "--tower", tower, "--dim", dim]);
            let v = status(&r.report["acyclic_matching_property"]).to_string();
            ensure!(v == "holds" || v == "fails", "{tower} dim {dim}: {v}");
            ensure!(r.report["coverage"]["exhaustive_coverage"] == true, "{tower} dim {dim}: not exhaustive");
            let certs = r.report["certificates"].as_array().map_or(0, Vec::len);
            ensure!(v == "holds" || certs > 0, "{tower} dim {dim} fails without a certificate");
            if certs > 0 {
                let code = s.verify(&r);
                ensure!(code == EXIT_OK || code == EXIT_DISCREPANCY, "{tower} dim {dim}: certificates rejected");
            }
            parts.push(format!("{tower}/{dim} {v} ({} pairs)", r.report["pairs_with_acyclic"]));
        }
    }
    // a theorem-discrepancy certificate is only accepted with valid evidence
    let path = s.write(&json!({ "kind": "group-no-acyclic", "group": "z5", "a": [[1]], "b": [[2]], "matchings": [] }));
    let r = s.cli(&["verify", "--certificate", path.to_str().unwrap()]);
    ensure!(r.code != EXIT_OK, "a bogus certificate was accepted");
    Ok(parts.join(", "))
}

fn criterion_10(s: &Suite) -> Outcome {
    let differing: Vec<&str> = s.repeats.iter().filter(|(_, same)| !same).map(|(l, _)| l.as_str()).collect();
    ensure!(differing.is_empty(), "reports differ between runs: {}", differing.join("; "));
    Ok(format!("{} repeated runs byte-identical", s.repeats.len()))
}

fn main() {
    let mut s = Suite::new();
    let mut results: Vec<(u32, Outcome)> = Vec::new();
    results.push((1, criterion_1(&mut s)));
    match prime_runs(&mut s) {
        Ok((small, large)) => {
            results.push((2, criterion_2(&mut s, &[&small, &large])));
            results.push((3, criterion_3(&[&small, &large])));
        }
        Err(e) => {
            results.push((2, Err(e.clone())));
            results.push((3, Err(e)));
        }
    }
    results.push((4, criterion_4(&mut s)));
    results.push((5, criterion_5(&mut s)));
    results.push((6, criterion_6(&mut s)));
    results.push((7, criterion_7(&mut s)));
    results.push((8, criterion_8(&mut s)));
    results.push((9, criterion_9(&mut s)));
    results.push((10, criterion_10(&s)));
    for (n, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n:>2}: PASS  {detail}"),
            Err(why) => println!("criterion {n:>2}: FAIL  {why}"),
        }
    }
    let failed: Vec<u32> =
        results.iter().filter(|(n, r)| r.is_err() && !KNOWN_FAILURES.contains(n)).map(|(n, _)| *n).collect();
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
