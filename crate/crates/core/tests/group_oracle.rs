use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use matchscope_core::exec::{execute, ExecOptions, ScanJob};
use matchscope_core::group::validate_pair;
use matchscope_core::group_scan::{admissible_pairs, GroupScan, GroupScanConfig, ScanMode};
use matchscope_core::matching::{acyclic_report, enumerate_matchings, find_matching_or_obstruction, fingerprint};
use matchscope_core::{AbelianGroup, SubsetPair, Tristate};
use proptest::prelude::*;

/// All bijections `A -> B` (as images of sorted `A`) with `a + f(a) ∉ A`, in `Z/n`.
fn brute_matchings(n: i64, a: &[i64], b: &[i64]) -> BTreeSet<Vec<(i64, i64)>> {
    let in_a: BTreeSet<i64> = a.iter().copied().collect();
    b.iter()
        .copied()
        .permutations(b.len())
        .filter(|perm| a.iter().zip(perm).all(|(x, y)| !in_a.contains(&((x + y) % n))))
        .map(|perm| a.iter().copied().zip(perm).collect())
        .collect()
}

/// Fingerprint classes computed from sums mod `n`.
fn brute_class_sizes(n: i64, ms: &BTreeSet<Vec<(i64, i64)>>) -> BTreeMap<Vec<i64>, usize> {
    let mut classes = BTreeMap::new();
    for m in ms {
        let mut sums: Vec<i64> = m.iter().map(|(x, y)| (x + y) % n).collect();
        sums.sort();
        *classes.entry(sums).or_insert(0) += 1;
    }
    classes
}

fn z(n: u64) -> AbelianGroup {
    AbelianGroup::cyclic(n).unwrap()
}

fn pair(g: &AbelianGroup, a: &[i64], b: &[i64]) -> SubsetPair {
    let el = |xs: &[i64]| xs.iter().map(|&x| g.element(&[x]).unwrap()).collect::<Vec<_>>();
    validate_pair(g, &el(a), &el(b)).unwrap()
}

fn as_ints(m: &matchscope_core::Matching) -> Vec<(i64, i64)> {
    m.pairs().iter().map(|(x, y)| (x.coords()[0], y.coords()[0])).collect()
}

#[test]
fn z7_enumeration_matches_brute_force() {
    let g = z(7);
    let mut pairs = 0u128;
    for k in 1..=4 {
        for a in (0..7).combinations(k) {
            for b in (1..7).combinations(k) {
                pairs += 1;
                let p = pair(&g, &a, &b);
                let en = enumerate_matchings(&g, &p, 100_000).unwrap();
                assert!(en.exhaustive);
                let got: BTreeSet<_> = en.matchings.iter().map(as_ints).collect();
                assert_eq!(got.len(), en.matchings.len(), "duplicates for {a:?} {b:?}");
                assert_eq!(got, brute_matchings(7, &a, &b), "A = {a:?}, B = {b:?}");
            }
        }
    }
    let expected: u128 = (1..=4).map(|k| admissible_pairs(7, k)).sum();
    assert_eq!(pairs, expected);
    assert_eq!(pairs, 42 + 315 + 700 + 525);
}

#[test]
fn acyclic_classes_match_brute_force_in_small_groups() {
    for n in [4i64, 5, 6, 8] {
        let g = z(n as u64);
        for k in 1..=3 {
            for a in (0..n).combinations(k) {
                for b in (1..n).combinations(k) {
                    let rep = acyclic_report(&g, &pair(&g, &a, &b), 10_000).unwrap();
                    let ms = brute_matchings(n, &a, &b);
                    let classes = brute_class_sizes(n, &ms);
                    let mut got: Vec<usize> = rep.classes.iter().map(|c| c.matchings.len()).collect();
                    let mut want: Vec<usize> = classes.values().copied().collect();
                    got.sort();
                    want.sort();
                    assert_eq!(got, want, "Z/{n}, A = {a:?}, B = {b:?}");
                    let singletons = classes.values().filter(|&&s| s == 1).count();
                    assert_eq!(rep.acyclic_matchings.len(), singletons);
                    assert_eq!(rep.matching_count, ms.len());
                }
            }
        }
    }
}

#[test]
fn documented_examples() {
    let z5 = z(5);
    let r = acyclic_report(&z5, &pair(&z5, &[1, 2], &[2, 3]), 100).unwrap();
    assert_eq!(r.classes.len(), 2);
    assert!(r.classes.iter().all(|c| c.matchings.len() == 1));
    assert_eq!(r.acyclic_matchings.len(), 2);

    let z4 = z(4);
    let r = acyclic_report(&z4, &pair(&z4, &[0, 2], &[1, 2]), 100).unwrap();
    assert!(r.classes.is_empty());
    assert_eq!(r.has_acyclic(), Some(false));

    for n in [2u64, 5, 9] {
        let g = z(n);
        for b in 1..n as i64 {
            let r = acyclic_report(&g, &pair(&g, &[0], &[b]), 10).unwrap();
            assert_eq!(r.classes.len(), 1);
            assert_eq!(r.acyclic_matchings.len(), 1);
        }
    }
}

#[test]
fn hall_violators_are_genuine() {
    let g = z(6);
    for k in 1..=4 {
        for a in (0..6i64).combinations(k) {
            for b in (1..6i64).combinations(k) {
                let p = pair(&g, &a, &b);
                match find_matching_or_obstruction(&g, &p).unwrap() {
                    Ok(m) => assert!(brute_matchings(6, &a, &b).contains(&as_ints(&m))),
                    Err(h) => {
                        assert!(brute_matchings(6, &a, &b).is_empty());
                        let s: Vec<i64> = h.subset.iter().map(|x| x.coords()[0]).collect();
                        let mut nb: BTreeSet<i64> = BTreeSet::new();
                        for x in &s {
                            nb.extend(b.iter().filter(|&&y| !a.contains(&((x + y) % 6))));
                        }
                        assert!(nb.len() < s.len());
                    }
                }
            }
        }
    }
}

fn scan(group: &str, max_size: usize, mode: ScanMode, workers: usize) -> String {
    let job = GroupScan::new(GroupScanConfig { group: group.into(), max_size, mode, cap: 10_000, samples: None, seed: None })
        .unwrap();
    let out = execute(&job, &ExecOptions { workers, ..Default::default() }, Default::default()).unwrap();
    serde_json::to_string(&job.build_report(&out.records).unwrap()).unwrap()
}

#[test]
fn symmetry_reduction_preserves_verdicts_and_totals() {
    for (group, n) in [("z6", 6u64), ("z7", 7), ("z8", 8), ("z9", 9)] {
        let max = 4usize.min(n as usize - 1);
        let full: serde_json::Value = serde_json::from_str(&scan(group, max, ScanMode::Exhaustive, 2)).unwrap();
        let red: serde_json::Value = serde_json::from_str(&scan(group, max, ScanMode::SymmetryReduced, 2)).unwrap();
        for prop in ["matching_property", "acyclic_matching_property"] {
            assert_eq!(full[prop]["status"], red[prop]["status"], "{group} {prop}");
        }
        for k in 0..max {
            let f = &full["per_size"][k];
            let r = &red["per_size"][k];
            assert_eq!(f["admissible_pairs"], admissible_pairs(n, k as u64 + 1).to_string());
            assert_eq!(f["pairs_covered"].as_u64().unwrap() as u128, admissible_pairs(n, k as u64 + 1));
            assert_eq!(r["pairs_covered"], f["pairs_covered"]);
        }
    }
}

#[test]
fn worker_count_does_not_change_scan_reports() {
    assert_eq!(scan("z7", 6, ScanMode::Exhaustive, 1), scan("z7", 6, ScanMode::Exhaustive, 8));
    assert_eq!(scan("z2xz4", 4, ScanMode::Exhaustive, 1), scan("z2xz4", 4, ScanMode::Exhaustive, 3));
}

fn classification(g: &AbelianGroup, a: &[i64], b: &[i64]) -> (bool, usize, Tristate) {
    let p = pair(g, a, b);
    let rep = acyclic_report(g, &p, 10_000).unwrap();
    (rep.matching_count > 0, rep.matching_count, Tristate::from(rep.has_acyclic()))
}

fn random_pair(p: i64) -> impl Strategy<Value = (Vec<i64>, Vec<i64>, i64, i64)> {
    (1usize..=(p as usize - 1).min(5)).prop_flat_map(move |k| {
        (
            proptest::sample::subsequence((0..p).collect::<Vec<_>>(), k),
            proptest::sample::subsequence((1..p).collect::<Vec<_>>(), k),
            0..p,
            1..p,
        )
    })
}

fn symmetry_case(p: i64, a: &[i64], b: &[i64], t: i64, c: i64) {
    let g = z(p as u64);
    let base = classification(&g, a, b);
    let shifted: Vec<i64> = a.iter().map(|x| (x + t) % p).collect();
    assert_eq!(classification(&g, &shifted, b), base);
    let ca: Vec<i64> = a.iter().map(|x| x * c % p).collect();
    let cb: Vec<i64> = b.iter().map(|x| x * c % p).collect();
    assert_eq!(classification(&g, &ca, &cb), base);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn symmetry_soundness_z5((a, b, t, c) in random_pair(5)) {
        symmetry_case(5, &a, &b, t, c);
    }

    #[test]
    fn symmetry_soundness_z7((a, b, t, c) in random_pair(7)) {
        symmetry_case(7, &a, &b, t, c);
    }

    #[test]
    fn symmetry_soundness_z11((a, b, t, c) in random_pair(11)) {
        symmetry_case(11, &a, &b, t, c);
    }
}

proptest! {
    #[test]
    fn fingerprints_count_every_pair((a, b, _, _) in random_pair(11)) {
        let g = z(11);
        let p = pair(&g, &a, &b);
        for m in enumerate_matchings(&g, &p, 1000).unwrap().matchings {
            let fp = fingerprint(&g, &m).unwrap();
            prop_assert_eq!(fp.total(), a.len());
            prop_assert!(m.is_valid_for(&g, &p).unwrap());
        }
    }

    #[test]
    fn reports_ignore_input_order((a, b, _, _) in random_pair(11), seed in any::<u64>()) {
        let g = z(11);
        let mut ra = a.clone();
        let mut rb = b.clone();
        let rot = (seed % a.len() as u64) as usize;
        ra.rotate_left(rot);
        rb.reverse();
        let x = acyclic_report(&g, &pair(&g, &a, &b), 1000).unwrap();
        let y = acyclic_report(&g, &pair(&g, &ra, &rb), 1000).unwrap();
        let sizes = |r: &matchscope_core::matching::AcyclicReport| {
            let mut v: Vec<usize> = r.classes.iter().map(|c| c.matchings.len()).collect();
            v.sort();
            v
        };
        prop_assert_eq!(sizes(&x), sizes(&y));
    }

    #[test]
    fn torsion_free_pairs_have_acyclic_matchings(
        a in proptest::collection::btree_set(-8i64..=8, 1..=4),
        shift in 1i64..=20,
    ) {
        // B = A + shift avoids 0 and has the size of A
        let zz = AbelianGroup::free(1).unwrap();
        let a: Vec<i64> = a.into_iter().collect();
        let b: Vec<i64> = a.iter().map(|x| x + 17 + shift).collect();
        let el = |xs: &[i64]| xs.iter().map(|&x| zz.element(&[x]).unwrap()).collect::<Vec<_>>();
        let p = validate_pair(&zz, &el(&a), &el(&b)).unwrap();
        prop_assert_eq!(acyclic_report(&zz, &p, 10_000).unwrap().has_acyclic(), Some(true));
    }
}
