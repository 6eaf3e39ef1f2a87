//! Matchings between subsets of an abelian group.
//!
//! A matching of `(A, B)` is a bijection `f: A -> B` with `a + f(a) ∉ A` for
//! every `a`. Its fingerprint counts, for each group element `x`, how many
//! `a` satisfy `a + f(a) = x`; a matching is acyclic when no other matching
//! of the pair has the same fingerprint.

use std::collections::{BTreeMap, HashMap};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{AbelianGroup, FiniteTable, GroupElement, SubsetPair};

/// Default limit on the number of matchings enumerated for one pair.
pub const DEFAULT_CAP: usize = 10_000;

/// A bijection `A -> B` stored as `(a, f(a))` pairs with `A` in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Matching {
    pairs: Vec<(GroupElement, GroupElement)>,
}

impl Matching {
    pub fn new(mut pairs: Vec<(GroupElement, GroupElement)>) -> Self {
        pairs.sort();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(GroupElement, GroupElement)] {
        &self.pairs
    }

    pub fn image_of(&self, a: &GroupElement) -> Option<&GroupElement> {
        self.pairs.iter().find(|(x, _)| x == a).map(|(_, b)| b)
    }

    /// Checks the bijection and forbidden-sum conditions against `pair`.
    pub fn is_valid_for(&self, g: &AbelianGroup, pair: &SubsetPair) -> Result<bool> {
        if self.pairs.len() != pair.size() {
            return Ok(false);
        }
        let mut left: Vec<_> = self.pairs.iter().map(|(a, _)| a.clone()).collect();
        let mut right: Vec<_> = self.pairs.iter().map(|(_, b)| b.clone()).collect();
        left.sort();
        right.sort();
        if left != pair.a() || right != pair.b() {
            return Ok(false);
        }
        for (a, b) in &self.pairs {
            if pair.a().binary_search(&g.add(a, b)?).is_ok() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The count map `x -> |{a : a + f(a) = x}|`, zero entries omitted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Fingerprint {
    counts: BTreeMap<GroupElement, usize>,
}

impl Fingerprint {
    pub fn counts(&self) -> &BTreeMap<GroupElement, usize> {
        &self.counts
    }

    pub fn get(&self, x: &GroupElement) -> usize {
        self.counts.get(x).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.counts.iter().map(|(k, v)| (k.to_string(), v)))
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, usize> = BTreeMap::deserialize(d)?;
        let mut counts = BTreeMap::new();
        for (k, v) in raw {
            let coords = k
                .split(',')
                .map(|t| t.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| D::Error::custom(format!("bad fingerprint key `{k}`")))?;
            if v == 0 {
                return Err(D::Error::custom("fingerprint counts must be positive"));
            }
            counts.insert(GroupElement(coords), v);
        }
        Ok(Self { counts })
    }
}

/// One fingerprint class: all matchings sharing a fingerprint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintClass {
    pub fingerprint: Fingerprint,
    pub matchings: Vec<Matching>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationStatus {
    Exhaustive,
    /// The cap was reached; no acyclicity verdict can be given.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enumeration {
    pub matchings: Vec<Matching>,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicReport {
    pub status: EnumerationStatus,
    pub matching_count: usize,
    /// Classes in order of their first matching; empty when inconclusive.
    pub classes: Vec<FingerprintClass>,
    pub acyclic_matchings: Vec<Matching>,
}

impl AcyclicReport {
    /// `Some(true/false)` when exhaustive, `None` when the cap was hit.
    pub fn has_acyclic(&self) -> Option<bool> {
        match self.status {
            EnumerationStatus::Exhaustive => Some(!self.acyclic_matchings.is_empty()),
            EnumerationStatus::Inconclusive => None,
        }
    }
}

/// A set `S ⊆ A` whose allowed neighbourhood in `B` is smaller than `S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallViolator {
    pub subset: Vec<GroupElement>,
    pub neighbourhood: Vec<GroupElement>,
}

/// Index form of a pair: `allowed[i]` lists the `j` with `a_i + b_j ∉ A` in
/// increasing order, and `sum(i, j)` is an id such that equal ids mean equal sums.
#[derive(Debug, Clone)]
pub struct PairInstance {
    n: usize,
    allowed: Vec<Vec<usize>>,
    sums: Vec<u32>,
}

impl PairInstance {
    pub fn from_pair(g: &AbelianGroup, pair: &SubsetPair) -> Result<Self> {
        let n = pair.size();
        let mut ids: BTreeMap<GroupElement, u32> = BTreeMap::new();
        let mut sums = Vec::with_capacity(n * n);
        let mut allowed = vec![Vec::new(); n];
        for (i, a) in pair.a().iter().enumerate() {
            for (j, b) in pair.b().iter().enumerate() {
                let s = g.add(a, b)?;
                if pair.a().binary_search(&s).is_err() {
                    allowed[i].push(j);
                }
                let next = ids.len() as u32;
                sums.push(*ids.entry(s).or_insert(next));
            }
        }
        Ok(Self { n, allowed, sums })
    }

    /// Builds the instance from element indices of a finite table; `a` and `b`
    /// must be sorted. Sum ids are the table indices of the sums.
    pub fn from_table(t: &FiniteTable, a: &[usize], b: &[usize]) -> Self {
        let n = a.len();
        let mut in_a = vec![false; t.order()];
        for &x in a {
            in_a[x] = true;
        }
        let mut sums = Vec::with_capacity(n * n);
        let mut allowed = vec![Vec::new(); n];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                let s = t.add(x, y);
                if !in_a[s] {
                    allowed[i].push(j);
                }
                sums.push(s as u32);
            }
        }
        Self { n, allowed, sums }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn sum(&self, i: usize, j: usize) -> u32 {
        self.sums[i * self.n + j]
    }

    pub fn allowed(&self, i: usize) -> &[usize] {
        &self.allowed[i]
    }

    /// Augmenting-path maximum matching. Returns the assignment `i -> j`, or the
    /// left/right index sets of a Hall violator.
    pub fn perfect_matching(&self) -> std::result::Result<Vec<usize>, (Vec<usize>, Vec<usize>)> {
        let mut match_right: Vec<Option<usize>> = vec![None; self.n];
        for u in 0..self.n {
            let mut seen_right = vec![false; self.n];
            let mut seen_left = vec![false; self.n];
            if !self.augment(u, &mut match_right, &mut seen_right, &mut seen_left) {
                let left = (0..self.n).filter(|&i| seen_left[i]).collect();
                let right = (0..self.n).filter(|&j| seen_right[j]).collect();
                return Err((left, right));
            }
        }
        let mut assign = vec![0; self.n];
        for (j, m) in match_right.iter().enumerate() {
            assign[m.expect("perfect matching covers B")] = j;
        }
        Ok(assign)
    }

    fn augment(
        &self,
        u: usize,
        match_right: &mut [Option<usize>],
        seen_right: &mut [bool],
        seen_left: &mut [bool],
    ) -> bool {
        seen_left[u] = true;
        for &j in &self.allowed[u] {
            if seen_right[j] {
                continue;
            }
            seen_right[j] = true;
            let free = match match_right[j] {
                None => true,
                Some(w) => self.augment(w, match_right, seen_right, seen_left),
            };
            if free {
                match_right[j] = Some(u);
                return true;
            }
        }
        false
    }

    /// Visits matchings in canonical (lexicographic) order until `cap` have been
    /// seen. Returns `(visited, exhaustive)`.
    pub fn for_each_matching(&self, cap: usize, mut visit: impl FnMut(&[usize])) -> (usize, bool) {
        let mut assign = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        let mut count = 0usize;
        let mut exhaustive = true;
        self.backtrack(0, &mut assign, &mut used, &mut count, cap, &mut exhaustive, &mut visit);
        (count, exhaustive)
    }

    #[allow(clippy::too_many_arguments)]
    fn backtrack(
        &self,
        i: usize,
        assign: &mut [usize],
        used: &mut [bool],
        count: &mut usize,
        cap: usize,
        exhaustive: &mut bool,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if !*exhaustive {
            return;
        }
        if i == self.n {
            if *count == cap {
                *exhaustive = false;
                return;
            }
            *count += 1;
            visit(assign);
            return;
        }
        for &j in &self.allowed[i] {
            if used[j] {
                continue;
            }
            used[j] = true;
            assign[i] = j;
            self.backtrack(i + 1, assign, used, count, cap, exhaustive, visit);
            used[j] = false;
            if !*exhaustive {
                return;
            }
        }
    }

    fn fingerprint_key(&self, assign: &[usize]) -> Vec<u32> {
        let mut key: Vec<u32> = assign.iter().enumerate().map(|(i, &j)| self.sum(i, j)).collect();
        key.sort_unstable();
        key
    }

    /// Enumerates and groups by fingerprint. The returned summary carries the
    /// first matching (in canonical order) that is alone in its class.
    pub fn classify(&self, cap: usize) -> InstanceSummary {
        let mut all: Vec<(Vec<usize>, Vec<u32>)> = Vec::new();
        let (count, exhaustive) = self.for_each_matching(cap, |m| {
            all.push((m.to_vec(), self.fingerprint_key(m)));
        });
        if !exhaustive {
            return InstanceSummary { matching_count: count, exhaustive, class_count: 0, acyclic: None };
        }
        let mut sizes: HashMap<&[u32], usize> = HashMap::with_capacity(all.len());
        for (_, key) in &all {
            *sizes.entry(key.as_slice()).or_insert(0) += 1;
        }
        let acyclic = all
            .iter()
            .find(|(_, key)| sizes[key.as_slice()] == 1)
            .map(|(m, _)| m.clone());
        InstanceSummary { matching_count: count, exhaustive, class_count: sizes.len(), acyclic }
    }
}

/// Outcome of [`PairInstance::classify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceSummary {
    pub matching_count: usize,
    pub exhaustive: bool,
    pub class_count: usize,
    /// First acyclic matching as an assignment `i -> j`, when exhaustive.
    pub acyclic: Option<Vec<usize>>,
}

fn to_matching(pair: &SubsetPair, assign: &[usize]) -> Matching {
    Matching {
        pairs: assign
            .iter()
            .enumerate()
            .map(|(i, &j)| (pair.a()[i].clone(), pair.b()[j].clone()))
            .collect(),
    }
}

pub(crate) fn assignment_to_matching(pair: &SubsetPair, assign: &[usize]) -> Matching {
    to_matching(pair, assign)
}

/// True iff `a + b ∉ A`.
pub fn allowed_edge(g: &AbelianGroup, a_set: &[GroupElement], a: &GroupElement, b: &GroupElement) -> Result<bool> {
    if !a_set.contains(a) {
        return Err(Error::Invalid(format!("{a} is not an element of A")));
    }
    let s = g.add(a, b)?;
    Ok(!a_set.contains(&s))
}

pub fn find_matching(g: &AbelianGroup, pair: &SubsetPair) -> Result<Option<Matching>> {
    Ok(find_matching_or_obstruction(g, pair)?.ok())
}

/// A matching, or a Hall violator proving none exists.
pub fn find_matching_or_obstruction(
    g: &AbelianGroup,
    pair: &SubsetPair,
) -> Result<std::result::Result<Matching, HallViolator>> {
    let inst = PairInstance::from_pair(g, pair)?;
    Ok(match inst.perfect_matching() {
        Ok(assign) => Ok(to_matching(pair, &assign)),
        Err((left, right)) => Err(HallViolator {
            subset: left.iter().map(|&i| pair.a()[i].clone()).collect(),
            neighbourhood: right.iter().map(|&j| pair.b()[j].clone()).collect(),
        }),
    })
}

pub fn enumerate_matchings(g: &AbelianGroup, pair: &SubsetPair, cap: usize) -> Result<Enumeration> {
    let inst = PairInstance::from_pair(g, pair)?;
    let mut matchings = Vec::new();
    let (_, exhaustive) = inst.for_each_matching(cap, |m| matchings.push(to_matching(pair, m)));
    Ok(Enumeration { matchings, exhaustive })
}

pub fn fingerprint(g: &AbelianGroup, f: &Matching) -> Result<Fingerprint> {
    let mut counts = BTreeMap::new();
    for (a, b) in &f.pairs {
        *counts.entry(g.add(a, b)?).or_insert(0) += 1;
    }
    Ok(Fingerprint { counts })
}

pub fn acyclic_report(g: &AbelianGroup, pair: &SubsetPair, cap: usize) -> Result<AcyclicReport> {
    let en = enumerate_matchings(g, pair, cap)?;
    if !en.exhaustive {
        return Ok(AcyclicReport {
            status: EnumerationStatus::Inconclusive,
            matching_count: en.matchings.len(),
            classes: Vec::new(),
            acyclic_matchings: Vec::new(),
        });
    }
    let matching_count = en.matchings.len();
    let mut classes: Vec<FingerprintClass> = Vec::new();
    let mut index: HashMap<Fingerprint, usize> = HashMap::new();
    for m in en.matchings {
        let fp = fingerprint(g, &m)?;
        match index.get(&fp) {
            Some(&k) => classes[k].matchings.push(m),
            None => {
                index.insert(fp.clone(), classes.len());
                classes.push(FingerprintClass { fingerprint: fp, matchings: vec![m] });
            }
        }
    }
    let acyclic_matchings = classes
        .iter()
        .filter(|c| c.matchings.len() == 1)
        .map(|c| c.matchings[0].clone())
        .collect();
    Ok(AcyclicReport { status: EnumerationStatus::Exhaustive, matching_count, classes, acyclic_matchings })
}
