//! Classification of all admissible pairs `(A, B)`, `|A| = |B| <= n_max`,
//! `0 ∉ B`, of a finite group, with verdicts for the matching property and
//! the acyclic matching property.
//!
//! For cyclic groups the pair space is reduced by the symmetries
//! `A -> A + t` (B fixed) and `(A, B) -> (cA, cB)` for units `c`; both keep
//! the number of matchings and the sizes of all fingerprint classes.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_integer::Integer;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::{self, WitnessCertificate};
use crate::error::{Error, Result};
use crate::exec::{RunManifest, ScanJob};
use crate::group::{validate_pair, AbelianGroup, FiniteTable, GroupElement, SubsetPair};
use crate::matching::{assignment_to_matching, EnumerationStatus, Matching, PairInstance};
use crate::verdict::{Tristate, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    Exhaustive,
    SymmetryReduced,
    Sampled,
}

impl std::str::FromStr for ScanMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(ScanMode::Exhaustive),
            "symmetry_reduced" | "symmetry-reduced" | "reduced" => Ok(ScanMode::SymmetryReduced),
            "sampled" => Ok(ScanMode::Sampled),
            other => Err(Error::Parse(format!("unknown scan mode `{other}`"))),
        }
    }
}

/// Canonical orbit representative of a pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairKey {
    pub a: Vec<GroupElement>,
    pub b: Vec<GroupElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairClassification {
    pub size: usize,
    pub a: Vec<GroupElement>,
    pub b: Vec<GroupElement>,
    pub orbit_key: PairKey,
    /// Number of pairs in the orbit; present in symmetry-reduced mode.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub orbit_size: Option<u64>,
    pub matchable: bool,
    pub matching_count: usize,
    pub enumeration: EnumerationStatus,
    pub has_acyclic: Tristate,
    /// An acyclic matching when `has_acyclic` is true.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Matching>,
}

impl PairClassification {
    pub fn pair(&self, g: &AbelianGroup) -> Result<SubsetPair> {
        validate_pair(g, &self.a, &self.b)
    }
}

/// Symmetry data for `Z/n` in index form.
#[derive(Debug, Clone)]
struct CyclicSymmetry {
    n: usize,
    units: Vec<usize>,
}

impl CyclicSymmetry {
    fn new(n: usize) -> Self {
        let units = (1..n).filter(|c| c.gcd(&n) == 1).collect();
        Self { n, units }
    }

    fn image(&self, set: &[usize], c: usize, t: usize) -> Vec<usize> {
        let mut v: Vec<usize> = set.iter().map(|&x| (c * x + t) % self.n).collect();
        v.sort_unstable();
        v
    }

    fn key(&self, a: &[usize], b: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut best = (a.to_vec(), b.to_vec());
        for &c in &self.units {
            let cb = self.image(b, c, 0);
            for t in 0..self.n {
                let ca = self.image(a, c, t);
                if (&ca, &cb) < (&best.0, &best.1) {
                    best = (ca, cb.clone());
                }
            }
        }
        best
    }

    fn is_canonical(&self, a: &[usize], b: &[usize]) -> bool {
        for &c in &self.units {
            let cb = self.image(b, c, 0);
            for t in 0..self.n {
                let ca = self.image(a, c, t);
                if (&ca[..], &cb[..]) < (a, b) {
                    return false;
                }
            }
        }
        true
    }

    fn orbit_size(&self, a: &[usize], b: &[usize]) -> u64 {
        let mut seen = BTreeSet::new();
        for &c in &self.units {
            let cb = self.image(b, c, 0);
            for t in 0..self.n {
                seen.insert((self.image(a, c, t), cb.clone()));
            }
        }
        seen.len() as u64
    }
}

/// Minimal representative of the orbit of `pair` under translation of `A` and
/// unit scaling. Non-cyclic groups fall back to the pair itself.
pub fn canonicalize_pair(g: &AbelianGroup, pair: &SubsetPair) -> Result<PairKey> {
    let Some(n) = g.cyclic_order() else {
        return Ok(PairKey { a: pair.a().to_vec(), b: pair.b().to_vec() });
    };
    let n = n as usize;
    let idx = |s: &[GroupElement]| s.iter().map(|e| e.coords()[0] as usize).collect::<Vec<_>>();
    let (ka, kb) = CyclicSymmetry::new(n).key(&idx(pair.a()), &idx(pair.b()));
    let back = |s: Vec<usize>| s.into_iter().map(|x| g.element(&[x as i64])).collect::<Result<Vec<_>>>();
    Ok(PairKey { a: back(ka)?, b: back(kb)? })
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Number of admissible pairs of size `k` in a group of order `n`.
pub fn admissible_pairs(n: u64, k: u64) -> u128 {
    binomial(n, k) * binomial(n - 1, k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupScanConfig {
    pub group: String,
    pub max_size: usize,
    pub mode: ScanMode,
    pub cap: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
struct Unit {
    a: Vec<usize>,
    b: Vec<usize>,
}

/// Upper bound on backtracking leaves before a scan is rejected outright.
pub const MAX_ESTIMATED_WORK: f64 = 5e10;

pub struct GroupScan {
    config: GroupScanConfig,
    group: AbelianGroup,
    table: FiniteTable,
    symmetry: Option<CyclicSymmetry>,
    units: Vec<Unit>,
    manifest: RunManifest,
}

impl GroupScan {
    pub fn new(config: GroupScanConfig) -> Result<Self> {
        let group = AbelianGroup::parse(&config.group)?;
        if !group.is_finite() {
            return Err(Error::Unsupported("group scans need a finite group; use the free scan".into()));
        }
        let table = FiniteTable::new(&group)?;
        let order = table.order();
        if config.max_size == 0 || config.max_size > order - 1 {
            return Err(Error::Invalid(format!(
                "max size must be in 1..={} for a group of order {order}",
                order - 1
            )));
        }
        if config.cap == 0 {
            return Err(Error::Invalid("cap must be positive".into()));
        }
        let symmetry = group.cyclic_order().map(|n| CyclicSymmetry::new(n as usize));
        let estimate = Self::estimate_work(order as u64, config.max_size, config.cap, &config);
        if estimate > MAX_ESTIMATED_WORK {
            return Err(Error::Infeasible(format!(
                "estimated {estimate:.2e} enumeration steps exceeds the limit {MAX_ESTIMATED_WORK:.0e}; \
                 lower --max-size or use --mode sampled"
            )));
        }
        let units = match config.mode {
            ScanMode::Sampled => {
                let samples = config
                    .samples
                    .ok_or_else(|| Error::Invalid("sampled mode needs a sample count".into()))?;
                let seed = config.seed.ok_or_else(|| Error::Invalid("sampled mode needs a seed".into()))?;
                Self::sample_units(order, config.max_size, samples, seed)
            }
            ScanMode::Exhaustive => Self::all_units(order, config.max_size, |_, _| true),
            ScanMode::SymmetryReduced => match &symmetry {
                Some(sym) => Self::all_units(order, config.max_size, |a, b| a[0] == 0 && sym.is_canonical(a, b)),
                None => Self::all_units(order, config.max_size, |_, _| true),
            },
        };
        let parameters = serde_json::to_value(&config).expect("config serializes");
        let manifest = RunManifest::new("scan group", parameters, config.seed);
        Ok(Self { config, group, table, symmetry, units, manifest })
    }

    /// Rough count of leaves visited: pairs times `min(k!, cap)` per size.
    pub fn estimate_work(order: u64, max_size: usize, cap: usize, config: &GroupScanConfig) -> f64 {
        let mut total = 0f64;
        for k in 1..=max_size as u64 {
            let pairs = match config.mode {
                ScanMode::Sampled => config.samples.unwrap_or(0) as f64 / max_size as f64,
                _ => admissible_pairs(order, k) as f64,
            };
            let fact = (1..=k).map(|i| i as f64).product::<f64>();
            total += pairs * fact.min(cap as f64) * k as f64;
        }
        total
    }

    fn all_units(order: usize, max_size: usize, keep: impl Fn(&[usize], &[usize]) -> bool) -> Vec<Unit> {
        let mut units = Vec::new();
        for k in 1..=max_size {
            for a in (0..order).combinations(k) {
                for b in (1..order).combinations(k) {
                    if keep(&a, &b) {
                        units.push(Unit { a: a.clone(), b });
                    }
                }
            }
        }
        units
    }

    fn sample_units(order: usize, max_size: usize, samples: usize, seed: u64) -> Vec<Unit> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let k = rng.gen_range(1..=max_size);
                let mut a = sample(&mut rng, order, k).into_vec();
                let mut b: Vec<usize> = sample(&mut rng, order - 1, k).into_iter().map(|x| x + 1).collect();
                a.sort_unstable();
                b.sort_unstable();
                Unit { a, b }
            })
            .collect()
    }

    pub fn config(&self) -> &GroupScanConfig {
        &self.config
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    fn elements(&self, idx: &[usize]) -> Vec<GroupElement> {
        idx.iter().map(|&i| self.table.element(i).clone()).collect()
    }

    fn classify(&self, unit: &Unit) -> PairClassification {
        let inst = PairInstance::from_table(&self.table, &unit.a, &unit.b);
        let matchable = inst.perfect_matching().is_ok();
        let summary = inst.classify(self.config.cap);
        let a = self.elements(&unit.a);
        let b = self.elements(&unit.b);
        let (orbit_key, orbit_size) = match &self.symmetry {
            Some(sym) => {
                let (ka, kb) = sym.key(&unit.a, &unit.b);
                let size = (self.config.mode == ScanMode::SymmetryReduced).then(|| sym.orbit_size(&unit.a, &unit.b));
                (PairKey { a: self.elements(&ka), b: self.elements(&kb) }, size)
            }
            None => {
                let size = (self.config.mode == ScanMode::SymmetryReduced).then_some(1);
                (PairKey { a: a.clone(), b: b.clone() }, size)
            }
        };
        let pair = SubsetPair::from_sorted_unchecked(a.clone(), b.clone());
        let (enumeration, has_acyclic) = if summary.exhaustive {
            (EnumerationStatus::Exhaustive, Tristate::from(Some(summary.acyclic.is_some())))
        } else {
            (EnumerationStatus::Inconclusive, Tristate::Inconclusive)
        };
        let has_acyclic = if matchable { has_acyclic } else { Tristate::False };
        PairClassification {
            size: unit.a.len(),
            a,
            b,
            orbit_key,
            orbit_size,
            matchable,
            matching_count: summary.matching_count,
            enumeration,
            has_acyclic,
            witness: summary.acyclic.map(|m| assignment_to_matching(&pair, &m)),
        }
    }

    fn report(&self, records: &[Option<PairClassification>]) -> Result<GroupScanReport> {
        let order = self.table.order() as u64;
        let sampled = self.config.mode == ScanMode::Sampled;
        let classified: Vec<&PairClassification> = records.iter().flatten().collect();
        let complete = classified.len() == records.len();

        let mut per_size = Vec::new();
        for k in 1..=self.config.max_size {
            let at: Vec<&&PairClassification> = classified.iter().filter(|r| r.size == k).collect();
            let orbits = |pred: &dyn Fn(&PairClassification) -> bool| -> u64 {
                at.iter().filter(|r| pred(r)).map(|r| &r.orbit_key).collect::<BTreeSet<_>>().len() as u64
            };
            let pairs_covered = match self.config.mode {
                ScanMode::SymmetryReduced => at.iter().map(|r| r.orbit_size.unwrap_or(1)).sum(),
                _ => at.len() as u64,
            };
            per_size.push(SizeStats {
                size: k,
                admissible_pairs: admissible_pairs(order, k as u64).to_string(),
                classified: at.len() as u64,
                pairs_covered,
                orbits: orbits(&|_| true),
                unmatchable_orbits: orbits(&|r| !r.matchable),
                no_acyclic_orbits: orbits(&|r| r.has_acyclic == Tristate::False),
                inconclusive_orbits: orbits(&|r| r.has_acyclic == Tristate::Inconclusive),
            });
        }

        let least_failing = |pred: &dyn Fn(&PairClassification) -> bool| -> Vec<PairClassification> {
            let mut out = Vec::new();
            for k in 1..=self.config.max_size {
                let key = classified
                    .iter()
                    .filter(|r| r.size == k && pred(r))
                    .map(|r| &r.orbit_key)
                    .min();
                if let Some(key) = key {
                    // The representative itself is classified in every mode
                    // except sampling; fall back to any pair of the orbit.
                    let rep = classified
                        .iter()
                        .filter(|r| &r.orbit_key == key)
                        .find(|r| r.a == key.a && r.b == key.b)
                        .or_else(|| classified.iter().find(|r| &r.orbit_key == key && pred(r)))
                        .expect("orbit has a classified pair");
                    out.push((*rep).clone());
                }
            }
            out
        };

        let unmatchable = least_failing(&|r| !r.matchable);
        let no_acyclic = least_failing(&|r| r.has_acyclic == Tristate::False);
        let any_inconclusive = classified.iter().any(|r| r.has_acyclic == Tristate::Inconclusive);

        let incomplete_reason = || {
            if sampled {
                format!("sampled mode ({} random pairs); only failures are definitive", classified.len())
            } else {
                format!("incomplete coverage: {} of {} units classified", classified.len(), records.len())
            }
        };
        let matching_property = match unmatchable.first() {
            Some(w) => Verdict::Fails { witness: w.clone() },
            None if complete && !sampled => Verdict::Holds,
            None => Verdict::Inconclusive { reason: incomplete_reason() },
        };
        let acyclic_matching_property = match no_acyclic.first() {
            Some(w) => Verdict::Fails { witness: w.clone() },
            None if any_inconclusive => Verdict::Inconclusive {
                reason: format!("enumeration cap {} reached for some pairs", self.config.cap),
            },
            None if complete && !sampled => Verdict::Holds,
            None => Verdict::Inconclusive { reason: incomplete_reason() },
        };

        let mut counterexamples = Vec::new();
        for w in &unmatchable {
            counterexamples.push(Counterexample { property: Property::Matching, pair: w.clone() });
        }
        for w in &no_acyclic {
            counterexamples.push(Counterexample { property: Property::AcyclicMatching, pair: w.clone() });
        }

        let mut certificates = Vec::new();
        if let Some(w) = matching_property.witness() {
            certificates.push(certificate::group_unmatchable(&self.group, &w.pair(&self.group)?)?);
        }
        if let Some(w) = acyclic_matching_property.witness() {
            let pair = w.pair(&self.group)?;
            certificates.push(if w.matchable {
                certificate::group_no_acyclic(&self.group, &pair, self.config.cap)?
            } else {
                certificate::group_unmatchable(&self.group, &pair)?
            });
        }

        let mut discrepancies = Vec::new();
        let prime_cyclic = self.group.cyclic_order().is_some_and(is_prime);
        if prime_cyclic {
            if let Some(w) = matching_property.witness() {
                discrepancies.push(WitnessCertificate::discrepancy(
                    THEOREM_MATCHING,
                    &format!("{} is cyclic of prime order, so every admissible pair should be matchable", self.group.descriptor()),
                    Some(certificate::group_unmatchable(&self.group, &w.pair(&self.group)?)?),
                ));
            }
        } else if matching_property.is_holds() && self.config.max_size as u64 == order - 1 {
            discrepancies.push(WitnessCertificate::discrepancy(
                THEOREM_MATCHING,
                &format!(
                    "{} is neither torsion-free nor cyclic of prime order, yet an exhaustive scan of all sizes found every pair matchable",
                    self.group.descriptor()
                ),
                None,
            ));
        }

        Ok(GroupScanReport {
            group: self.group.descriptor(),
            max_size: self.config.max_size,
            mode: self.config.mode,
            cap: self.config.cap,
            coverage: Coverage {
                complete,
                units_total: records.len() as u64,
                units_classified: classified.len() as u64,
                exhaustive_coverage: complete && !sampled,
            },
            per_size,
            matching_property,
            acyclic_matching_property,
            counterexamples,
            certificates,
            discrepancies,
        })
    }
}

pub const THEOREM_MATCHING: &str =
    "an abelian group has the matching property iff it is torsion-free or cyclic of prime order";
pub const THEOREM_TORSION_FREE_ACYCLIC: &str = "torsion-free abelian groups have the acyclic matching property";

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

impl ScanJob for GroupScan {
    type Record = PairClassification;
    type Report = GroupScanReport;

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn unit_count(&self) -> usize {
        self.units.len()
    }

    fn run_unit(&self, index: usize) -> PairClassification {
        self.classify(&self.units[index])
    }

    fn build_report(&self, records: &[Option<PairClassification>]) -> Result<GroupScanReport> {
        self.report(records)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Matching,
    AcyclicMatching,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub property: Property,
    pub pair: PairClassification,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    pub complete: bool,
    pub units_total: u64,
    pub units_classified: u64,
    /// True only for a complete exhaustive or symmetry-reduced scan.
    pub exhaustive_coverage: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeStats {
    pub size: usize,
    /// Decimal string; can exceed 64 bits for large groups.
    pub admissible_pairs: String,
    pub classified: u64,
    pub pairs_covered: u64,
    pub orbits: u64,
    pub unmatchable_orbits: u64,
    pub no_acyclic_orbits: u64,
    pub inconclusive_orbits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScanReport {
    pub group: String,
    pub max_size: usize,
    pub mode: ScanMode,
    pub cap: usize,
    pub coverage: Coverage,
    pub per_size: Vec<SizeStats>,
    pub matching_property: Verdict<PairClassification>,
    pub acyclic_matching_property: Verdict<PairClassification>,
    pub counterexamples: Vec<Counterexample>,
    pub certificates: Vec<WitnessCertificate>,
    pub discrepancies: Vec<WitnessCertificate>,
}

/// Runs one [`GroupScan`] per prime and reports per-prime verdicts.
pub struct PrimeClassification {
    scans: Vec<GroupScan>,
    offsets: Vec<usize>,
    manifest: RunManifest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimesConfig {
    pub primes: Vec<u64>,
    pub max_size: usize,
    pub mode: ScanMode,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimeVerdict {
    pub p: u64,
    pub max_size: usize,
    pub full_size_range: bool,
    pub acyclic_matching_property: String,
    pub matching_property: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimesReport {
    pub summary: Vec<PrimeVerdict>,
    pub scans: Vec<GroupScanReport>,
}

impl PrimeClassification {
    pub fn new(config: PrimesConfig) -> Result<Self> {
        if config.mode == ScanMode::Sampled {
            return Err(Error::Unsupported("prime classification runs exhaustive or symmetry-reduced scans".into()));
        }
        let mut scans = Vec::new();
        let mut offsets = vec![0];
        for &p in &config.primes {
            if !is_prime(p) {
                return Err(Error::Invalid(format!("{p} is not prime")));
            }
            let scan = GroupScan::new(GroupScanConfig {
                group: format!("z{p}"),
                max_size: config.max_size.min(p as usize - 1),
                mode: config.mode,
                cap: config.cap,
                samples: None,
                seed: None,
            })?;
            offsets.push(offsets.last().unwrap() + scan.unit_count());
            scans.push(scan);
        }
        let parameters = serde_json::to_value(&config).expect("config serializes");
        Ok(Self { scans, offsets, manifest: RunManifest::new("scan primes", parameters, None) })
    }
}

impl ScanJob for PrimeClassification {
    type Record = PairClassification;
    type Report = PrimesReport;

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn unit_count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn run_unit(&self, index: usize) -> PairClassification {
        let s = self.offsets.partition_point(|&o| o <= index) - 1;
        self.scans[s].run_unit(index - self.offsets[s])
    }

    fn build_report(&self, records: &[Option<PairClassification>]) -> Result<PrimesReport> {
        let mut summary = Vec::new();
        let mut scans = Vec::new();
        for (s, scan) in self.scans.iter().enumerate() {
            let r = scan.build_report(&records[self.offsets[s]..self.offsets[s + 1]])?;
            let p = scan.group.cyclic_order().expect("cyclic");
            summary.push(PrimeVerdict {
                p,
                max_size: r.max_size,
                full_size_range: r.max_size as u64 == p - 1,
                acyclic_matching_property: r.acyclic_matching_property.label().to_string(),
                matching_property: r.matching_property.label().to_string(),
            });
            scans.push(r);
        }
        Ok(PrimesReport { summary, scans })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{execute, ExecOptions};
    use std::collections::BTreeMap;

    fn pair(g: &AbelianGroup, a: &str, b: &str) -> SubsetPair {
        validate_pair(g, &g.parse_set(a).unwrap(), &g.parse_set(b).unwrap()).unwrap()
    }

    fn run(config: GroupScanConfig) -> GroupScanReport {
        let scan = GroupScan::new(config).unwrap();
        let out = execute(&scan, &ExecOptions::default(), BTreeMap::new()).unwrap();
        scan.build_report(&out.records).unwrap()
    }

    fn cfg(group: &str, max_size: usize, mode: ScanMode) -> GroupScanConfig {
        GroupScanConfig { group: group.into(), max_size, mode, cap: 10_000, samples: None, seed: None }
    }

    #[test]
    fn canonical_key_examples() {
        let z5 = AbelianGroup::cyclic(5).unwrap();
        let k1 = canonicalize_pair(&z5, &pair(&z5, "1,2", "2,3")).unwrap();
        let k2 = canonicalize_pair(&z5, &pair(&z5, "2,3", "2,3")).unwrap();
        let k3 = canonicalize_pair(&z5, &pair(&z5, "2,4", "4,1")).unwrap();
        assert_eq!(k1, k2);
        assert_eq!(k1, k3);
        let k4 = canonicalize_pair(&z5, &pair(&z5, "1,2", "2,4")).unwrap();
        assert_ne!(k1, k4);
    }

    #[test]
    fn canonical_key_matches_orbit_oracle() {
        // Orbit enumeration by closure under the generating moves.
        let n = 5usize;
        let sym = CyclicSymmetry::new(n);
        let start = (vec![1usize, 2], vec![2usize, 3]);
        let mut orbit = BTreeSet::from([start.clone()]);
        let mut frontier = vec![start];
        while let Some((a, b)) = frontier.pop() {
            let moves = [(sym.image(&a, 1, 1), b.clone()), (sym.image(&a, 2, 0), sym.image(&b, 2, 0))];
            for m in moves {
                if orbit.insert(m.clone()) {
                    frontier.push(m);
                }
            }
        }
        assert!(!orbit.contains(&(vec![1, 2], vec![2, 4])));
        assert_eq!(orbit.len() as u64, sym.orbit_size(&[1, 2], &[2, 3]));
        let keys: BTreeSet<_> = orbit.iter().map(|(a, b)| sym.key(a, b)).collect();
        assert_eq!(keys.len(), 1);
        assert_eq!(keys.into_iter().next().unwrap(), orbit.into_iter().next().unwrap());
    }

    #[test]
    fn non_cyclic_key_is_identity() {
        let g = AbelianGroup::parse("z2xz2").unwrap();
        let p = pair(&g, "0,1", "1,0");
        let k = canonicalize_pair(&g, &p).unwrap();
        assert_eq!(k.a, p.a());
        assert_eq!(k.b, p.b());
    }

    #[test]
    fn z5_matching_property_holds() {
        let r = run(cfg("z5", 4, ScanMode::Exhaustive));
        assert!(r.matching_property.is_holds());
        assert!(r.coverage.exhaustive_coverage);
        assert!(r.discrepancies.is_empty());
    }

    #[test]
    fn z4_matching_property_fails() {
        let r = run(cfg("z4", 3, ScanMode::Exhaustive));
        let w = r.matching_property.witness().unwrap();
        let z4 = AbelianGroup::cyclic(4).unwrap();
        let named = pair(&z4, "0,2", "1,2");
        let named_key = canonicalize_pair(&z4, &named).unwrap();
        assert!(w.size <= 2);
        assert!(w.orbit_key <= named_key);
        assert!(crate::matching::find_matching(&z4, &w.pair(&z4).unwrap()).unwrap().is_none());
        assert!(r.discrepancies.is_empty());
    }

    #[test]
    fn z2_acyclic_property_holds() {
        let r = run(cfg("z2", 1, ScanMode::Exhaustive));
        assert!(r.acyclic_matching_property.is_holds());
        assert_eq!(r.coverage.units_total, 2);
    }

    #[test]
    fn reduced_and_exhaustive_agree() {
        for g in ["z5", "z7"] {
            let n = g[1..].parse::<usize>().unwrap();
            let full = run(cfg(g, n - 1, ScanMode::Exhaustive));
            let red = run(cfg(g, n - 1, ScanMode::SymmetryReduced));
            assert_eq!(full.matching_property.label(), red.matching_property.label());
            assert_eq!(full.acyclic_matching_property, red.acyclic_matching_property.clone().map_orbit_size());
            for (f, r) in full.per_size.iter().zip(&red.per_size) {
                assert_eq!(f.orbits, r.orbits);
                assert_eq!(f.unmatchable_orbits, r.unmatchable_orbits);
                assert_eq!(f.no_acyclic_orbits, r.no_acyclic_orbits);
                assert_eq!(f.pairs_covered, r.pairs_covered);
                assert_eq!(f.admissible_pairs, f.pairs_covered.to_string());
            }
            let keys = |rep: &GroupScanReport| {
                rep.counterexamples.iter().map(|c| (c.property, c.pair.orbit_key.clone())).collect::<Vec<_>>()
            };
            assert_eq!(keys(&full), keys(&red));
        }
    }

    #[test]
    fn sampled_mode_never_holds() {
        let mut c = cfg("z7", 3, ScanMode::Sampled);
        c.samples = Some(40);
        c.seed = Some(3);
        let r = run(c);
        assert!(r.matching_property.is_inconclusive());
        assert!(!r.coverage.exhaustive_coverage);
    }

    #[test]
    fn oversized_requests_are_rejected() {
        assert!(matches!(GroupScan::new(cfg("z5", 5, ScanMode::Exhaustive)), Err(Error::Invalid(_))));
        assert!(matches!(GroupScan::new(cfg("z31", 30, ScanMode::Exhaustive)), Err(Error::Infeasible(_))));
        assert!(GroupScan::new(cfg("free1", 2, ScanMode::Exhaustive)).is_err());
    }

    #[test]
    fn tiny_cap_is_inconclusive() {
        let mut c = cfg("z7", 4, ScanMode::SymmetryReduced);
        c.cap = 1;
        let r = run(c);
        assert!(!r.acyclic_matching_property.is_holds());
    }

    #[test]
    fn prime_classification_of_two() {
        let job = PrimeClassification::new(PrimesConfig {
            primes: vec![2, 3],
            max_size: 5,
            mode: ScanMode::SymmetryReduced,
            cap: 10_000,
        })
        .unwrap();
        let out = execute(&job, &ExecOptions::default(), BTreeMap::new()).unwrap();
        let r = job.build_report(&out.records).unwrap();
        assert_eq!(r.summary[0].p, 2);
        assert_eq!(r.summary[0].acyclic_matching_property, "holds");
        assert!(r.summary.iter().all(|s| s.full_size_range));
        assert!(PrimeClassification::new(PrimesConfig {
            primes: vec![4],
            max_size: 2,
            mode: ScanMode::Exhaustive,
            cap: 10
        })
        .is_err());
    }

    trait OrbitFree {
        fn map_orbit_size(self) -> Self;
    }

    impl OrbitFree for Verdict<PairClassification> {
        fn map_orbit_size(self) -> Self {
            match self {
                Verdict::Fails { mut witness } => {
                    witness.orbit_size = None;
                    Verdict::Fails { witness }
                }
                v => v,
            }
        }
    }
}
