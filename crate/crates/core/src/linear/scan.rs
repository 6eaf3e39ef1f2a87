use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::acyclic::{search_acyclic, Refutation};
use super::matched::is_matched_subspace;
use super::strong::{is_strong_matching, pointwise_products_avoid, strong_matching_exists};
use super::{format_list, format_matrix, isomorphisms_up_to_scalar};
use crate::certificate::WitnessCertificate;
use crate::error::{Error, Result};
use crate::exec::{RunManifest, ScanJob};
use crate::field::{AnyTower, Field, PrimeField, Subspace, Tower};
use crate::group_scan::{is_prime, Coverage};
use crate::verdict::Verdict;

pub const THEOREM_STRONG: &str = "a strong matching from A to B exists iff AB ∩ A = {0}";
pub const THEOREM_SUBFIELD: &str =
    "an extension with no intermediate field K ⊊ M ⊊ L of finite degree has the linear matching property";
pub const THEOREM_TRANSCENDENTAL: &str = "a purely transcendental extension has the linear acyclic matching property";

/// Rough number of matched-basis searches above which a scan is rejected.
pub const MAX_LINEAR_WORK: f64 = 2e8;

fn prime_tower(desc: &str) -> Result<Tower<PrimeField>> {
    match AnyTower::parse(desc)? {
        AnyTower::Prime(t) => Ok(t),
        AnyTower::Rational(_) => Err(Error::Unsupported("linear scans need a prime base field".into())),
    }
}

fn finite_subspaces(tower: &Tower<PrimeField>, dim: usize) -> Result<Vec<Subspace<PrimeField>>> {
    Subspace::enumerate(tower.base(), tower.ambient(), dim)
        .ok_or_else(|| Error::Unsupported("subspace enumeration needs a finite field".into()))
}

fn gaussian_points(q: f64, n: usize) -> f64 {
    (q.powi(n as i32) - 1.0) / (q - 1.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyScanConfig {
    pub tower: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyPairRecord {
    pub a_index: usize,
    pub b_index: usize,
    /// `1 ∈ B`; such pairs are outside the property.
    pub excluded: bool,
    pub matched: Option<bool>,
    pub bases_checked: usize,
    pub basis_a: Option<Vec<String>>,
    pub violating_indices: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyWitness {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub basis_a: Vec<String>,
    pub violating_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub intermediate_degrees: Vec<usize>,
    /// `holds` when there is no intermediate field, `fails` otherwise.
    pub predicted: String,
    /// `agrees`, `disagrees`, `not_refuted_at_this_dimension` or `inconclusive`.
    pub agreement: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyScanReport {
    pub tower: String,
    pub dim: usize,
    pub subspaces: usize,
    pub coverage: Coverage,
    pub pairs_total: u64,
    pub pairs_excluded: u64,
    pub pairs_classified: u64,
    pub unmatched_pairs: u64,
    pub linear_matching_property: Verdict<PropertyWitness>,
    pub prediction: Prediction,
    pub certificates: Vec<WitnessCertificate>,
    pub discrepancies: Vec<WitnessCertificate>,
}

/// Classifies every pair `(A, B)` of `dim`-dimensional subspaces of a finite
/// field with `1 ∉ B` by whether `A` is matched to `B`.
pub struct PropertyScan {
    config: PropertyScanConfig,
    tower: Tower<PrimeField>,
    subspaces: Vec<Subspace<PrimeField>>,
    manifest: RunManifest,
}

impl PropertyScan {
    pub fn new(config: PropertyScanConfig) -> Result<Self> {
        let tower = prime_tower(&config.tower)?;
        let d = tower
            .degree()
            .ok_or_else(|| Error::Unsupported("the property scan needs a finite extension".into()))?;
        if config.dim == 0 || config.dim >= d {
            return Err(Error::Invalid(format!("dimension must be in 1..{d}")));
        }
        let q = tower.base().p() as f64;
        let count = (0..config.dim).fold(1.0, |acc, i| {
            acc * (q.powi((d - i) as i32) - 1.0) / (q.powi((config.dim - i) as i32) - 1.0)
        });
        let bases = gaussian_points(q, config.dim).powi(config.dim as i32);
        let work = count * count * bases;
        if work > MAX_LINEAR_WORK {
            return Err(Error::Infeasible(format!(
                "about {count:.0} subspaces per side and {work:.2e} basis checks exceed the limit {MAX_LINEAR_WORK:.0e}"
            )));
        }
        let subspaces = finite_subspaces(&tower, config.dim)?;
        let parameters = serde_json::to_value(&config).expect("config serializes");
        let manifest = RunManifest::new("linear scan-property", parameters, None);
        Ok(Self { config, tower, subspaces, manifest })
    }

    fn strings(&self, i: usize) -> Vec<String> {
        format_list(&self.tower, self.subspaces[i].rows())
    }
}

impl ScanJob for PropertyScan {
    type Record = PropertyPairRecord;
    type Report = PropertyScanReport;

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn unit_count(&self) -> usize {
        self.subspaces.len() * self.subspaces.len()
    }

    fn run_unit(&self, index: usize) -> PropertyPairRecord {
        let m = self.subspaces.len();
        let (ia, ib) = (index / m, index % m);
        let (a, b) = (&self.subspaces[ia], &self.subspaces[ib]);
        let mut rec = PropertyPairRecord {
            a_index: ia,
            b_index: ib,
            excluded: false,
            matched: None,
            bases_checked: 0,
            basis_a: None,
            violating_indices: None,
        };
        if b.contains(self.tower.base(), &self.tower.one()).expect("same ambient") {
            rec.excluded = true;
            return rec;
        }
        let r = is_matched_subspace(&self.tower, a, b).expect("finite tower");
        rec.matched = Some(r.matched);
        rec.bases_checked = r.bases_checked;
        if let Some((basis, v)) = r.witness {
            rec.basis_a = Some(format_list(&self.tower, basis.elems()));
            rec.violating_indices = Some(v.indices);
        }
        rec
    }

    fn build_report(&self, records: &[Option<PropertyPairRecord>]) -> Result<PropertyScanReport> {
        let done: Vec<&PropertyPairRecord> = records.iter().flatten().collect();
        let complete = done.len() == records.len();
        let excluded = done.iter().filter(|r| r.excluded).count() as u64;
        let failing: Vec<&&PropertyPairRecord> = done.iter().filter(|r| r.matched == Some(false)).collect();
        let witness = failing.first().map(|r| PropertyWitness {
            a: self.strings(r.a_index),
            b: self.strings(r.b_index),
            basis_a: r.basis_a.clone().unwrap_or_default(),
            violating_indices: r.violating_indices.clone().unwrap_or_default(),
        });
        let verdict = match witness.clone() {
            Some(w) => Verdict::Fails { witness: w },
            None if complete => Verdict::Holds,
            None => Verdict::Inconclusive {
                reason: format!("budget exhausted: {} of {} pairs classified", done.len(), records.len()),
            },
        };
        let intermediate = self.tower.intermediate_degrees();
        let predicted = if intermediate.is_empty() { "holds" } else { "fails" };
        let agreement = match (&verdict, predicted) {
            (Verdict::Inconclusive { .. }, _) => "inconclusive",
            (Verdict::Holds, "holds") | (Verdict::Fails { .. }, "fails") => "agrees",
            (Verdict::Holds, _) => "not_refuted_at_this_dimension",
            (Verdict::Fails { .. }, _) => "disagrees",
        };
        let mut certificates = Vec::new();
        let mut discrepancies = Vec::new();
        if let Some(w) = &witness {
            let cert = WitnessCertificate::LinearUnmatched {
                tower: self.tower.descriptor(),
                a: w.a.clone(),
                b: w.b.clone(),
                basis_a: w.basis_a.clone(),
                violating_indices: w.violating_indices.clone(),
            };
            if agreement == "disagrees" {
                discrepancies.push(WitnessCertificate::discrepancy(
                    THEOREM_SUBFIELD,
                    &format!(
                        "{} has no intermediate field, yet a pair of {}-dimensional subspaces with 1 ∉ B is not matched",
                        self.tower.descriptor(),
                        self.config.dim
                    ),
                    Some(cert.clone()),
                ));
            }
            certificates.push(cert);
        }
        Ok(PropertyScanReport {
            tower: self.tower.descriptor(),
            dim: self.config.dim,
            subspaces: self.subspaces.len(),
            coverage: Coverage {
                complete,
                units_total: records.len() as u64,
                units_classified: done.len() as u64,
                exhaustive_coverage: complete,
            },
            pairs_total: records.len() as u64,
            pairs_excluded: excluded,
            pairs_classified: done.len() as u64 - excluded,
            unmatched_pairs: failing.len() as u64,
            linear_matching_property: verdict,
            prediction: Prediction {
                intermediate_degrees: intermediate,
                predicted: predicted.into(),
                agreement: agreement.into(),
            },
            certificates,
            discrepancies,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicScanConfig {
    pub tower: String,
    /// Exact dimension for finite towers; largest sampled dimension for `K(t)`.
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_deg: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    /// `AB ∩ A ≠ {0}`: no strong matching, outside the property.
    Excluded,
    Acyclic,
    NoAcyclic,
    /// No admissible pair was found within the sampling attempts.
    SamplingFailed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicPairRecord {
    pub dim: usize,
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub status: PairStatus,
    /// Matrix of the acyclic strong matching found, w.r.t. the listed bases.
    pub acyclic_matching: Option<Vec<Vec<String>>>,
    pub isomorphisms_checked: usize,
    pub non_strong_candidates: usize,
    pub refutations: Vec<Refutation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub attempts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicWitness {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicScanReport {
    pub tower: String,
    pub mode: String,
    pub dims: Vec<usize>,
    pub coverage: Coverage,
    pub pairs_total: u64,
    pub pairs_excluded: u64,
    pub pairs_with_acyclic: u64,
    pub pairs_without_acyclic: u64,
    pub sampling_failures: u64,
    /// Induced maps that were linear into `B` but not strong matchings.
    pub non_strong_candidates: u64,
    /// Finite extension of prime degree.
    pub prime_degree: bool,
    pub acyclic_matching_property: Verdict<AcyclicWitness>,
    pub certificates: Vec<WitnessCertificate>,
    pub discrepancies: Vec<WitnessCertificate>,
}

enum Units {
    Finite(Vec<Subspace<PrimeField>>),
    Sampled { samples: usize, seed: u64, max_deg: usize },
}

/// Searches for an acyclic strong matching on every pair with `AB ∩ A = {0}`:
/// all pairs for a finite field, seeded random pairs for `K(t)`.
pub struct AcyclicScan {
    config: AcyclicScanConfig,
    tower: Tower<PrimeField>,
    units: Units,
    manifest: RunManifest,
}

/// Attempts per sample before giving up on finding an admissible pair.
pub const SAMPLING_ATTEMPTS: usize = 10_000;

impl AcyclicScan {
    pub fn new(config: AcyclicScanConfig) -> Result<Self> {
        let tower = prime_tower(&config.tower)?;
        if config.dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        if config.dim > 3 {
            return Err(Error::Infeasible("automorphism enumeration is limited to dimension 3".into()));
        }
        let units = match tower.degree() {
            Some(d) => {
                if config.dim > d {
                    return Err(Error::Invalid(format!("dimension must be at most {d}")));
                }
                if config.samples.is_some() {
                    return Err(Error::Invalid("finite towers are scanned exhaustively; drop --samples".into()));
                }
                let q = tower.base().p() as f64;
                let count = (0..config.dim).fold(1.0, |acc, i| {
                    acc * (q.powi((d - i) as i32) - 1.0) / (q.powi((config.dim - i) as i32) - 1.0)
                });
                if count * count > 1e6 {
                    return Err(Error::Infeasible(format!("{:.2e} pairs exceed the limit 1e6", count * count)));
                }
                Units::Finite(finite_subspaces(&tower, config.dim)?)
            }
            None => {
                let samples = config.samples.ok_or_else(|| Error::Invalid("K(t) scans need --samples".into()))?;
                let seed = config.seed.ok_or_else(|| Error::Invalid("K(t) scans need --seed".into()))?;
                let max_deg = config.max_deg.ok_or_else(|| Error::Invalid("K(t) scans need --max-deg".into()))?;
                if max_deg + 1 < config.dim {
                    return Err(Error::Invalid("max degree too small for the requested dimension".into()));
                }
                Units::Sampled { samples, seed, max_deg }
            }
        };
        let parameters = serde_json::to_value(&config).expect("config serializes");
        let manifest = RunManifest::new("linear scan-acyclic", parameters, config.seed);
        Ok(Self { config, tower, units, manifest })
    }

    fn classify(&self, dim: usize, a: &Subspace<PrimeField>, b: &Subspace<PrimeField>) -> AcyclicPairRecord {
        let t = &self.tower;
        let mut rec = AcyclicPairRecord {
            dim,
            a: format_list(t, a.rows()),
            b: format_list(t, b.rows()),
            status: PairStatus::Excluded,
            acyclic_matching: None,
            isomorphisms_checked: 0,
            non_strong_candidates: 0,
            refutations: Vec::new(),
            attempts: None,
        };
        if !strong_matching_exists(t, a, b).expect("same tower") {
            return rec;
        }
        let s = search_acyclic(t, a, b).expect("finite base field");
        rec.isomorphisms_checked = s.isomorphisms_checked;
        rec.non_strong_candidates = s.non_strong_candidates;
        match s.found {
            Some(f) => {
                rec.status = PairStatus::Acyclic;
                rec.acyclic_matching = Some(format_matrix(t.base(), f.matrix()));
            }
            None => {
                rec.status = PairStatus::NoAcyclic;
                rec.refutations = s.refutations;
            }
        }
        rec
    }

    fn random_poly<R: Rng>(&self, rng: &mut R, max_deg: usize) -> Vec<u32> {
        let k = self.tower.base();
        loop {
            let v: Vec<u32> = (0..=max_deg).map(|_| k.random(rng)).collect();
            let v = self.tower.normalize(&v);
            if !v.is_empty() {
                return v;
            }
        }
    }

    fn random_subspace<R: Rng>(&self, rng: &mut R, dim: usize, max_deg: usize) -> Option<Subspace<PrimeField>> {
        let gens: Vec<_> = (0..dim).map(|_| self.random_poly(rng, max_deg)).collect();
        let s = self.tower.span(&gens).expect("polynomial ambient");
        (s.dim() == dim).then_some(s)
    }
}

impl ScanJob for AcyclicScan {
    type Record = AcyclicPairRecord;
    type Report = AcyclicScanReport;

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn unit_count(&self) -> usize {
        match &self.units {
            Units::Finite(s) => s.len() * s.len(),
            Units::Sampled { samples, .. } => *samples,
        }
    }

    fn run_unit(&self, index: usize) -> AcyclicPairRecord {
        match &self.units {
            Units::Finite(s) => {
                let m = s.len();
                self.classify(self.config.dim, &s[index / m], &s[index % m])
            }
            Units::Sampled { seed, max_deg, .. } => {
                let dim = index % self.config.dim + 1;
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(index as u64);
                for attempt in 1..=SAMPLING_ATTEMPTS {
                    let (Some(a), Some(b)) =
                        (self.random_subspace(&mut rng, dim, *max_deg), self.random_subspace(&mut rng, dim, *max_deg))
                    else {
                        continue;
                    };
                    if !strong_matching_exists(&self.tower, &a, &b).expect("same tower") {
                        continue;
                    }
                    let mut rec = self.classify(dim, &a, &b);
                    rec.attempts = Some(attempt);
                    return rec;
                }
                AcyclicPairRecord {
                    dim,
                    a: Vec::new(),
                    b: Vec::new(),
                    status: PairStatus::SamplingFailed,
                    acyclic_matching: None,
                    isomorphisms_checked: 0,
                    non_strong_candidates: 0,
                    refutations: Vec::new(),
                    attempts: Some(SAMPLING_ATTEMPTS),
                }
            }
        }
    }

    fn build_report(&self, records: &[Option<AcyclicPairRecord>]) -> Result<AcyclicScanReport> {
        let done: Vec<&AcyclicPairRecord> = records.iter().flatten().collect();
        let complete = done.len() == records.len();
        let count = |s: PairStatus| done.iter().filter(|r| r.status == s).count() as u64;
        let sampled = matches!(self.units, Units::Sampled { .. });
        let failing = done.iter().find(|r| r.status == PairStatus::NoAcyclic);
        let verdict = match failing {
            Some(r) => Verdict::Fails { witness: AcyclicWitness { a: r.a.clone(), b: r.b.clone() } },
            None if sampled => Verdict::Inconclusive {
                reason: format!(
                    "sampled mode: {} of {} sampled pairs have an acyclic strong matching",
                    count(PairStatus::Acyclic),
                    records.len()
                ),
            },
            None if complete => Verdict::Holds,
            None => Verdict::Inconclusive {
                reason: format!("budget exhausted: {} of {} pairs classified", done.len(), records.len()),
            },
        };
        let mut certificates = Vec::new();
        let mut discrepancies = Vec::new();
        if let Some(r) = failing {
            let cert = WitnessCertificate::LinearNoAcyclic {
                tower: self.tower.descriptor(),
                a: r.a.clone(),
                b: r.b.clone(),
                refutations: r.refutations.clone(),
            };
            if !self.tower.is_finite_extension() {
                discrepancies.push(WitnessCertificate::discrepancy(
                    THEOREM_TRANSCENDENTAL,
                    &format!("{} has a pair with AB ∩ A = {{0}} and no acyclic strong matching", self.tower.descriptor()),
                    Some(cert.clone()),
                ));
            }
            certificates.push(cert);
        }
        let dims = match &self.units {
            Units::Finite(_) => vec![self.config.dim],
            Units::Sampled { .. } => (1..=self.config.dim).collect(),
        };
        Ok(AcyclicScanReport {
            tower: self.tower.descriptor(),
            mode: if sampled { "sampled" } else { "exhaustive" }.into(),
            dims,
            coverage: Coverage {
                complete,
                units_total: records.len() as u64,
                units_classified: done.len() as u64,
                exhaustive_coverage: complete && !sampled,
            },
            pairs_total: records.len() as u64,
            pairs_excluded: count(PairStatus::Excluded),
            pairs_with_acyclic: count(PairStatus::Acyclic),
            pairs_without_acyclic: count(PairStatus::NoAcyclic),
            sampling_failures: count(PairStatus::SamplingFailed),
            non_strong_candidates: done.iter().map(|r| r.non_strong_candidates as u64).sum(),
            prime_degree: self.tower.degree().is_some_and(|d| is_prime(d as u64)),
            acyclic_matching_property: verdict,
            certificates,
            discrepancies,
        })
    }
}

/// Per-pair comparison of `AB ∩ A = {0}` with the strong-matching behaviour
/// of sampled isomorphisms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongCriterionReport {
    pub tower: String,
    pub max_dim: usize,
    pub pairs: u64,
    pub criterion_true: u64,
    pub criterion_false: u64,
    pub isomorphisms_tested: u64,
    /// Pairs with `AB ∩ A = {0}` and a tested map that is not strong.
    pub if_failures: u64,
    /// Pairs with `AB ∩ A ≠ {0}` and a tested map that is strong.
    pub only_if_failures: u64,
    /// Maps whose status differs from [`pointwise_products_avoid`].
    pub pointwise_discrepancies: u64,
    pub discrepancies: Vec<String>,
}

/// For every pair of subspaces of equal dimension `<= max_dim`, tests up to
/// `per_pair` seeded isomorphisms (all of them when there are fewer): each
/// must be a strong matching iff `AB ∩ A = {0}`.
pub fn check_strong_criterion(desc: &str, max_dim: usize, per_pair: usize, seed: u64) -> Result<StrongCriterionReport> {
    let t = prime_tower(desc)?;
    if !t.is_finite_field() {
        return Err(Error::Unsupported("the criterion check needs a finite field".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = StrongCriterionReport {
        tower: t.descriptor(),
        max_dim,
        pairs: 0,
        criterion_true: 0,
        criterion_false: 0,
        isomorphisms_tested: 0,
        if_failures: 0,
        only_if_failures: 0,
        pointwise_discrepancies: 0,
        discrepancies: Vec::new(),
    };
    for dim in 1..=max_dim {
        let subs = finite_subspaces(&t, dim)?;
        for a in &subs {
            for b in &subs {
                rep.pairs += 1;
                let exists = strong_matching_exists(&t, a, b)?;
                if exists {
                    rep.criterion_true += 1;
                } else {
                    rep.criterion_false += 1;
                }
                let pointwise = pointwise_products_avoid(&t, a, b)?;
                let mut isos = isomorphisms_up_to_scalar(t.base(), a, b)?;
                isos.shuffle(&mut rng);
                isos.truncate(per_pair);
                let mut disagreed = false;
                for f in isos {
                    rep.isomorphisms_tested += 1;
                    let r = is_strong_matching(&t, &f)?;
                    if r.strong != pointwise {
                        rep.pointwise_discrepancies += 1;
                    }
                    if r.strong != exists {
                        disagreed = true;
                        rep.discrepancies.push(format!(
                            "A = {:?}, B = {:?}, f = {:?}: AB ∩ A = 0 is {exists}, strong is {}",
                            format_list(&t, a.rows()),
                            format_list(&t, b.rows()),
                            format_matrix(t.base(), f.matrix()),
                            r.strong
                        ));
                    }
                }
                if disagreed {
                    if exists {
                        rep.if_failures += 1;
                    } else {
                        rep.only_if_failures += 1;
                    }
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::{execute, ExecOptions};

    #[test]
    fn gf4_lines_have_the_property() {
        let job = PropertyScan::new(PropertyScanConfig { tower: "gf(2^2):x^2+x+1".into(), dim: 1 }).unwrap();
        let out = execute(&job, &ExecOptions::default(), Default::default()).unwrap();
        let rep = job.build_report(&out.records).unwrap();
        assert_eq!(rep.pairs_total, 9);
        assert_eq!(rep.pairs_excluded, 3);
        assert_eq!(rep.pairs_classified, 6);
        assert!(rep.linear_matching_property.is_holds());
        assert_eq!(rep.prediction.agreement, "agrees");
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(PropertyScan::new(PropertyScanConfig { tower: "gf(2^2)".into(), dim: 2 }).is_err());
        assert!(PropertyScan::new(PropertyScanConfig { tower: "fp(2)(t)".into(), dim: 1 }).is_err());
        assert!(PropertyScan::new(PropertyScanConfig { tower: "q".into(), dim: 1 }).is_err());
        let cfg = AcyclicScanConfig { tower: "fp(2)(t)".into(), dim: 2, max_deg: Some(3), samples: None, seed: Some(1) };
        assert!(AcyclicScan::new(cfg).is_err());
    }

    #[test]
    fn gf4_acyclic_lines() {
        let cfg = AcyclicScanConfig { tower: "gf(2^2)".into(), dim: 1, max_deg: None, samples: None, seed: None };
        let job = AcyclicScan::new(cfg).unwrap();
        let out = execute(&job, &ExecOptions::default(), Default::default()).unwrap();
        let rep = job.build_report(&out.records).unwrap();
        assert_eq!(rep.pairs_total, 9);
        // the only line with AB ∩ A = 0 pairs are those with B ≠ K
        assert_eq!(rep.pairs_with_acyclic, 6);
        assert!(rep.acyclic_matching_property.is_holds());
    }

    #[test]
    fn sampled_function_field_is_deterministic() {
        let cfg = AcyclicScanConfig { tower: "fp(2)(t)".into(), dim: 2, max_deg: Some(2), samples: Some(4), seed: Some(9) };
        let job = AcyclicScan::new(cfg).unwrap();
        let one = execute(&job, &ExecOptions { workers: 1, ..Default::default() }, Default::default()).unwrap();
        let four = execute(&job, &ExecOptions { workers: 4, ..Default::default() }, Default::default()).unwrap();
        let r1 = serde_json::to_string(&job.build_report(&one.records).unwrap()).unwrap();
        let r4 = serde_json::to_string(&job.build_report(&four.records).unwrap()).unwrap();
        assert_eq!(r1, r4);
        assert!(!job.build_report(&one.records).unwrap().acyclic_matching_property.is_holds());
    }
}
