//! Seeded sampling of pairs in `Z^k` restricted to a window `[-w, w]^k`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::{self, WitnessCertificate};
use crate::error::{Error, Result};
use crate::exec::{RunManifest, ScanJob};
use crate::group::{validate_pair, AbelianGroup, GroupElement};
use crate::group_scan::{Coverage, THEOREM_MATCHING, THEOREM_TORSION_FREE_ACYCLIC};
use crate::matching::{assignment_to_matching, EnumerationStatus, Matching, PairInstance, DEFAULT_CAP};
use crate::verdict::{Tristate, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeScanConfig {
    pub rank: usize,
    pub window: u32,
    pub max_size: usize,
    pub samples: usize,
    pub seed: u64,
    pub cap: usize,
}

impl FreeScanConfig {
    pub fn new(rank: usize, window: u32, samples: usize, seed: u64) -> Self {
        Self { rank, window, max_size: 5, samples, seed, cap: DEFAULT_CAP }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreePairRecord {
    pub size: usize,
    pub a: Vec<GroupElement>,
    pub b: Vec<GroupElement>,
    pub matchable: bool,
    pub matching_count: usize,
    pub enumeration: EnumerationStatus,
    pub has_acyclic: Tristate,
    pub witness: Option<Matching>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeScanReport {
    pub group: String,
    pub window: u32,
    pub max_size: usize,
    pub samples: usize,
    pub coverage: Coverage,
    pub pairs_with_acyclic: u64,
    pub pairs_without_acyclic: u64,
    pub unmatchable_pairs: u64,
    pub inconclusive_pairs: u64,
    pub matching_property: Verdict<FreePairRecord>,
    pub acyclic_matching_property: Verdict<FreePairRecord>,
    pub certificates: Vec<WitnessCertificate>,
    pub discrepancies: Vec<WitnessCertificate>,
}

pub struct FreeScan {
    config: FreeScanConfig,
    group: AbelianGroup,
    side: i64,
    manifest: RunManifest,
}

impl FreeScan {
    pub fn new(config: FreeScanConfig) -> Result<Self> {
        let group = AbelianGroup::free(config.rank)?;
        if config.window == 0 {
            return Err(Error::Invalid("window must be positive".into()));
        }
        if config.max_size == 0 || config.max_size > 8 {
            return Err(Error::Invalid("max size must be in 1..=8".into()));
        }
        if config.cap == 0 {
            return Err(Error::Invalid("cap must be positive".into()));
        }
        let side = 2 * config.window as i64 + 1;
        let points = (side as f64).powi(config.rank as i32);
        if points > 1e9 {
            return Err(Error::Infeasible("window too large".into()));
        }
        if (points as usize) <= config.max_size {
            return Err(Error::Invalid("window too small for the requested sizes".into()));
        }
        let parameters = serde_json::to_value(&config).expect("config serializes");
        let manifest = RunManifest::new("scan free", parameters, Some(config.seed));
        Ok(Self { config, group, side, manifest })
    }

    fn point(&self, mut index: usize) -> GroupElement {
        let w = self.config.window as i64;
        let coords: Vec<i64> = (0..self.config.rank)
            .map(|_| {
                let c = (index as i64 % self.side) - w;
                index /= self.side as usize;
                c
            })
            .collect();
        self.group.element(&coords).expect("rank matches")
    }

    fn zero_index(&self) -> usize {
        let w = self.config.window as usize;
        (0..self.config.rank).fold(0, |acc, _| acc * self.side as usize + w)
    }
}

impl ScanJob for FreeScan {
    type Record = FreePairRecord;
    type Report = FreeScanReport;

    fn manifest(&self) -> &RunManifest {
        &self.manifest
    }

    fn unit_count(&self) -> usize {
        self.config.samples
    }

    fn run_unit(&self, index: usize) -> FreePairRecord {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index as u64);
        let points = (self.side as usize).pow(self.config.rank as u32);
        let k = rng.gen_range(1..=self.config.max_size);
        let zero = self.zero_index();
        let a: Vec<GroupElement> = sample(&mut rng, points, k).into_iter().map(|i| self.point(i)).collect();
        let b: Vec<GroupElement> = sample(&mut rng, points - 1, k)
            .into_iter()
            .map(|i| self.point(if i >= zero { i + 1 } else { i }))
            .collect();
        let pair = validate_pair(&self.group, &a, &b).expect("distinct sampled points");
        let inst = PairInstance::from_pair(&self.group, &pair).expect("free group arithmetic");
        let matchable = inst.perfect_matching().is_ok();
        let summary = inst.classify(self.config.cap);
        let (enumeration, has_acyclic) = match (matchable, summary.exhaustive) {
            (false, _) => (EnumerationStatus::Exhaustive, Tristate::False),
            (true, true) => (EnumerationStatus::Exhaustive, Tristate::from(Some(summary.acyclic.is_some()))),
            (true, false) => (EnumerationStatus::Inconclusive, Tristate::Inconclusive),
        };
        FreePairRecord {
            size: k,
            a: pair.a().to_vec(),
            b: pair.b().to_vec(),
            matchable,
            matching_count: summary.matching_count,
            enumeration,
            has_acyclic,
            witness: summary.acyclic.map(|m| assignment_to_matching(&pair, &m)),
        }
    }

    fn build_report(&self, records: &[Option<FreePairRecord>]) -> Result<FreeScanReport> {
        let done: Vec<&FreePairRecord> = records.iter().flatten().collect();
        let count = |t: Tristate| done.iter().filter(|r| r.has_acyclic == t).count() as u64;
        let unmatchable = done.iter().find(|r| !r.matchable);
        let no_acyclic = done.iter().find(|r| r.has_acyclic == Tristate::False);
        let sampled_reason = |what: &str, n: u64| {
            format!("sampled mode: {n} of {} sampled pairs {what}; only failures are definitive", records.len())
        };
        let matchable_count = done.iter().filter(|r| r.matchable).count() as u64;
        let matching_property = match unmatchable {
            Some(r) => Verdict::Fails { witness: (*r).clone() },
            None => Verdict::Inconclusive { reason: sampled_reason("are matchable", matchable_count) },
        };
        let acyclic_matching_property = match no_acyclic {
            Some(r) => Verdict::Fails { witness: (*r).clone() },
            None => Verdict::Inconclusive { reason: sampled_reason("have an acyclic matching", count(Tristate::True)) },
        };
        let mut certificates = Vec::new();
        let mut discrepancies = Vec::new();
        let desc = self.group.descriptor();
        if let Some(r) = unmatchable {
            let pair = validate_pair(&self.group, &r.a, &r.b)?;
            let cert = certificate::group_unmatchable(&self.group, &pair)?;
            discrepancies.push(WitnessCertificate::discrepancy(
                THEOREM_MATCHING,
                &format!("{desc} is torsion-free, yet a sampled pair has no matching"),
                Some(cert.clone()),
            ));
            certificates.push(cert);
        }
        if let Some(r) = no_acyclic.filter(|r| r.matchable) {
            let pair = validate_pair(&self.group, &r.a, &r.b)?;
            let cert = certificate::group_no_acyclic(&self.group, &pair, self.config.cap)?;
            discrepancies.push(WitnessCertificate::discrepancy(
                THEOREM_TORSION_FREE_ACYCLIC,
                &format!("{desc} is torsion-free, yet a sampled pair has no acyclic matching"),
                Some(cert.clone()),
            ));
            certificates.push(cert);
        }
        Ok(FreeScanReport {
            group: desc,
            window: self.config.window,
            max_size: self.config.max_size,
            samples: self.config.samples,
            coverage: Coverage {
                complete: done.len() == records.len(),
                units_total: records.len() as u64,
                units_classified: done.len() as u64,
                exhaustive_coverage: false,
            },
            pairs_with_acyclic: count(Tristate::True),
            pairs_without_acyclic: count(Tristate::False),
            unmatchable_pairs: done.len() as u64 - matchable_count,
            inconclusive_pairs: count(Tristate::Inconclusive),
            matching_property,
            acyclic_matching_property,
            certificates,
            discrepancies,
        })
    }
}
