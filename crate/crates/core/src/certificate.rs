//! Self-contained witness certificates. Each one embeds its problem instance
//! and can be re-checked without rerunning the scan that produced it.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{validate_pair, AbelianGroup, GroupElement, SubsetPair};
use crate::matching::{acyclic_report, find_matching_or_obstruction, fingerprint, FingerprintClass, Matching};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessCertificate {
    /// `A, B` with no matching, proved by a Hall violator: a subset of `A`
    /// whose allowed partners in `B` are fewer than its size.
    GroupUnmatchable {
        group: String,
        a: Vec<GroupElement>,
        b: Vec<GroupElement>,
        hall_subset: Vec<GroupElement>,
        hall_neighbourhood: Vec<GroupElement>,
    },
    /// `A, B` whose matchings all share their fingerprint with another one.
    GroupNoAcyclic {
        group: String,
        a: Vec<GroupElement>,
        b: Vec<GroupElement>,
        matching_count: usize,
        classes: Vec<FingerprintClass>,
    },
    /// A basis of `A` with no matched basis of `B`: the functionals at
    /// `violating_indices` span fewer dimensions than there are indices.
    LinearUnmatched {
        tower: String,
        a: Vec<String>,
        b: Vec<String>,
        basis_a: Vec<String>,
        violating_indices: Vec<usize>,
    },
    /// `A, B` with `AB ∩ A = {0}` where every isomorphism (up to a scalar) is
    /// refuted by an automorphism inducing a strong matching not proportional to it.
    LinearNoAcyclic {
        tower: String,
        a: Vec<String>,
        b: Vec<String>,
        refutations: Vec<crate::linear::Refutation>,
    },
    /// An empirical result contradicting a stated theorem.
    TheoremDiscrepancy {
        theorem: String,
        claim: String,
        evidence: Option<Box<WitnessCertificate>>,
    },
}

/// What a successful verification established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub kind: String,
    pub detail: String,
}

impl WitnessCertificate {
    pub fn discrepancy(theorem: &str, claim: &str, evidence: Option<WitnessCertificate>) -> Self {
        Self::TheoremDiscrepancy { theorem: theorem.into(), claim: claim.into(), evidence: evidence.map(Box::new) }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::GroupUnmatchable { .. } => "group-unmatchable",
            Self::GroupNoAcyclic { .. } => "group-no-acyclic",
            Self::LinearUnmatched { .. } => "linear-unmatched",
            Self::LinearNoAcyclic { .. } => "linear-no-acyclic",
            Self::TheoremDiscrepancy { .. } => "theorem-discrepancy",
        }
    }

    pub fn is_discrepancy(&self) -> bool {
        matches!(self, Self::TheoremDiscrepancy { .. })
    }

    /// Replays the certificate. `Err(Error::Invalid)` means it does not hold.
    pub fn verify(&self) -> Result<Verification> {
        let detail = match self {
            Self::GroupUnmatchable { group, a, b, hall_subset, hall_neighbourhood } => {
                verify_unmatchable(group, a, b, hall_subset, hall_neighbourhood)?
            }
            Self::GroupNoAcyclic { group, a, b, matching_count, classes } => {
                verify_no_acyclic(group, a, b, *matching_count, classes)?
            }
            Self::LinearUnmatched { tower, a, b, basis_a, violating_indices } => {
                crate::linear::verify_unmatched(tower, a, b, basis_a, violating_indices)?
            }
            Self::LinearNoAcyclic { tower, a, b, refutations } => {
                crate::linear::verify_no_acyclic(tower, a, b, refutations)?
            }
            Self::TheoremDiscrepancy { evidence, .. } => match evidence {
                Some(e) => format!("evidence verified: {}", e.verify()?.detail),
                None => "no evidence attached; claim rests on the exhaustive coverage of the report".into(),
            },
        };
        Ok(Verification { kind: self.kind().into(), detail })
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn admissible(g: &AbelianGroup, a: &[GroupElement], b: &[GroupElement]) -> Result<SubsetPair> {
    let pair = validate_pair(g, a, b)?;
    if pair.zero_in_b() {
        return Err(invalid("B contains the identity, so the pair is not admissible"));
    }
    Ok(pair)
}

fn as_set(xs: &[GroupElement]) -> BTreeSet<&GroupElement> {
    xs.iter().collect()
}

/// Builds the certificate for an unmatchable pair.
pub fn group_unmatchable(g: &AbelianGroup, pair: &SubsetPair) -> Result<WitnessCertificate> {
    match find_matching_or_obstruction(g, pair)? {
        Ok(m) => Err(invalid(format!("pair is matchable: {m:?}"))),
        Err(h) => Ok(WitnessCertificate::GroupUnmatchable {
            group: g.descriptor(),
            a: pair.a().to_vec(),
            b: pair.b().to_vec(),
            hall_subset: h.subset,
            hall_neighbourhood: h.neighbourhood,
        }),
    }
}

/// Builds the certificate for a matchable pair without an acyclic matching.
pub fn group_no_acyclic(g: &AbelianGroup, pair: &SubsetPair, cap: usize) -> Result<WitnessCertificate> {
    let report = acyclic_report(g, pair, cap)?;
    match report.has_acyclic() {
        Some(false) => Ok(WitnessCertificate::GroupNoAcyclic {
            group: g.descriptor(),
            a: pair.a().to_vec(),
            b: pair.b().to_vec(),
            matching_count: report.matching_count,
            classes: report.classes,
        }),
        Some(true) => Err(invalid("pair has an acyclic matching")),
        None => Err(Error::Infeasible(format!("more than {cap} matchings; raise the cap"))),
    }
}

fn verify_unmatchable(
    group: &str,
    a: &[GroupElement],
    b: &[GroupElement],
    subset: &[GroupElement],
    neighbourhood: &[GroupElement],
) -> Result<String> {
    let g = AbelianGroup::parse(group)?;
    let pair = admissible(&g, a, b)?;
    let a_set = as_set(pair.a());
    let s = as_set(subset);
    if !s.iter().all(|x| a_set.contains(x)) || s.len() != subset.len() {
        return Err(invalid("Hall subset is not a set of elements of A"));
    }
    let mut nbhd = BTreeSet::new();
    for x in &s {
        for y in pair.b() {
            if !a_set.contains(&g.add(x, y)?) {
                nbhd.insert(y);
            }
        }
    }
    if nbhd != as_set(neighbourhood) {
        return Err(invalid("stated neighbourhood differs from the recomputed one"));
    }
    if nbhd.len() >= s.len() {
        return Err(invalid("neighbourhood is not smaller than the subset"));
    }
    Ok(format!("{} elements of A can only reach {} elements of B", s.len(), nbhd.len()))
}

fn verify_no_acyclic(
    group: &str,
    a: &[GroupElement],
    b: &[GroupElement],
    matching_count: usize,
    classes: &[FingerprintClass],
) -> Result<String> {
    let g = AbelianGroup::parse(group)?;
    let pair = admissible(&g, a, b)?;
    if pair.size() > 9 {
        return Err(Error::Unsupported("brute-force replay limited to sets of size 9".into()));
    }
    // all bijections, filtered directly by the definition
    let a_set = as_set(pair.a());
    let mut brute: BTreeSet<Matching> = BTreeSet::new();
    for perm in pair.b().iter().permutations(pair.size()) {
        let mut ok = true;
        for (x, y) in pair.a().iter().zip(&perm) {
            if a_set.contains(&g.add(x, y)?) {
                ok = false;
                break;
            }
        }
        if ok {
            brute.insert(Matching::new(pair.a().iter().cloned().zip(perm.into_iter().cloned()).collect()));
        }
    }
    let mut listed = BTreeSet::new();
    for class in classes {
        if class.matchings.len() < 2 {
            return Err(invalid("a fingerprint class has a single matching, which would be acyclic"));
        }
        for m in &class.matchings {
            if fingerprint(&g, m)? != class.fingerprint {
                return Err(invalid("a matching does not have its class fingerprint"));
            }
            if !listed.insert(m.clone()) {
                return Err(invalid("a matching is listed twice"));
            }
        }
    }
    if brute.is_empty() {
        return Err(invalid("pair has no matching at all"));
    }
    if listed != brute || brute.len() != matching_count {
        return Err(invalid(format!(
            "listed matchings ({}) differ from the {} bijections satisfying the definition",
            listed.len(),
            brute.len()
        )));
    }
    Ok(format!("all {} matchings fall into {} classes of size at least 2", brute.len(), classes.len()))
}
