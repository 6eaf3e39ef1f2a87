use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_pair, format_list, parse_strings, random_invertible, BasisSeq};
use crate::error::{Error, Result};
use crate::field::matrix::{inverse, rank, Matrix};
use crate::field::{annihilator, AnyTower, Field, Subspace, Tower};

/// Replay data for one index `i`: the subspace `a_i⁻¹A ∩ B` and the span of
/// the `b_j` with `j ≠ i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCheck {
    pub index: usize,
    pub preimage: Vec<String>,
    pub others: Vec<String>,
    pub contained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedBasisCertificate {
    pub tower: String,
    pub basis_a: Vec<String>,
    pub basis_b: Vec<String>,
    pub per_index: Vec<IndexCheck>,
    pub matched: bool,
}

impl MatchedBasisCertificate {
    /// Recomputes every index check from the stated bases.
    pub fn replay(&self) -> Result<bool> {
        crate::with_tower!(AnyTower::parse(&self.tower)?, t => {
            let ba = BasisSeq::new(&t, parse_strings(&t, &self.basis_a)?)?;
            let bb = BasisSeq::new(&t, parse_strings(&t, &self.basis_b)?)?;
            let (matched, fresh) = is_matched_basis(&t, &ba, &bb)?;
            if fresh.per_index != self.per_index || matched != self.matched {
                return Err(Error::Invalid("recorded index checks differ from the recomputed ones".into()));
            }
            Ok(matched)
        })
    }
}

/// A set of indices `S` with `dim Σ_{i∈S} W_i < |S|`, where `W_i` is the
/// annihilator of `a_i⁻¹A ∩ B` in the dual of `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadoViolation {
    pub indices: Vec<usize>,
    pub span_dim: usize,
}

fn others_span<F: Field>(tower: &Tower<F>, b: &Subspace<F>, bb: &BasisSeq<F>, i: usize) -> Result<Subspace<F>> {
    let others: Vec<_> = bb.elems().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
    Subspace::span(tower.base(), b.ambient(), &others)
}

/// Whether `a_i⁻¹A ∩ B ⊆ ⟨b_j : j ≠ i⟩` for every `i`.
pub fn is_matched_basis<F: Field>(
    tower: &Tower<F>,
    ba: &BasisSeq<F>,
    bb: &BasisSeq<F>,
) -> Result<(bool, MatchedBasisCertificate)> {
    let (a, b) = (ba.parent(), bb.parent());
    check_pair(a, b)?;
    let k = tower.base();
    let mut per_index = Vec::new();
    for (i, ai) in ba.elems().iter().enumerate() {
        let pre = tower.preimage_in(b, ai, a)?;
        let others = others_span(tower, b, bb, i)?;
        let contained = pre.is_subspace_of(k, &others)?;
        per_index.push(IndexCheck {
            index: i,
            preimage: format_list(tower, pre.rows()),
            others: format_list(tower, others.rows()),
            contained,
        });
    }
    let matched = per_index.iter().all(|c| c.contained);
    let cert = MatchedBasisCertificate {
        tower: tower.descriptor(),
        basis_a: format_list(tower, ba.elems()),
        basis_b: format_list(tower, bb.elems()),
        per_index,
        matched,
    };
    Ok((matched, cert))
}

/// The annihilators `W_i` in coordinates of the dual of `B`.
fn dual_sets<F: Field>(tower: &Tower<F>, ba: &BasisSeq<F>, b: &Subspace<F>) -> Result<Vec<Subspace<F>>> {
    let a = ba.parent();
    ba.elems()
        .iter()
        .map(|ai| {
            let v = tower.preimage_in(b, ai, a)?;
            annihilator(tower.base(), &v, b)
        })
        .collect()
}

fn span_dim<F: Field>(k: &F, n: usize, ws: &[Subspace<F>], idx: &[usize]) -> usize {
    let rows: Matrix<F::Elem> = idx.iter().flat_map(|&i| ws[i].rows().iter().cloned()).collect();
    rank(k, &rows, n)
}

/// First violator in order of size, then lexicographic order.
fn rado_violation<F: Field>(k: &F, n: usize, ws: &[Subspace<F>]) -> Option<RadoViolation> {
    for size in 1..=ws.len() {
        for idx in (0..ws.len()).combinations(size) {
            let d = span_dim(k, n, ws, &idx);
            if d < size {
                return Some(RadoViolation { indices: idx, span_dim: d });
            }
        }
    }
    None
}

fn pick<F: Field>(k: &F, n: usize, ws: &[Subspace<F>], chosen: &mut Matrix<F::Elem>) -> bool {
    let i = chosen.len();
    if i == ws.len() {
        return true;
    }
    for row in ws[i].rows() {
        chosen.push(row.clone());
        if rank(k, chosen, n) == chosen.len() && pick(k, n, ws, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// A basis `ℬ` of `B` such that `ba` is matched to `ℬ`, or the Rado violator
/// proving that none exists.
///
/// A matched `ℬ` corresponds to independent functionals `φ_i ∈ W_i`: then
/// `b_i` is dual to `φ_i`, so `⟨b_j : j ≠ i⟩ = ker φ_i ⊇ a_i⁻¹A ∩ B`.
pub fn find_matched_basis<F: Field>(
    tower: &Tower<F>,
    ba: &BasisSeq<F>,
    b: &Subspace<F>,
) -> Result<std::result::Result<BasisSeq<F>, RadoViolation>> {
    let n = check_pair(ba.parent(), b)?;
    let k = tower.base();
    let ws = dual_sets(tower, ba, b)?;
    if let Some(v) = rado_violation(k, n, &ws) {
        return Ok(Err(v));
    }
    let mut phi = Vec::new();
    if !pick(k, n, &ws, &mut phi) {
        return Err(Error::Invalid("independent transversal missing although the Rado condition holds".into()));
    }
    let inv = inverse(k, &phi).expect("independent functionals");
    // b_i has coordinates given by column i of phi^-1
    let elems: Vec<_> = (0..n)
        .map(|i| {
            let coords: Vec<F::Elem> = inv.iter().map(|r| r[i].clone()).collect();
            b.combine(k, &coords)
        })
        .collect();
    Ok(Ok(BasisSeq::of(tower, elems, b)?))
}

/// Outcome of deciding whether `A` is matched to `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchedSubspace<F: Field> {
    pub matched: bool,
    /// False for the sampled mode.
    pub exhaustive: bool,
    pub bases_checked: usize,
    pub witness: Option<(BasisSeq<F>, RadoViolation)>,
}

fn check_bases<F: Field>(
    tower: &Tower<F>,
    b: &Subspace<F>,
    bases: impl Iterator<Item = BasisSeq<F>>,
    exhaustive: bool,
) -> Result<MatchedSubspace<F>> {
    let mut checked = 0;
    for ba in bases {
        checked += 1;
        if let Err(v) = find_matched_basis(tower, &ba, b)? {
            return Ok(MatchedSubspace { matched: false, exhaustive, bases_checked: checked, witness: Some((ba, v)) });
        }
    }
    Ok(MatchedSubspace { matched: true, exhaustive, bases_checked: checked, witness: None })
}

/// Decides whether every basis of `A` has a matched basis of `B`, by
/// enumerating the bases of `A` up to order and scaling. Finite base fields only.
pub fn is_matched_subspace<F: Field>(tower: &Tower<F>, a: &Subspace<F>, b: &Subspace<F>) -> Result<MatchedSubspace<F>> {
    check_pair(a, b)?;
    let bases = a.bases_up_to_scaling(tower.base()).ok_or_else(|| {
        Error::Unsupported("the quantifier over bases needs a finite base field; use the sampled mode".into())
    })?;
    let seqs = bases.into_iter().map(|v| BasisSeq::of(tower, v, a).expect("enumerated basis"));
    check_bases(tower, b, seqs, true)
}

/// Checks `samples` random bases of `A`. Never exhaustive.
pub fn is_matched_subspace_sampled<F: Field, R: Rng + ?Sized>(
    tower: &Tower<F>,
    a: &Subspace<F>,
    b: &Subspace<F>,
    samples: usize,
    rng: &mut R,
) -> Result<MatchedSubspace<F>> {
    let n = check_pair(a, b)?;
    let k = tower.base();
    let mut seqs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let m = random_invertible(k, n, rng);
        let elems: Vec<_> = m.iter().map(|c| a.combine(k, c)).collect();
        seqs.push(BasisSeq::of(tower, elems, a)?);
    }
    check_bases(tower, b, seqs.into_iter(), false)
}

/// Replays a linear-unmatched certificate: the stated indices must give
/// annihilators spanning fewer dimensions than there are indices.
pub fn verify_unmatched(
    tower: &str,
    a: &[String],
    b: &[String],
    basis_a: &[String],
    violating: &[usize],
) -> Result<String> {
    crate::with_tower!(AnyTower::parse(tower)?, t => {
        let a_sub = t.span(&parse_strings(&t, a)?)?;
        let b_sub = t.span(&parse_strings(&t, b)?)?;
        if a_sub.dim() != a.len() || b_sub.dim() != b.len() {
            return Err(Error::Invalid("A or B is given by dependent vectors".into()));
        }
        let ba = BasisSeq::of(&t, parse_strings(&t, basis_a)?, &a_sub)?;
        let n = check_pair(&a_sub, &b_sub)?;
        if violating.is_empty() || violating.iter().any(|&i| i >= n) || !violating.iter().tuple_windows().all(|(x, y)| x < y) {
            return Err(Error::Invalid("violating indices must be distinct and in range".into()));
        }
        let ws = dual_sets(&t, &ba, &b_sub)?;
        let d = span_dim(t.base(), n, &ws, violating);
        if d >= violating.len() {
            return Err(Error::Invalid(format!(
                "annihilators at {violating:?} span dimension {d}, not less than {}",
                violating.len()
            )));
        }
        Ok(format!(
            "{} indices of the basis of A only admit functionals spanning dimension {d}, so no basis of B is matched to it",
            violating.len()
        ))
    })
}
