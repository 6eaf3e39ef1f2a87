use rand::Rng;

use super::matched::is_matched_basis;
use super::{check_pair, random_invertible, BasisSeq, LinearMap};
use crate::error::{Error, Result};
use crate::field::{Field, Subspace, Tower};

/// `AB ∩ A = {0}`.
pub fn strong_matching_exists<F: Field>(tower: &Tower<F>, a: &Subspace<F>, b: &Subspace<F>) -> Result<bool> {
    check_pair(a, b)?;
    let ab = tower.product(a, b)?;
    Ok(ab.intersect(tower.base(), a)?.is_zero())
}

/// Whether no product `ab` of nonzero `a ∈ A`, `b ∈ B` lies in `A`. Weaker
/// than `AB ∩ A = {0}`, which also rules out sums of such products. Finite
/// base fields only.
pub fn pointwise_products_avoid<F: Field>(tower: &Tower<F>, a: &Subspace<F>, b: &Subspace<F>) -> Result<bool> {
    check_pair(a, b)?;
    let points = a
        .projective_points(tower.base())
        .ok_or_else(|| Error::Unsupported("pointwise products need a finite base field".into()))?;
    for x in points {
        if !tower.preimage_in(b, &x, a)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongCheck<F: Field> {
    pub strong: bool,
    pub exhaustive: bool,
    pub bases_checked: usize,
    /// A basis of `A` not matched to its image.
    pub failing_basis: Option<BasisSeq<F>>,
}

fn check<F: Field>(
    tower: &Tower<F>,
    f: &LinearMap<F>,
    bases: impl Iterator<Item = BasisSeq<F>>,
    exhaustive: bool,
) -> Result<StrongCheck<F>> {
    let k = tower.base();
    if !f.is_isomorphism(k) {
        return Err(Error::Invalid("the map is not an isomorphism".into()));
    }
    let mut checked = 0;
    for ba in bases {
        checked += 1;
        let bb = BasisSeq::of(tower, f.image_of_basis(k, &ba)?, f.codomain())?;
        if !is_matched_basis(tower, &ba, &bb)?.0 {
            return Ok(StrongCheck { strong: false, exhaustive, bases_checked: checked, failing_basis: Some(ba) });
        }
    }
    Ok(StrongCheck { strong: true, exhaustive, bases_checked: checked, failing_basis: None })
}

/// Whether every basis of `A` is matched to its image under `f`. Bases are
/// enumerated up to order and scaling; finite base fields only.
pub fn is_strong_matching<F: Field>(tower: &Tower<F>, f: &LinearMap<F>) -> Result<StrongCheck<F>> {
    let a = f.domain();
    check_pair(a, f.codomain())?;
    let bases = a
        .bases_up_to_scaling(tower.base())
        .ok_or_else(|| Error::Unsupported("exhaustive strong-matching check needs a finite base field".into()))?;
    let seqs = bases.into_iter().map(|v| BasisSeq::of(tower, v, a).expect("enumerated basis"));
    check(tower, f, seqs, true)
}

/// Checks `samples` random bases of `A`. Never exhaustive.
pub fn is_strong_matching_sampled<F: Field, R: Rng + ?Sized>(
    tower: &Tower<F>,
    f: &LinearMap<F>,
    samples: usize,
    rng: &mut R,
) -> Result<StrongCheck<F>> {
    let a = f.domain();
    let n = check_pair(a, f.codomain())?;
    let k = tower.base();
    let mut seqs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let m = random_invertible(k, n, rng);
        seqs.push(BasisSeq::of(tower, m.iter().map(|c| a.combine(k, c)).collect(), a)?);
    }
    check(tower, f, seqs.into_iter(), false)
}
