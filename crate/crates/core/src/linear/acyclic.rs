use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::strong::{is_strong_matching, strong_matching_exists};
use super::{check_pair, format_matrix, isomorphisms_up_to_scalar, parse_matrix, parse_strings, BasisSeq, LinearMap};
use crate::error::{Error, Result};
use crate::field::matrix::{invertible_matrices, is_normalized, is_scalar_multiple, rank};
use crate::field::{AnyTower, Field, Subspace, Tower};

/// An automorphism `φ` of `A` together with the matching `g` it induces
/// from `f`, and the scalar `c` with `f = c·g` when there is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub phi: Vec<Vec<String>>,
    pub g: Vec<Vec<String>>,
    pub scalar: Option<String>,
}

/// Why an isomorphism `f: A -> B` is not an acyclic strong matching. Without
/// `phi`, `f` is not a strong matching at all; otherwise `phi` induces a
/// strong matching `g` that is not a scalar multiple of `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub f: Vec<Vec<String>>,
    pub phi: Option<Vec<Vec<String>>>,
    pub g: Option<Vec<Vec<String>>>,
}

/// `a·f(a) = φ(a)·g(φ(a))` for every `a ∈ A`. Over a finite base field every
/// element is checked; otherwise basis vectors and their pairwise sums, which
/// determine both sides since they are quadratic in `a`.
pub fn check_equivalence<F: Field>(
    tower: &Tower<F>,
    f: &LinearMap<F>,
    phi: &LinearMap<F>,
    g: &LinearMap<F>,
) -> Result<bool> {
    let k = tower.base();
    let a = f.domain();
    let n = a.dim();
    let probes: Vec<Vec<F::Elem>> = match a.vectors(k) {
        Some(all) => all,
        None => {
            let basis = crate::field::matrix::identity(k, n);
            let mut out: Vec<Vec<F::Elem>> = basis.iter().map(|c| a.combine(k, c)).collect();
            for i in 0..n {
                for j in i + 1..n {
                    let c: Vec<F::Elem> =
                        (0..n).map(|l| if l == i || l == j { k.one() } else { k.zero() }).collect();
                    out.push(a.combine(k, &c));
                }
            }
            out
        }
    };
    for v in probes {
        let lhs = tower.mul(&v, &f.apply(k, &v)?);
        let pv = phi.apply(k, &v)?;
        let rhs = tower.mul(&pv, &g.apply(k, &pv)?);
        if tower.normalize(&lhs) != tower.normalize(&rhs) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique linear `g: A -> B` with `a·f(a) = φ(a)·g(φ(a))`, if any.
pub fn induced_candidate<F: Field>(
    tower: &Tower<F>,
    f: &LinearMap<F>,
    phi: &LinearMap<F>,
) -> Result<Option<LinearMap<F>>> {
    let k = tower.base();
    let (a, b) = (f.domain(), f.codomain());
    if phi.domain() != a || phi.codomain() != a || !phi.is_isomorphism(k) {
        return Err(Error::Invalid("φ must be an automorphism of A".into()));
    }
    let mut images = Vec::with_capacity(a.dim());
    let mut values = Vec::with_capacity(a.dim());
    for e in a.rows() {
        let p = phi.apply(k, e)?;
        let prod = tower.mul(e, &f.apply(k, e)?);
        let Some(v) = tower.div(&prod, &p)? else {
            return Ok(None);
        };
        if !b.contains(k, &v)? {
            return Ok(None);
        }
        images.push(p);
        values.push(v);
    }
    let basis = BasisSeq::of(tower, images, a)?;
    let g = LinearMap::from_basis_images(tower, &basis, b, &values)?;
    Ok(check_equivalence(tower, f, phi, &g)?.then_some(g))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicCheck {
    pub acyclic: bool,
    pub automorphisms_checked: usize,
    /// Automorphisms inducing a map that is linear into `B` but not strong.
    pub non_strong_candidates: usize,
    /// A strong `g` equivalent to `f` with `f ≠ c·g`, when not acyclic.
    pub witness: Option<EquivalenceWitness>,
}

/// Decides whether the strong matching `f` is acyclic by enumerating the
/// automorphisms of `A` up to scalars. Scaling `φ` by `c` scales the induced
/// map by `c⁻²`, so one representative per class suffices.
pub fn is_acyclic_strong_matching<F: Field>(tower: &Tower<F>, f: &LinearMap<F>) -> Result<AcyclicCheck> {
    let k = tower.base();
    if invertible_matrices(k, 1).is_none() {
        return Err(Error::Unsupported(
            "automorphism enumeration needs a finite base field; use check_equivalence to test a given pair".into(),
        ));
    }
    if !is_strong_matching(tower, f)?.strong {
        return Err(Error::Invalid("the map is not a strong matching".into()));
    }
    let a = f.domain();
    let mut checked = 0;
    let mut non_strong = 0;
    for phi in isomorphisms_up_to_scalar(k, a, a)? {
        checked += 1;
        let Some(g) = induced_candidate(tower, f, &phi)? else {
            continue;
        };
        if !is_strong_matching(tower, &g)?.strong {
            non_strong += 1;
            continue;
        }
        if is_scalar_multiple(k, f.matrix(), g.matrix()).is_none() {
            return Ok(AcyclicCheck {
                acyclic: false,
                automorphisms_checked: checked,
                non_strong_candidates: non_strong,
                witness: Some(EquivalenceWitness {
                    phi: format_matrix(k, phi.matrix()),
                    g: format_matrix(k, g.matrix()),
                    scalar: None,
                }),
            });
        }
    }
    Ok(AcyclicCheck { acyclic: true, automorphisms_checked: checked, non_strong_candidates: non_strong, witness: None })
}

/// Result of searching all isomorphisms `A -> B` for an acyclic strong matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicSearch<F: Field> {
    pub found: Option<LinearMap<F>>,
    pub isomorphisms_checked: usize,
    pub non_strong_candidates: usize,
    /// One refutation per isomorphism class checked before `found`.
    pub refutations: Vec<Refutation>,
}

pub fn search_acyclic<F: Field>(tower: &Tower<F>, a: &Subspace<F>, b: &Subspace<F>) -> Result<AcyclicSearch<F>> {
    let k = tower.base();
    let mut out = AcyclicSearch { found: None, isomorphisms_checked: 0, non_strong_candidates: 0, refutations: Vec::new() };
    for f in isomorphisms_up_to_scalar(k, a, b)? {
        out.isomorphisms_checked += 1;
        if !is_strong_matching(tower, &f)?.strong {
            out.refutations.push(Refutation { f: format_matrix(k, f.matrix()), phi: None, g: None });
            continue;
        }
        let check = is_acyclic_strong_matching(tower, &f)?;
        out.non_strong_candidates += check.non_strong_candidates;
        match check.witness {
            None => {
                out.found = Some(f);
                return Ok(out);
            }
            Some(w) => out.refutations.push(Refutation { f: format_matrix(k, f.matrix()), phi: Some(w.phi), g: Some(w.g) }),
        }
    }
    Ok(out)
}

/// Replays a linear-no-acyclic certificate.
pub fn verify_no_acyclic(tower: &str, a: &[String], b: &[String], refutations: &[Refutation]) -> Result<String> {
    crate::with_tower!(AnyTower::parse(tower)?, t => verify_no_acyclic_in(&t, a, b, refutations))
}

fn verify_no_acyclic_in<F: Field>(t: &Tower<F>, a: &[String], b: &[String], refutations: &[Refutation]) -> Result<String> {
    let k = t.base();
    let bad = |m: &str| Err(Error::Invalid(m.to_string()));
    let a_sub = t.span(&parse_strings(t, a)?)?;
    let b_sub = t.span(&parse_strings(t, b)?)?;
    let n = check_pair(&a_sub, &b_sub)?;
    if !strong_matching_exists(t, &a_sub, &b_sub)? {
        return bad("AB ∩ A is nonzero");
    }
    let classes = invertible_matrices(k, n)
        .ok_or_else(|| Error::Unsupported("replay needs a small finite base field".into()))?
        .into_iter()
        .filter(|m| is_normalized(k, m))
        .count();
    let mut seen = BTreeSet::new();
    for r in refutations {
        let fm = parse_matrix(k, &r.f)?;
        if rank(k, &fm, n) != n || !is_normalized(k, &fm) || fm.len() != n {
            return bad("a refuted map is not a normalized isomorphism");
        }
        if !seen.insert(fm.clone()) {
            return bad("an isomorphism is refuted twice");
        }
        let f = LinearMap::from_matrix(&a_sub, &b_sub, fm)?;
        match (&r.phi, &r.g) {
            (None, None) => {
                if is_strong_matching(t, &f)?.strong {
                    return bad("a map claimed not strong is a strong matching");
                }
            }
            (Some(p), Some(g)) => {
                let phi = LinearMap::from_matrix(&a_sub, &a_sub, parse_matrix(k, p)?)?;
                let g = LinearMap::from_matrix(&a_sub, &b_sub, parse_matrix(k, g)?)?;
                if !phi.is_isomorphism(k) || !g.is_isomorphism(k) {
                    return bad("φ or g is not invertible");
                }
                if !check_equivalence(t, &f, &phi, &g)? {
                    return bad("the stated φ does not relate f and g");
                }
                if !is_strong_matching(t, &g)?.strong {
                    return bad("the equivalent map g is not a strong matching");
                }
                if is_scalar_multiple(k, f.matrix(), g.matrix()).is_some() {
                    return bad("g is a scalar multiple of f");
                }
            }
            _ => return bad("φ and g must be given together"),
        }
    }
    if seen.len() != classes {
        return Err(Error::Invalid(format!(
            "{} isomorphism classes refuted out of {classes}",
            seen.len()
        )));
    }
    Ok(format!("all {classes} isomorphisms up to scalars are refuted"))
}
