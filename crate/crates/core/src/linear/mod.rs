//! Matched bases, matched subspaces, strong matchings and acyclic strong
//! matchings for subspaces of a field extension.

mod acyclic;
mod matched;
mod scan;
mod strong;

pub use acyclic::{
    check_equivalence, induced_candidate, is_acyclic_strong_matching, search_acyclic, verify_no_acyclic, AcyclicCheck,
    AcyclicSearch, EquivalenceWitness, Refutation,
};
pub use matched::{
    find_matched_basis, is_matched_basis, is_matched_subspace, is_matched_subspace_sampled, verify_unmatched,
    MatchedBasisCertificate, MatchedSubspace, RadoViolation,
};
pub use scan::{
    check_strong_criterion, AcyclicPairRecord, AcyclicScan, AcyclicScanConfig, AcyclicScanReport, AcyclicWitness,
    PairStatus, Prediction, PropertyPairRecord, PropertyScan, PropertyScanConfig, PropertyScanReport, PropertyWitness,
    StrongCriterionReport, SAMPLING_ATTEMPTS, THEOREM_STRONG, THEOREM_SUBFIELD, THEOREM_TRANSCENDENTAL,
};
pub use strong::{
    is_strong_matching, is_strong_matching_sampled, pointwise_products_avoid, strong_matching_exists, StrongCheck,
};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::matrix::{inverse, invertible_matrices, is_normalized, mat_mul, rank, vec_mul, Matrix};
use crate::field::{Field, Subspace, Tower};

/// An ordered basis of `parent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisSeq<F: Field> {
    elems: Vec<Vec<F::Elem>>,
    parent: Subspace<F>,
}

impl<F: Field> BasisSeq<F> {
    /// The basis `elems` of their own span.
    pub fn new(tower: &Tower<F>, elems: Vec<Vec<F::Elem>>) -> Result<Self> {
        if elems.iter().any(|e| tower.is_zero(e)) {
            return Err(Error::ZeroElement);
        }
        let elems: Vec<_> = elems.iter().map(|e| tower.normalize(e)).collect();
        let parent = tower.span(&elems)?;
        if parent.dim() != elems.len() {
            return Err(Error::Invalid("basis vectors are linearly dependent".into()));
        }
        Ok(Self { elems, parent })
    }

    /// `elems` as a basis of `parent`.
    pub fn of(tower: &Tower<F>, elems: Vec<Vec<F::Elem>>, parent: &Subspace<F>) -> Result<Self> {
        let seq = Self::new(tower, elems)?;
        if !seq.parent.same_as(tower.base(), parent)? {
            return Err(Error::Invalid("vectors do not form a basis of the given subspace".into()));
        }
        Ok(Self { elems: seq.elems, parent: parent.clone() })
    }

    /// The canonical echelon basis of `parent`.
    pub fn canonical(parent: &Subspace<F>) -> Self {
        Self { elems: parent.rows().clone(), parent: parent.clone() }
    }

    pub fn elems(&self) -> &[Vec<F::Elem>] {
        &self.elems
    }

    pub fn parent(&self) -> &Subspace<F> {
        &self.parent
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    /// Coordinates of each element w.r.t. the canonical basis of the parent.
    fn coordinate_matrix(&self, k: &F) -> Matrix<F::Elem> {
        self.elems
            .iter()
            .map(|e| self.parent.coordinates(k, e).expect("same ambient").expect("element of parent"))
            .collect()
    }
}

/// A linear map between subspaces; row `i` of `matrix` holds the coordinates
/// of the image of the `i`-th canonical basis vector of the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMap<F: Field> {
    domain: Subspace<F>,
    codomain: Subspace<F>,
    matrix: Matrix<F::Elem>,
}

impl<F: Field> LinearMap<F> {
    pub fn from_matrix(domain: &Subspace<F>, codomain: &Subspace<F>, matrix: Matrix<F::Elem>) -> Result<Self> {
        if matrix.len() != domain.dim() || matrix.iter().any(|r| r.len() != codomain.dim()) {
            return Err(Error::DimensionMismatch { expected: domain.dim(), found: matrix.len() });
        }
        Ok(Self { domain: domain.clone(), codomain: codomain.clone(), matrix })
    }

    /// The map sending `basis[i]` to `images[i]`.
    pub fn from_basis_images(
        tower: &Tower<F>,
        basis: &BasisSeq<F>,
        codomain: &Subspace<F>,
        images: &[Vec<F::Elem>],
    ) -> Result<Self> {
        let k = tower.base();
        if images.len() != basis.len() {
            return Err(Error::SizeMismatch { a: basis.len(), b: images.len() });
        }
        let image_coords: Matrix<F::Elem> = images
            .iter()
            .map(|v| {
                codomain
                    .coordinates(k, v)?
                    .ok_or_else(|| Error::Invalid(format!("{} is not in the codomain", tower.format_element(v))))
            })
            .collect::<Result<_>>()?;
        let c_inv = inverse(k, &basis.coordinate_matrix(k)).expect("basis is invertible");
        let matrix = mat_mul(k, &c_inv, &image_coords);
        Self::from_matrix(basis.parent(), codomain, matrix)
    }

    pub fn identity(k: &F, a: &Subspace<F>) -> Self {
        Self { domain: a.clone(), codomain: a.clone(), matrix: crate::field::matrix::identity(k, a.dim()) }
    }

    pub fn domain(&self) -> &Subspace<F> {
        &self.domain
    }

    pub fn codomain(&self) -> &Subspace<F> {
        &self.codomain
    }

    pub fn matrix(&self) -> &Matrix<F::Elem> {
        &self.matrix
    }

    pub fn apply(&self, k: &F, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        let c = self
            .domain
            .coordinates(k, v)?
            .ok_or_else(|| Error::Invalid("vector outside the domain".into()))?;
        Ok(self.codomain.combine(k, &vec_mul(k, &c, &self.matrix)))
    }

    pub fn apply_coords(&self, k: &F, c: &[F::Elem]) -> Vec<F::Elem> {
        self.codomain.combine(k, &vec_mul(k, c, &self.matrix))
    }

    pub fn is_isomorphism(&self, k: &F) -> bool {
        self.domain.dim() == self.codomain.dim() && rank(k, &self.matrix, self.codomain.dim()) == self.domain.dim()
    }

    /// The images of the basis elements.
    pub fn image_of_basis(&self, k: &F, basis: &BasisSeq<F>) -> Result<Vec<Vec<F::Elem>>> {
        basis.elems().iter().map(|e| self.apply(k, e)).collect()
    }
}

/// Every isomorphism `A -> B` whose matrix has leading entry one, i.e. one
/// per class of nonzero scalar multiples. Finite base fields only.
pub fn isomorphisms_up_to_scalar<F: Field>(k: &F, a: &Subspace<F>, b: &Subspace<F>) -> Result<Vec<LinearMap<F>>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let all = invertible_matrices(k, a.dim())
        .ok_or_else(|| Error::Unsupported("isomorphism enumeration needs a small finite base field".into()))?;
    all.into_iter()
        .filter(|m| is_normalized(k, m))
        .map(|m| LinearMap::from_matrix(a, b, m))
        .collect()
}

/// A uniformly random invertible `n x n` matrix (rejection sampling).
pub fn random_invertible<F: Field, R: Rng + ?Sized>(k: &F, n: usize, rng: &mut R) -> Matrix<F::Elem> {
    loop {
        let m: Matrix<F::Elem> = (0..n).map(|_| (0..n).map(|_| k.random(rng)).collect()).collect();
        if rank(k, &m, n) == n {
            return m;
        }
    }
}

pub(crate) fn format_list<F: Field>(tower: &Tower<F>, vs: &[Vec<F::Elem>]) -> Vec<String> {
    vs.iter().map(|v| tower.format_element(v)).collect()
}

pub(crate) fn format_matrix<F: Field>(k: &F, m: &[Vec<F::Elem>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|x| k.format_scalar(x)).collect()).collect()
}

pub(crate) fn parse_matrix<F: Field>(k: &F, m: &[Vec<String>]) -> Result<Matrix<F::Elem>> {
    m.iter().map(|r| r.iter().map(|x| k.parse_scalar(x)).collect()).collect()
}

pub(crate) fn parse_strings<F: Field>(tower: &Tower<F>, xs: &[String]) -> Result<Vec<Vec<F::Elem>>> {
    xs.iter().map(|x| tower.parse_element(x)).collect()
}

/// Checks `dim A = dim B >= 1`.
pub(crate) fn check_pair<F: Field>(a: &Subspace<F>, b: &Subspace<F>) -> Result<usize> {
    if a.dim() != b.dim() {
        return Err(Error::SizeMismatch { a: a.dim(), b: b.dim() });
    }
    if a.dim() == 0 {
        return Err(Error::EmptySet);
    }
    Ok(a.dim())
}

/// Runs `$body` with `$t` bound to the concrete tower behind a descriptor.
#[macro_export]
macro_rules! with_tower {
    ($any:expr, $t:ident => $body:expr) => {
        match $any {
            $crate::field::AnyTower::Prime($t) => $body,
            $crate::field::AnyTower::Rational($t) => $body,
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{AnyTower, PrimeField};

    fn gf16() -> Tower<PrimeField> {
        let AnyTower::Prime(t) = AnyTower::parse("gf(2^4):x^4+x+1").unwrap() else { unreachable!() };
        t
    }

    #[test]
    fn maps_from_basis_images() {
        let t = gf16();
        let k = t.base();
        let a = t.span(&t.parse_list("1,x").unwrap()).unwrap();
        let b = t.span(&t.parse_list("x^2,x^3").unwrap()).unwrap();
        let basis = BasisSeq::of(&t, t.parse_list("1+x,x").unwrap(), &a).unwrap();
        let images = t.parse_list("x^3,x^2+x^3").unwrap();
        let f = LinearMap::from_basis_images(&t, &basis, &b, &images).unwrap();
        assert!(f.is_isomorphism(k));
        assert_eq!(f.image_of_basis(k, &basis).unwrap(), images);
        assert!(LinearMap::from_basis_images(&t, &basis, &b, &t.parse_list("1,x^2").unwrap()).is_err());
    }

    #[test]
    fn basis_validation() {
        let t = gf16();
        assert!(matches!(BasisSeq::new(&t, vec![t.zero()]), Err(Error::ZeroElement)));
        assert!(BasisSeq::new(&t, t.parse_list("x,x").unwrap()).is_err());
        let a = t.span(&t.parse_list("1,x").unwrap()).unwrap();
        assert!(BasisSeq::of(&t, t.parse_list("1,x^2").unwrap(), &a).is_err());
    }

    #[test]
    fn isomorphism_classes() {
        let t = gf16();
        let a = t.span(&t.parse_list("1,x").unwrap()).unwrap();
        assert_eq!(isomorphisms_up_to_scalar(t.base(), &a, &a).unwrap().len(), 6);
        let AnyTower::Prime(t3) = AnyTower::parse("gf(3^2):x^2+1").unwrap() else { unreachable!() };
        let full = t3.span(&t3.parse_list("1,x").unwrap()).unwrap();
        assert_eq!(isomorphisms_up_to_scalar(t3.base(), &full, &full).unwrap().len(), 24);
    }
}
