//! Finitely generated abelian groups `Z/n1 x ... x Z/nk x Z^r` and validated
//! subset pairs `(A, B)`.
//!
//! Elements are integer coordinate vectors. Torsion coordinates are always
//! reduced into `[0, n_i)`, so equal elements have identical coordinates and
//! the derived lexicographic order is the canonical element order.

mod table;

pub use table::FiniteTable;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z/n1 x ... x Z/nk x Z^free_rank`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    torsion_factors: Vec<u64>,
    free_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub(crate) Vec<i64>);

impl GroupElement {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl AbelianGroup {
    pub fn new(torsion_factors: Vec<u64>, free_rank: usize) -> Result<Self> {
        if torsion_factors.is_empty() && free_rank == 0 {
            return Err(Error::Invalid("trivial group has no admissible pairs".into()));
        }
        if let Some(&n) = torsion_factors.iter().find(|&&n| n < 2) {
            return Err(Error::Invalid(format!("torsion factor {n} must be at least 2")));
        }
        if torsion_factors.iter().any(|&n| n > i64::MAX as u64 / 2) {
            return Err(Error::Invalid("torsion factor too large".into()));
        }
        Ok(Self { torsion_factors, free_rank })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::new(vec![n], 0)
    }

    pub fn free(rank: usize) -> Result<Self> {
        Self::new(Vec::new(), rank)
    }

    /// Parses `z<n>`, `z<n1>xz<n2>...` and `free<k>`; whitespace is ignored.
    pub fn parse(desc: &str) -> Result<Self> {
        let compact: String = desc.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty group descriptor".into()));
        }
        let mut torsion = Vec::new();
        let mut free_rank = 0usize;
        for factor in compact.to_ascii_lowercase().split('x') {
            if let Some(k) = factor.strip_prefix("free") {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad free rank in `{factor}`")))?;
                free_rank += k;
            } else if let Some(n) = factor.strip_prefix('z') {
                if free_rank > 0 {
                    return Err(Error::Parse("torsion factors must precede free factors".into()));
                }
                let n: u64 = n
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad modulus in `{factor}`")))?;
                torsion.push(n);
            } else {
                return Err(Error::Parse(format!("unknown group factor `{factor}`")));
            }
        }
        Self::new(torsion, free_rank)
    }

    pub fn descriptor(&self) -> String {
        let mut parts: Vec<String> = self.torsion_factors.iter().map(|n| format!("z{n}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("free{}", self.free_rank));
        }
        parts.join("x")
    }

    pub fn torsion_factors(&self) -> &[u64] {
        &self.torsion_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Number of coordinates of an element.
    pub fn rank(&self) -> usize {
        self.torsion_factors.len() + self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.torsion_factors.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n))
    }

    /// The modulus when the group is a single cyclic factor `Z/n`.
    pub fn cyclic_order(&self) -> Option<u64> {
        match (self.torsion_factors.as_slice(), self.free_rank) {
            ([n], 0) => Some(*n),
            _ => None,
        }
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    /// Reduces torsion coordinates into `[0, n_i)`.
    pub fn normalize(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: coords.len() });
        }
        let mut out = coords.to_vec();
        for (c, &n) in out.iter_mut().zip(&self.torsion_factors) {
            *c = c.rem_euclid(n as i64);
        }
        Ok(GroupElement(out))
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        self.normalize(coords)
    }

    fn check(&self, x: &GroupElement) -> Result<()> {
        if x.0.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: x.0.len() });
        }
        Ok(())
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        self.check(y)?;
        let sum: Vec<i64> = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
        self.normalize(&sum)
    }

    pub fn neg(&self, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        let v: Vec<i64> = x.0.iter().map(|a| -a).collect();
        self.normalize(&v)
    }

    pub fn scale(&self, c: i64, x: &GroupElement) -> Result<GroupElement> {
        self.check(x)?;
        let v: Vec<i64> = x
            .0
            .iter()
            .zip(self.moduli())
            .map(|(a, n)| match n {
                Some(n) => ((*a as i128 * c as i128).rem_euclid(n as i128)) as i64,
                None => a * c,
            })
            .collect();
        self.normalize(&v)
    }

    fn moduli(&self) -> impl Iterator<Item = Option<u64>> + '_ {
        self.torsion_factors
            .iter()
            .map(|&n| Some(n))
            .chain(std::iter::repeat(None).take(self.free_rank))
    }

    /// Parses one element: a comma-separated integer tuple, optionally in parentheses.
    pub fn parse_element(&self, s: &str) -> Result<GroupElement> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords = body
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad coordinate `{}` in `{s}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.normalize(&coords)
    }

    /// Parses a set of elements. For single-coordinate groups the set is a
    /// comma-separated list of integers; otherwise elements are separated by
    /// `;` and each is a comma-separated tuple.
    pub fn parse_set(&self, s: &str) -> Result<Vec<GroupElement>> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Vec::new());
        }
        if self.rank() == 1 {
            s.split(',').map(|t| self.parse_element(t)).collect()
        } else {
            s.split(';').map(|t| self.parse_element(t)).collect()
        }
    }

    pub fn format_set(&self, set: &[GroupElement]) -> String {
        let sep = if self.rank() == 1 { "," } else { ";" };
        set.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(sep)
    }

    /// All elements in lexicographic order; `None` for infinite groups.
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        let order = self.order()?;
        let mut out = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; self.rank()];
        loop {
            out.push(GroupElement(cur.clone()));
            let mut i = self.rank();
            loop {
                if i == 0 {
                    return Some(out);
                }
                i -= 1;
                cur[i] += 1;
                if (cur[i] as u64) < self.torsion_factors[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }
}

/// A validated pair `(A, B)` with `|A| = |B| >= 1`, both sorted canonically.
/// Whether `0 ∈ B` is recorded rather than rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsetPair {
    a: Vec<GroupElement>,
    b: Vec<GroupElement>,
    zero_in_b: bool,
}

impl SubsetPair {
    pub fn a(&self) -> &[GroupElement] {
        &self.a
    }

    pub fn b(&self) -> &[GroupElement] {
        &self.b
    }

    pub fn zero_in_b(&self) -> bool {
        self.zero_in_b
    }

    pub fn size(&self) -> usize {
        self.a.len()
    }

    /// Builds a pair from elements already known to be normalized, sorted and distinct.
    pub(crate) fn from_sorted_unchecked(a: Vec<GroupElement>, b: Vec<GroupElement>) -> Self {
        let zero_in_b = b.iter().any(|e| e.0.iter().all(|&c| c == 0));
        Self { a, b, zero_in_b }
    }
}

fn canonical_set(g: &AbelianGroup, set: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let mut out = set
        .iter()
        .map(|e| g.normalize(&e.0))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    if let Some(w) = out.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateElement(w[0].to_string()));
    }
    Ok(out)
}

/// Validates and canonicalizes `(A, B)`.
pub fn validate_pair(g: &AbelianGroup, a: &[GroupElement], b: &[GroupElement]) -> Result<SubsetPair> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { a: a.len(), b: b.len() });
    }
    let a = canonical_set(g, a)?;
    let b = canonical_set(g, b)?;
    let zero = g.zero();
    let zero_in_b = b.binary_search(&zero).is_ok();
    Ok(SubsetPair { a, b, zero_in_b })
}
