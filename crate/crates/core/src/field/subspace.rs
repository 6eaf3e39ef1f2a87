use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::matrix::{left_kernel, rref, Matrix};
use super::scalar::Field;
use crate::error::{Error, Result};

/// Coordinate space a subspace lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ambient {
    /// Power basis `1, x, ..., x^(d-1)` of a degree-`d` extension.
    Field { degree: usize },
    /// Monomials `1, t, ..., t^max_deg`; the bound is kept tight.
    Poly { max_deg: usize },
    /// Plain `K^len`, used for dual spaces and coordinates.
    Coords { len: usize },
}

impl Ambient {
    pub fn len(&self) -> usize {
        match *self {
            Ambient::Field { degree } => degree,
            Ambient::Poly { max_deg } => max_deg + 1,
            Ambient::Coords { len } => len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn is_poly(&self) -> bool {
        matches!(self, Ambient::Poly { .. })
    }
}

/// A subspace stored as its reduced row echelon basis. Two subspaces of the
/// same ambient are equal iff their representations are identical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace<F: Field> {
    ambient: Ambient,
    rows: Matrix<F::Elem>,
    pivots: Vec<usize>,
}

fn pad<F: Field>(k: &F, v: &[F::Elem], len: usize) -> Vec<F::Elem> {
    let mut out = v.to_vec();
    out.resize(len.max(v.len()), k.zero());
    out
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: Ambient) -> Self {
        let ambient = if ambient.is_poly() { Ambient::Poly { max_deg: 0 } } else { ambient };
        Self { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Canonical basis of the span of `vectors`.
    pub fn span(k: &F, ambient: Ambient, vectors: &[Vec<F::Elem>]) -> Result<Self> {
        let len = if ambient.is_poly() {
            vectors.iter().map(|v| v.len()).max().unwrap_or(0).max(ambient.len())
        } else {
            if let Some(v) = vectors.iter().find(|v| v.len() != ambient.len()) {
                return Err(Error::AmbientMismatch(format!(
                    "vector of length {} in an ambient of dimension {}",
                    v.len(),
                    ambient.len()
                )));
            }
            ambient.len()
        };
        let rows: Matrix<F::Elem> = vectors.iter().map(|v| pad(k, v, len)).collect();
        let (mut rows, pivots) = rref(k, rows, len);
        let ambient = if ambient.is_poly() {
            let max_deg = rows
                .iter()
                .filter_map(|r| r.iter().rposition(|c| !k.is_zero(c)))
                .max()
                .unwrap_or(0);
            for r in rows.iter_mut() {
                r.truncate(max_deg + 1);
            }
            Ambient::Poly { max_deg }
        } else {
            ambient
        };
        Ok(Self { ambient, rows, pivots })
    }

    pub fn full(k: &F, ambient: Ambient) -> Self {
        let rows = super::matrix::identity(k, ambient.len());
        Self::span(k, ambient, &rows).expect("identity rows fit")
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &Matrix<F::Elem> {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn len(&self) -> usize {
        self.ambient.len()
    }

    /// Common vector length for a binary operation.
    fn common_len(&self, other: &Self) -> Result<usize> {
        match (self.ambient, other.ambient) {
            (Ambient::Poly { .. }, Ambient::Poly { .. }) => Ok(self.len().max(other.len())),
            (a, b) if a == b => Ok(a.len()),
            (a, b) => Err(Error::AmbientMismatch(format!("{a:?} vs {b:?}"))),
        }
    }

    fn check_vector(&self, v: &[F::Elem]) -> Result<()> {
        if !self.ambient.is_poly() && v.len() != self.len() {
            return Err(Error::AmbientMismatch(format!(
                "vector of length {} in an ambient of dimension {}",
                v.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// Remainder of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, k: &F, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.check_vector(v)?;
        let mut out = pad(k, v, self.len());
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if k.is_zero(&out[p]) {
                continue;
            }
            let c = out[p].clone();
            for (o, r) in out.iter_mut().zip(row) {
                *o = k.sub(o, &k.mul(&c, r));
            }
        }
        Ok(out)
    }

    pub fn contains(&self, k: &F, v: &[F::Elem]) -> Result<bool> {
        Ok(self.reduce(k, v)?.iter().all(|c| k.is_zero(c)))
    }

    /// Coefficients of `v` with respect to the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, k: &F, v: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
        if !self.contains(k, v)? {
            return Ok(None);
        }
        let v = pad(k, v, self.len());
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    /// `sum_i coeffs_i * row_i`.
    pub fn combine(&self, k: &F, coeffs: &[F::Elem]) -> Vec<F::Elem> {
        let mut out = vec![k.zero(); self.len()];
        for (c, row) in coeffs.iter().zip(&self.rows) {
            if k.is_zero(c) {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o = k.add(o, &k.mul(c, r));
            }
        }
        out
    }

    pub fn sum(&self, k: &F, other: &Self) -> Result<Self> {
        let len = self.common_len(other)?;
        let vecs: Vec<_> = self.rows.iter().chain(&other.rows).map(|r| pad(k, r, len)).collect();
        Self::span(k, self.ambient_with_len(len), &vecs)
    }

    fn ambient_with_len(&self, len: usize) -> Ambient {
        match self.ambient {
            Ambient::Poly { .. } => Ambient::Poly { max_deg: len.saturating_sub(1) },
            a => a,
        }
    }

    /// Zassenhaus: rows `[u | u]` and `[v | 0]`; rows with zero left half
    /// give the intersection.
    pub fn intersect(&self, k: &F, other: &Self) -> Result<Self> {
        let len = self.common_len(other)?;
        let mut block: Matrix<F::Elem> = Vec::new();
        for u in &self.rows {
            let u = pad(k, u, len);
            let mut r = u.clone();
            r.extend(u);
            block.push(r);
        }
        for v in &other.rows {
            let mut r = pad(k, v, len);
            r.extend(std::iter::repeat(k.zero()).take(len));
            block.push(r);
        }
        let (red, pivots) = rref(k, block, 2 * len);
        let inter: Vec<_> = red
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| *p >= len)
            .map(|(r, _)| r[len..].to_vec())
            .collect();
        Self::span(k, self.ambient_with_len(len), &inter)
    }

    pub fn is_subspace_of(&self, k: &F, other: &Self) -> Result<bool> {
        self.common_len(other)?;
        for r in &self.rows {
            if !other.contains(k, r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, k: &F, other: &Self) -> Result<bool> {
        Ok(self.dim() == other.dim() && self.is_subspace_of(k, other)?)
    }

    /// Rows padded to `len` (polynomial ambients only grow).
    pub fn rows_padded(&self, k: &F, len: usize) -> Matrix<F::Elem> {
        self.rows.iter().map(|r| pad(k, r, len)).collect()
    }

    /// Every vector of the subspace, for finite base fields.
    pub fn vectors(&self, k: &F) -> Option<Vec<Vec<F::Elem>>> {
        let elems = k.elements()?;
        let n = self.dim();
        Some(
            (0..n)
                .map(|_| elems.iter().cloned())
                .multi_cartesian_product()
                .map(|c| self.combine(k, &c))
                .chain(if n == 0 { Some(vec![k.zero(); self.len()]) } else { None })
                .collect(),
        )
    }

    /// One representative per line: coordinate vectors whose first nonzero
    /// entry is one, mapped into the ambient.
    pub fn projective_points(&self, k: &F) -> Option<Vec<Vec<F::Elem>>> {
        let elems = k.elements()?;
        let n = self.dim();
        let mut out = Vec::new();
        for lead in 0..n {
            let free = n - lead - 1;
            for tail in (0..free).map(|_| elems.iter().cloned()).multi_cartesian_product() {
                let mut c = vec![k.zero(); lead];
                c.push(k.one());
                c.extend(tail);
                out.push(self.combine(k, &c));
            }
            if free == 0 && out.is_empty() && n == 0 {
                break;
            }
        }
        Some(out)
    }

    /// Every basis up to reordering and scaling of its vectors.
    pub fn bases_up_to_scaling(&self, k: &F) -> Option<Vec<Vec<Vec<F::Elem>>>> {
        let points = self.projective_points(k)?;
        let n = self.dim();
        let len = self.len();
        Some(
            points
                .into_iter()
                .combinations(n)
                .filter(|c| super::matrix::rank(k, c, len) == n)
                .collect(),
        )
    }

    /// All subspaces of `ambient` of dimension `dim`, sorted by basis rows.
    pub fn enumerate(k: &F, ambient: Ambient, dim: usize) -> Option<Vec<Self>> {
        let elems = k.elements()?;
        let len = ambient.len();
        if dim > len {
            return Some(Vec::new());
        }
        let mut out = Vec::new();
        for pivots in (0..len).combinations(dim) {
            // free positions: (row, col) with col > pivot_row and col not a pivot
            let free: Vec<(usize, usize)> = (0..dim)
                .flat_map(|i| {
                    let pivots = &pivots;
                    (pivots[i] + 1..len).filter(move |c| !pivots.contains(c)).map(move |c| (i, c))
                })
                .collect();
            for vals in (0..free.len()).map(|_| elems.iter().cloned()).multi_cartesian_product() {
                let mut rows = vec![vec![k.zero(); len]; dim];
                for (i, &p) in pivots.iter().enumerate() {
                    rows[i][p] = k.one();
                }
                for ((i, c), v) in free.iter().zip(vals) {
                    rows[*i][*c] = v;
                }
                out.push(Self { ambient, rows, pivots: pivots.clone() });
            }
            if free.is_empty() && dim == 0 {
                break;
            }
        }
        out.sort_by(|a, b| a.rows.cmp(&b.rows));
        Some(out)
    }
}

/// Functionals on `within` (in coordinates w.r.t. its canonical basis) that
/// vanish on `v ∩ within`. Dimension is `dim within - dim(v ∩ within)`.
pub fn annihilator<F: Field>(k: &F, v: &Subspace<F>, within: &Subspace<F>) -> Result<Subspace<F>> {
    let cap = v.intersect(k, within)?;
    let n = within.dim();
    let coords: Matrix<F::Elem> = cap
        .rows()
        .iter()
        .map(|r| within.coordinates(k, r).map(|c| c.expect("intersection lies in `within`")))
        .collect::<Result<_>>()?;
    // phi with phi . c = 0 for each coordinate row c: the left kernel of the
    // transpose of `coords`.
    let transposed: Matrix<F::Elem> = (0..n).map(|i| coords.iter().map(|c| c[i].clone()).collect()).collect();
    let functionals = left_kernel(k, &transposed, coords.len());
    Subspace::span(k, Ambient::Coords { len: n }, &functionals)
}
