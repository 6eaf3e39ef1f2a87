//! Row-major matrices over a [`Field`]: reduced row echelon form, kernels,
//! inverses and enumeration of invertible matrices.

use super::scalar::Field;

pub type Matrix<E> = Vec<Vec<E>>;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref<F: Field>(k: &F, mut rows: Matrix<F::Elem>, ncols: usize) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !k.is_zero(&rows[i][c])) else {
            continue;
        };
        rows.swap(r, p);
        let inv = k.inv(&rows[r][c]).expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = k.mul(x, &inv);
        }
        for i in 0..rows.len() {
            if i == r || k.is_zero(&rows[i][c]) {
                continue;
            }
            let factor = rows[i][c].clone();
            for j in 0..ncols {
                let t = k.mul(&factor, &rows[r][j]);
                rows[i][j] = k.sub(&rows[i][j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank<F: Field>(k: &F, rows: &[Vec<F::Elem>], ncols: usize) -> usize {
    rref(k, rows.to_vec(), ncols).1.len()
}

/// Basis of `{c : sum_i c_i rows_i = 0}`.
pub fn left_kernel<F: Field>(k: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Matrix<F::Elem> {
    let m = rows.len();
    let aug: Matrix<F::Elem> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..m).map(|j| if i == j { k.one() } else { k.zero() }));
            v
        })
        .collect();
    let (red, pivots) = rref(k, aug, ncols + m);
    red.into_iter()
        .zip(pivots)
        .filter(|(_, p)| *p >= ncols)
        .map(|(r, _)| r[ncols..].to_vec())
        .collect()
}

pub fn identity<F: Field>(k: &F, n: usize) -> Matrix<F::Elem> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
        .collect()
}

pub fn mat_mul<F: Field>(k: &F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Matrix<F::Elem> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .fold(k.zero(), |acc, (x, brow)| k.add(&acc, &k.mul(x, &brow[j])))
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mul<F: Field>(k: &F, v: &[F::Elem], m: &[Vec<F::Elem>]) -> Vec<F::Elem> {
    let cols = m.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| {
            v.iter()
                .zip(m)
                .fold(k.zero(), |acc, (x, row)| k.add(&acc, &k.mul(x, &row[j])))
        })
        .collect()
}

pub fn inverse<F: Field>(k: &F, m: &[Vec<F::Elem>]) -> Option<Matrix<F::Elem>> {
    let n = m.len();
    let aug: Matrix<F::Elem> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            v
        })
        .collect();
    let (red, pivots) = rref(k, aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `x * m = target` for the row vector `x`; `None` when inconsistent.
pub fn solve_left<F: Field>(k: &F, m: &[Vec<F::Elem>], target: &[F::Elem]) -> Option<Vec<F::Elem>> {
    let rows = m.len();
    let ncols = target.len();
    // x exists iff the left kernel of [m; -target] has a vector with a
    // nonzero last coordinate.
    let mut sys: Matrix<F::Elem> = m.to_vec();
    sys.push(target.iter().map(|t| k.neg(t)).collect());
    let ker = left_kernel(k, &sys, ncols);
    let v = ker.iter().find(|v| !k.is_zero(&v[rows]))?;
    let s = k.inv(&v[rows]).expect("nonzero");
    Some(v[..rows].iter().map(|x| k.mul(x, &s)).collect())
}

pub fn is_scalar_multiple<F: Field>(k: &F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Option<F::Elem> {
    let (ra, rb): (Vec<_>, Vec<_>) = (a.iter().flatten().collect(), b.iter().flatten().collect());
    if ra.len() != rb.len() {
        return None;
    }
    let pos = rb.iter().position(|x| !k.is_zero(x))?;
    let c = k.div(ra[pos], rb[pos]).ok()?;
    if k.is_zero(&c) {
        return None;
    }
    ra.iter()
        .zip(&rb)
        .all(|(x, y)| **x == k.mul(&c, y))
        .then_some(c)
}

/// Every invertible `n x n` matrix over a finite field, in lexicographic
/// order of their entries.
pub fn invertible_matrices<F: Field>(k: &F, n: usize) -> Option<Vec<Matrix<F::Elem>>> {
    let elems = k.elements()?;
    let q = elems.len();
    let total = (q as u64).checked_pow((n * n) as u32)?;
    if total > 50_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; n * n];
    loop {
        let m: Matrix<F::Elem> = (0..n)
            .map(|i| (0..n).map(|j| elems[idx[i * n + j]].clone()).collect())
            .collect();
        if rank(k, &m, n) == n {
            out.push(m);
        }
        let mut pos = n * n;
        loop {
            if pos == 0 {
                return Some(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < q {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Whether the first nonzero entry (row-major) equals one.
pub fn is_normalized<F: Field>(k: &F, m: &[Vec<F::Elem>]) -> bool {
    m.iter().flatten().find(|x| !k.is_zero(x)).is_some_and(|x| *x == k.one())
}
