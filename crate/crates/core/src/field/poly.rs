//! Dense univariate polynomials over a [`Field`], coefficients in ascending
//! degree order. The zero polynomial is the empty vector.

use super::scalar::Field;
use crate::error::{Error, Result};

pub fn trim<F: Field>(k: &F, p: &mut Vec<F::Elem>) {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
}

pub fn trimmed<F: Field>(k: &F, mut p: Vec<F::Elem>) -> Vec<F::Elem> {
    trim(k, &mut p);
    p
}

pub fn degree<F: Field>(k: &F, p: &[F::Elem]) -> Option<usize> {
    p.iter().rposition(|c| !k.is_zero(c))
}

pub fn add<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let n = a.len().max(b.len());
    let z = k.zero();
    let out = (0..n)
        .map(|i| k.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    trimmed(k, out)
}

pub fn scale<F: Field>(k: &F, c: &F::Elem, a: &[F::Elem]) -> Vec<F::Elem> {
    trimmed(k, a.iter().map(|x| k.mul(c, x)).collect())
}

/// Untrimmed product of length `a.len() + b.len() - 1`.
pub fn mul_raw<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

pub fn mul<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    trimmed(k, mul_raw(k, a, b))
}

/// Euclidean division `a = q b + r` with `deg r < deg b`.
pub fn divrem<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Result<(Vec<F::Elem>, Vec<F::Elem>)> {
    let b = trimmed(k, b.to_vec());
    let db = degree(k, &b).ok_or(Error::DivisionByZero)?;
    let lead_inv = k.inv(&b[db]).expect("nonzero leading coefficient");
    let mut r = trimmed(k, a.to_vec());
    if r.len() <= db {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![k.zero(); r.len() - db];
    while let Some(dr) = degree(k, &r) {
        if dr < db {
            break;
        }
        let c = k.mul(&r[dr], &lead_inv);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = k.sub(&r[i + shift], &k.mul(&c, bc));
        }
        q[shift] = c;
        trim(k, &mut r);
    }
    Ok((trimmed(k, q), r))
}

pub fn monic<F: Field>(k: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    match degree(k, a) {
        None => Vec::new(),
        Some(d) => {
            let inv = k.inv(&a[d]).expect("nonzero");
            scale(k, &inv, a)
        }
    }
}

pub fn gcd<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let (mut x, mut y) = (trimmed(k, a.to_vec()), trimmed(k, b.to_vec()));
    while !y.is_empty() {
        let (_, r) = divrem(k, &x, &y).expect("nonzero divisor");
        x = y;
        y = r;
    }
    monic(k, &x)
}

pub fn lcm<F: Field>(k: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let g = gcd(k, a, b);
    let (q, _) = divrem(k, &mul(k, a, b), &g).expect("gcd of nonzero polynomials");
    monic(k, &q)
}

/// Highest degree handled by the exhaustive irreducibility check.
pub const MAX_IRREDUCIBILITY_DEGREE: usize = 8;

/// Exhaustive search for a monic factor of degree `1..=deg/2`. Only for
/// finite base fields and degrees up to [`MAX_IRREDUCIBILITY_DEGREE`].
pub fn is_irreducible<F: Field>(k: &F, p: &[F::Elem]) -> Result<bool> {
    let d = degree(k, p).ok_or_else(|| Error::Invalid("zero modulus".into()))?;
    if d == 0 {
        return Ok(false);
    }
    if d == 1 {
        return Ok(true);
    }
    if d > MAX_IRREDUCIBILITY_DEGREE {
        return Err(Error::Unsupported(format!(
            "irreducibility check limited to degree {MAX_IRREDUCIBILITY_DEGREE}"
        )));
    }
    let elems = k
        .elements()
        .ok_or_else(|| Error::Unsupported("irreducibility over an infinite base field".into()))?;
    for fd in 1..=d / 2 {
        // enumerate monic polynomials of degree fd
        let mut idx = vec![0usize; fd];
        loop {
            let mut cand: Vec<F::Elem> = idx.iter().map(|&i| elems[i].clone()).collect();
            cand.push(k.one());
            let (_, r) = divrem(k, p, &cand)?;
            if r.is_empty() {
                return Ok(false);
            }
            let mut pos = 0;
            loop {
                if pos == fd {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < elems.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == fd {
                break;
            }
        }
    }
    Ok(true)
}

/// Formats in descending degree, e.g. `x^4+x+1`.
pub fn format<F: Field>(k: &F, p: &[F::Elem], var: &str) -> String {
    let Some(d) = degree(k, p) else {
        return "0".into();
    };
    let mut out = String::new();
    for e in (0..=d).rev() {
        let c = &p[e];
        if k.is_zero(c) {
            continue;
        }
        let mut coef = k.format_scalar(c);
        let negative = coef.starts_with('-');
        if negative {
            coef.remove(0);
        }
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push(if negative { '-' } else { '+' });
        }
        let mono = match e {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{e}"),
        };
        if e == 0 {
            out.push_str(&coef);
        } else if coef == "1" {
            out.push_str(&mono);
        } else if coef.contains('/') {
            out.push_str(&format!("{coef}*{mono}"));
        } else {
            out.push_str(&format!("{coef}{mono}"));
        }
    }
    out
}

/// Parses sparse text such as `x^4+x+1`, `2t^2-t`, `1/2*t+3`.
pub fn parse<F: Field>(k: &F, s: &str, var: &str) -> Result<Vec<F::Elem>> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut negative = false;
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && !(i > 0 && compact[..i].ends_with('^')) {
            if !cur.is_empty() {
                terms.push((negative, std::mem::take(&mut cur)));
            } else if i > 0 {
                return Err(Error::Parse(format!("dangling sign in `{s}`")));
            }
            negative = ch == '-';
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("dangling sign in `{s}`")));
    }
    terms.push((negative, cur));

    let mut out: Vec<F::Elem> = Vec::new();
    for (neg, term) in terms {
        let (coef_str, mono) = match term.find(var) {
            Some(pos) => (term[..pos].trim_end_matches('*'), Some(&term[pos + var.len()..])),
            None => (term.as_str(), None),
        };
        let mut coef = if coef_str.is_empty() { k.one() } else { k.parse_scalar(coef_str)? };
        if neg {
            coef = k.neg(&coef);
        }
        let exp = match mono {
            None => 0usize,
            Some("") => 1,
            Some(rest) => rest
                .strip_prefix('^')
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad monomial `{term}`")))?,
        };
        if exp > 4096 {
            return Err(Error::Parse(format!("exponent too large in `{term}`")));
        }
        if out.len() <= exp {
            out.resize(exp + 1, k.zero());
        }
        out[exp] = k.add(&out[exp], &coef);
    }
    Ok(trimmed(k, out))
}
