use super::matrix::{left_kernel, solve_left, Matrix};
use super::poly;
use super::scalar::{Field, PrimeField, Rationals};
use super::subspace::{Ambient, Subspace};
use crate::error::{Error, Result};

/// How `L` sits over the base field `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension<E> {
    /// `K[x]/(modulus)` with a monic irreducible modulus of degree `degree`.
    /// `reduction[k]` holds `x^(degree+k)` reduced, for `k < degree - 1`.
    Finite { modulus: Vec<E>, degree: usize, reduction: Vec<Vec<E>> },
    /// The rational function field `K(t)`; subspaces are spanned by polynomials.
    Transcendental,
}

/// A field extension `K ⊆ L` with exact arithmetic on coordinate vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower<F: Field> {
    base: F,
    ext: Extension<F::Elem>,
    var: String,
}

/// A numerator/denominator pair for a rational-function generator.
pub type Fraction<E> = (Vec<E>, Vec<E>);

impl<F: Field> Tower<F> {
    pub fn finite(base: F, modulus: Vec<F::Elem>) -> Result<Self> {
        let modulus = poly::monic(&base, &modulus);
        let degree = poly::degree(&base, &modulus).ok_or_else(|| Error::Invalid("zero modulus".into()))?;
        if degree == 0 {
            return Err(Error::Invalid("constant modulus".into()));
        }
        if degree > 1 && !poly::is_irreducible(&base, &modulus)? {
            return Err(Error::Reducible(poly::format(&base, &modulus, "x")));
        }
        let reduction = (degree..2 * degree - 1)
            .map(|e| {
                let mut mono = vec![base.zero(); e + 1];
                mono[e] = base.one();
                let (_, r) = poly::divrem(&base, &mono, &modulus).expect("nonzero modulus");
                let mut r = r;
                r.resize(degree, base.zero());
                r
            })
            .collect();
        Ok(Self { base, ext: Extension::Finite { modulus, degree, reduction }, var: "x".into() })
    }

    /// `L = K`, presented as the degree-one extension `K[x]/(x)`.
    pub fn trivial(base: F) -> Self {
        let modulus = vec![base.zero(), base.one()];
        Self::finite(base, modulus).expect("x is irreducible")
    }

    pub fn transcendental(base: F, var: &str) -> Self {
        Self { base, ext: Extension::Transcendental, var: var.into() }
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn extension(&self) -> &Extension<F::Elem> {
        &self.ext
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn degree(&self) -> Option<usize> {
        match &self.ext {
            Extension::Finite { degree, .. } => Some(*degree),
            Extension::Transcendental => None,
        }
    }

    pub fn is_finite_extension(&self) -> bool {
        self.degree().is_some()
    }

    /// Whether `L` itself is finite (finite extension of a prime field).
    pub fn is_finite_field(&self) -> bool {
        self.is_finite_extension() && self.base.is_finite()
    }

    pub fn descriptor(&self) -> String {
        let k = &self.base;
        match &self.ext {
            Extension::Finite { degree: 1, .. } => k.descriptor(),
            Extension::Finite { modulus, degree, .. } => {
                format!("gf({}^{degree}):{}", k.characteristic(), poly::format(k, modulus, &self.var))
            }
            Extension::Transcendental => format!("{}({})", k.descriptor(), self.var),
        }
    }

    pub fn ambient(&self) -> Ambient {
        match &self.ext {
            Extension::Finite { degree, .. } => Ambient::Field { degree: *degree },
            Extension::Transcendental => Ambient::Poly { max_deg: 0 },
        }
    }

    pub fn zero(&self) -> Vec<F::Elem> {
        match &self.ext {
            Extension::Finite { degree, .. } => vec![self.base.zero(); *degree],
            Extension::Transcendental => Vec::new(),
        }
    }

    pub fn one(&self) -> Vec<F::Elem> {
        let mut v = self.zero();
        if v.is_empty() {
            v.push(self.base.one());
        } else {
            v[0] = self.base.one();
        }
        v
    }

    pub fn is_zero(&self, v: &[F::Elem]) -> bool {
        v.iter().all(|c| self.base.is_zero(c))
    }

    /// Canonical form: length `d` for finite extensions, trimmed otherwise.
    pub fn normalize(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        match &self.ext {
            Extension::Finite { modulus, degree, .. } => {
                let (_, mut r) = poly::divrem(&self.base, v, modulus).expect("nonzero modulus");
                r.resize(*degree, self.base.zero());
                r
            }
            Extension::Transcendental => poly::trimmed(&self.base, v.to_vec()),
        }
    }

    pub fn add(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        self.normalize(&poly::add(&self.base, x, y))
    }

    pub fn scale(&self, c: &F::Elem, x: &[F::Elem]) -> Vec<F::Elem> {
        self.normalize(&poly::scale(&self.base, c, x))
    }

    pub fn mul(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        let k = &self.base;
        match &self.ext {
            Extension::Finite { degree, reduction, .. } => {
                let raw = poly::mul_raw(k, x, y);
                let mut out = vec![k.zero(); *degree];
                for (e, c) in raw.iter().enumerate() {
                    if k.is_zero(c) {
                        continue;
                    }
                    if e < *degree {
                        out[e] = k.add(&out[e], c);
                    } else {
                        for (o, r) in out.iter_mut().zip(&reduction[e - degree]) {
                            *o = k.add(o, &k.mul(c, r));
                        }
                    }
                }
                out
            }
            Extension::Transcendental => poly::mul(k, x, y),
        }
    }

    /// `x / y`. For `K(t)` the quotient must again be a polynomial; `None`
    /// when it is not.
    pub fn div(&self, x: &[F::Elem], y: &[F::Elem]) -> Result<Option<Vec<F::Elem>>> {
        if self.is_zero(y) {
            return Err(Error::DivisionByZero);
        }
        match &self.ext {
            Extension::Finite { degree, .. } => {
                let rows: Matrix<F::Elem> = (0..*degree)
                    .map(|i| {
                        let mut mono = vec![self.base.zero(); i + 1];
                        mono[i] = self.base.one();
                        self.mul(y, &mono)
                    })
                    .collect();
                let x = self.normalize(x);
                Ok(solve_left(&self.base, &rows, &x).map(|z| self.normalize(&z)))
            }
            Extension::Transcendental => {
                let (q, r) = poly::divrem(&self.base, x, y)?;
                Ok(r.is_empty().then_some(q))
            }
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<Vec<F::Elem>> {
        Ok(self.normalize(&poly::parse(&self.base, s, &self.var)?))
    }

    /// Accepts a polynomial or a quotient `num/den`; either side may be
    /// parenthesized. A `/` followed by a digit belongs to a rational coefficient.
    pub fn parse_fraction(&self, s: &str) -> Result<Fraction<F::Elem>> {
        let s = s.trim();
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => {
                    let next = s[i + 1..].trim_start().chars().next();
                    if next.is_some_and(|c| !c.is_ascii_digit()) {
                        split = Some(i);
                    }
                }
                _ => {}
            }
            if depth < 0 {
                return Err(Error::Parse(format!("unbalanced `{s}`")));
            }
        }
        if depth != 0 {
            return Err(Error::Parse(format!("unbalanced `{s}`")));
        }
        let strip = |x: &str| {
            let x = x.trim();
            match x.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                Some(inner) => inner.to_string(),
                None => x.to_string(),
            }
        };
        let Some(at) = split else {
            return Ok((self.parse_element(&strip(s))?, self.one()));
        };
        let num = self.parse_element(&strip(&s[..at]))?;
        let den = self.parse_element(&strip(&s[at + 1..]))?;
        if self.is_zero(&den) {
            return Err(Error::DivisionByZero);
        }
        match &self.ext {
            Extension::Transcendental => Ok((num, den)),
            Extension::Finite { .. } => {
                let q = self.div(&num, &den)?.expect("finite extension division");
                Ok((q, self.one()))
            }
        }
    }

    pub fn format_element(&self, v: &[F::Elem]) -> String {
        poly::format(&self.base, v, &self.var)
    }

    /// Parses a comma-separated list of elements.
    pub fn parse_list(&self, s: &str) -> Result<Vec<Vec<F::Elem>>> {
        s.split(',').filter(|t| !t.trim().is_empty()).map(|t| self.parse_element(t)).collect()
    }

    /// Parses a comma-separated list of generators, clearing denominators
    /// with their monic lcm `m`. Returns the polynomial generators of `m·V`
    /// together with `m`.
    pub fn parse_generators(&self, s: &str) -> Result<(Vec<Vec<F::Elem>>, Vec<F::Elem>)> {
        let fracs: Vec<Fraction<F::Elem>> =
            s.split(',').filter(|t| !t.trim().is_empty()).map(|t| self.parse_fraction(t)).collect::<Result<_>>()?;
        Ok(self.clear_denominators(&fracs))
    }

    pub fn clear_denominators(&self, fracs: &[Fraction<F::Elem>]) -> (Vec<Vec<F::Elem>>, Vec<F::Elem>) {
        let k = &self.base;
        let m = fracs.iter().fold(self.one(), |acc, (_, d)| poly::lcm(k, &acc, d));
        let gens = fracs
            .iter()
            .map(|(n, d)| {
                let (q, _) = poly::divrem(k, &m, d).expect("nonzero denominator");
                self.normalize(&poly::mul(k, n, &q))
            })
            .collect();
        (gens, m)
    }

    pub fn span(&self, vectors: &[Vec<F::Elem>]) -> Result<Subspace<F>> {
        Subspace::span(&self.base, self.ambient(), vectors)
    }

    /// `span{a·b}` over the canonical bases.
    pub fn product(&self, a: &Subspace<F>, b: &Subspace<F>) -> Result<Subspace<F>> {
        let vectors: Vec<_> =
            a.rows().iter().flat_map(|x| b.rows().iter().map(move |y| self.mul(x, y))).collect();
        self.span(&vectors)
    }

    /// `x·A`.
    pub fn scale_subspace(&self, x: &[F::Elem], a: &Subspace<F>) -> Result<Subspace<F>> {
        let vectors: Vec<_> = a.rows().iter().map(|r| self.mul(x, r)).collect();
        self.span(&vectors)
    }

    /// `{v ∈ B : x·v ∈ A}`, i.e. `x⁻¹A ∩ B`.
    pub fn preimage_in(&self, b: &Subspace<F>, x: &[F::Elem], a: &Subspace<F>) -> Result<Subspace<F>> {
        if self.is_zero(x) {
            return Err(Error::ZeroElement);
        }
        let k = &self.base;
        let residues: Vec<Vec<F::Elem>> =
            b.rows().iter().map(|v| a.reduce(k, &self.mul(x, v))).collect::<Result<_>>()?;
        let len = residues.iter().map(|r| r.len()).max().unwrap_or(0);
        let padded: Matrix<F::Elem> = residues
            .into_iter()
            .map(|mut r| {
                r.resize(len, k.zero());
                r
            })
            .collect();
        let kernel = left_kernel(k, &padded, len);
        let vectors: Vec<_> = kernel.iter().map(|c| b.combine(k, c)).collect();
        Subspace::span(k, b.ambient(), &vectors)
    }

    /// Degrees `e` with `1 < e < d` and `e | d`: the intermediate fields of a
    /// finite field extension of a prime field.
    pub fn intermediate_degrees(&self) -> Vec<usize> {
        match self.degree() {
            Some(d) if self.base.is_finite() => (2..d).filter(|e| d % e == 0).collect(),
            _ => Vec::new(),
        }
    }

    /// Every element of `L`, for finite fields.
    pub fn elements(&self) -> Option<Vec<Vec<F::Elem>>> {
        let d = self.degree()?;
        Subspace::full(&self.base, Ambient::Field { degree: d }).vectors(&self.base)
    }
}

/// A tower over either kind of base field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyTower {
    Prime(Tower<PrimeField>),
    Rational(Tower<Rationals>),
}

fn parse_prime(s: &str) -> Result<PrimeField> {
    let p: u64 = s.trim().parse().map_err(|_| Error::Parse(format!("bad prime `{s}`")))?;
    PrimeField::new(p)
}

/// Smallest monic irreducible polynomial of degree `d`, coefficient vectors
/// ordered from the constant term upward.
pub fn default_modulus(k: &PrimeField, d: usize) -> Result<Vec<u32>> {
    let p = k.p() as u64;
    let count = p.checked_pow(d as u32).ok_or_else(|| Error::Unsupported("modulus search too large".into()))?;
    for n in 0..count {
        let mut m = n;
        let mut coeffs: Vec<u32> = (0..d)
            .map(|_| {
                let c = (m % p) as u32;
                m /= p;
                c
            })
            .collect();
        coeffs.push(1);
        if poly::is_irreducible(k, &coeffs)? {
            return Ok(coeffs);
        }
    }
    Err(Error::Invalid(format!("no irreducible polynomial of degree {d}")))
}

impl AnyTower {
    /// Grammar: `gf(p^d):<modulus in x>`, `gf(p^d)`, `fp(p)`, `q`,
    /// `fp(p)(t)`, `q(t)`.
    pub fn parse(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad tower descriptor `{s}`"));
        if compact == "q" {
            return Ok(Self::Rational(Tower::trivial(Rationals)));
        }
        if let Some(rest) = compact.strip_prefix("q(") {
            let var = rest.strip_suffix(')').ok_or_else(bad)?;
            return Ok(Self::Rational(Tower::transcendental(Rationals, check_var(var)?)));
        }
        if let Some(rest) = compact.strip_prefix("fp(") {
            let (p, tail) = rest.split_once(')').ok_or_else(bad)?;
            let k = parse_prime(p)?;
            if tail.is_empty() {
                return Ok(Self::Prime(Tower::trivial(k)));
            }
            let var = tail.strip_prefix('(').and_then(|v| v.strip_suffix(')')).ok_or_else(bad)?;
            return Ok(Self::Prime(Tower::transcendental(k, check_var(var)?)));
        }
        if let Some(rest) = compact.strip_prefix("gf(") {
            let (spec, tail) = rest.split_once(')').ok_or_else(bad)?;
            let (p, d) = spec.split_once('^').unwrap_or((spec, "1"));
            let k = parse_prime(p)?;
            let d: usize = d.parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            let modulus = match tail.strip_prefix(':') {
                Some(m) => poly::parse(&k, m, "x")?,
                None if tail.is_empty() => default_modulus(&k, d)?,
                None => return Err(bad()),
            };
            if poly::degree(&k, &modulus) != Some(d) {
                return Err(Error::Invalid(format!("modulus must have degree {d}")));
            }
            return Ok(Self::Prime(Tower::finite(k, modulus)?));
        }
        Err(bad())
    }

    pub fn descriptor(&self) -> String {
        match self {
            Self::Prime(t) => t.descriptor(),
            Self::Rational(t) => t.descriptor(),
        }
    }
}

fn check_var(v: &str) -> Result<&str> {
    if !v.is_empty() && v.chars().all(|c| c.is_ascii_alphabetic()) {
        Ok(v)
    } else {
        Err(Error::Parse(format!("bad variable `{v}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf4() -> Tower<PrimeField> {
        match AnyTower::parse("gf(2^2):x^2+x+1").unwrap() {
            AnyTower::Prime(t) => t,
            _ => unreachable!(),
        }
    }

    #[test]
    fn descriptors_roundtrip() {
        for s in ["gf(2^4):x^4+x+1", "q", "fp(3)(t)", "q(t)", "fp(5)", "gf(3^2):x^2+1"] {
            assert_eq!(AnyTower::parse(s).unwrap().descriptor(), s);
        }
        assert_eq!(AnyTower::parse("gf(2^3)").unwrap().descriptor(), "gf(2^3):x^3+x+1");
        assert!(matches!(AnyTower::parse("gf(2^2):x^2+1"), Err(Error::Reducible(_))));
        assert!(AnyTower::parse("gf(2^3):x^2+x+1").is_err());
        assert!(AnyTower::parse("gf(4^2)").is_err());
        assert!(AnyTower::parse("z5").is_err());
    }

    #[test]
    fn spans_in_gf4_and_function_field() {
        let t = gf4();
        assert_eq!(t.span(&[t.one()]).unwrap().dim(), 1);
        let v = t.parse_list("1,x,1+x").unwrap();
        assert_eq!(t.span(&v).unwrap().dim(), 2);
        let AnyTower::Prime(f) = AnyTower::parse("fp(3)(t)").unwrap() else { unreachable!() };
        let s = f.span(&f.parse_list("t,t^2").unwrap()).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.ambient(), Ambient::Poly { max_deg: 2 });
    }

    #[test]
    fn products() {
        let t = gf4();
        let x = t.span(&t.parse_list("x").unwrap()).unwrap();
        let one = t.span(&[t.one()]).unwrap();
        assert_eq!(t.product(&x, &x).unwrap(), t.span(&t.parse_list("x+1").unwrap()).unwrap());
        assert_eq!(t.product(&one, &x).unwrap(), x);
        let AnyTower::Prime(f) = AnyTower::parse("fp(3)(t)").unwrap() else { unreachable!() };
        let a = f.span(&f.parse_list("1,t").unwrap()).unwrap();
        let b = f.span(&f.parse_list("t").unwrap()).unwrap();
        assert_eq!(f.product(&a, &b).unwrap(), f.span(&f.parse_list("t,t^2").unwrap()).unwrap());
    }

    #[test]
    fn preimages_in_gf4() {
        let t = gf4();
        let x = t.parse_element("x").unwrap();
        let lx = t.span(&[x.clone()]).unwrap();
        let one = t.span(&[t.one()]).unwrap();
        assert!(t.preimage_in(&lx, &x, &lx).unwrap().is_zero());
        assert!(t.preimage_in(&one, &x, &one).unwrap().is_zero());
        assert_eq!(t.preimage_in(&one, &x, &lx).unwrap(), one);
        assert!(matches!(t.preimage_in(&one, &t.zero(), &lx), Err(Error::ZeroElement)));
    }

    #[test]
    fn division() {
        let t = gf4();
        let x = t.parse_element("x").unwrap();
        let inv = t.div(&t.one(), &x).unwrap().unwrap();
        assert_eq!(t.mul(&x, &inv), t.one());
        let AnyTower::Prime(f) = AnyTower::parse("fp(2)(t)").unwrap() else { unreachable!() };
        let a = f.parse_element("t^2+t").unwrap();
        assert_eq!(f.div(&a, &f.parse_element("t").unwrap()).unwrap(), Some(f.parse_element("t+1").unwrap()));
        assert_eq!(f.div(&a, &f.parse_element("t^2+1").unwrap()).unwrap(), None);
        assert!(f.div(&a, &f.zero()).is_err());
    }

    #[test]
    fn clearing_denominators() {
        let AnyTower::Rational(f) = AnyTower::parse("q(t)").unwrap() else { unreachable!() };
        let (gens, m) = f.parse_generators("(1)/(t), (1)/(t+1)").unwrap();
        assert_eq!(f.format_element(&m), "t^2+t");
        let want = f.parse_list("t+1,t").unwrap();
        assert_eq!(gens, want);
    }

    #[test]
    fn intermediate_fields() {
        let AnyTower::Prime(t) = AnyTower::parse("gf(2^4)").unwrap() else { unreachable!() };
        assert_eq!(t.intermediate_degrees(), vec![2]);
        let AnyTower::Prime(t) = AnyTower::parse("gf(2^5)").unwrap() else { unreachable!() };
        assert!(t.intermediate_degrees().is_empty());
        assert_eq!(t.elements().unwrap().len(), 32);
    }
}
