use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// A base field `K` with exact arithmetic. Implementations are small context
/// objects; elements are plain values.
pub trait Field: Clone + Debug + PartialEq + Eq + Send + Sync {
    type Elem: Clone + Debug + PartialEq + Eq + Ord + Hash + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn parse_scalar(&self, s: &str) -> Result<Self::Elem>;
    fn format_scalar(&self, a: &Self::Elem) -> String;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;
    fn descriptor(&self) -> String;
    /// Every element, for finite fields.
    fn elements(&self) -> Option<Vec<Self::Elem>>;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn is_finite(&self) -> bool {
        self.characteristic() != 0
    }

    fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.characteristic())
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        let inv = self.inv(b).ok_or(Error::DivisionByZero)?;
        Ok(self.mul(a, &inv))
    }
}

/// `F_p` for a prime `p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !crate::group_scan::is_prime(p) || p >= (1 << 31) {
            return Err(Error::Invalid(format!("{p} is not a supported prime")));
        }
        Ok(Self { p: p as u32 })
    }

    pub fn p(&self) -> u32 {
        self.p
    }
}

impl Field for PrimeField {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }

    fn one(&self) -> u32 {
        1
    }

    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.p as u64) as u32
    }

    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.p as u64) as u32
    }

    fn inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let (mut base, mut exp, mut acc) = (*a as u64, self.p as u64 - 2, 1u64);
        let p = self.p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        Some(acc as u32)
    }

    fn from_i64(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    fn parse_scalar(&self, s: &str) -> Result<u32> {
        let s = s.trim();
        if let Some((num, den)) = s.split_once('/') {
            let num = self.parse_scalar(num)?;
            let den = self.parse_scalar(den)?;
            return self.div(&num, &den);
        }
        let n: i64 = s.parse().map_err(|_| Error::Parse(format!("bad scalar `{s}`")))?;
        Ok(self.from_i64(n))
    }

    fn format_scalar(&self, a: &u32) -> String {
        a.to_string()
    }

    fn characteristic(&self) -> u64 {
        self.p as u64
    }

    fn descriptor(&self) -> String {
        format!("fp({})", self.p)
    }

    fn elements(&self) -> Option<Vec<u32>> {
        Some((0..self.p).collect())
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }
}

/// The rationals with arbitrary-precision numerators and denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn parse_scalar(&self, s: &str) -> Result<BigRational> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad rational `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(BigRational::new(n, d))
            }
            None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
        }
    }

    fn format_scalar(&self, a: &BigRational) -> String {
        if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn descriptor(&self) -> String {
        "q".into()
    }

    fn elements(&self) -> Option<Vec<BigRational>> {
        None
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> BigRational {
        let n: i64 = rng.gen_range(-4..=4);
        let d: i64 = rng.gen_range(1..=3);
        BigRational::new(n.into(), d.into())
    }
}
