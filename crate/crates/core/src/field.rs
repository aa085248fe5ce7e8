//! Exact coefficient fields: prime fields 𝔽_p and the rationals.
//!
//! A [`Scalar`] carries enough information to do arithmetic on its own (the
//! modulus travels with prime-field elements), so the usual operator traits
//! are available. Combining elements of different fields is a logic error and
//! panics; the ring layer rejects such inputs before they reach arithmetic.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default working prime.
pub const DEFAULT_PRIME: u32 = 32003;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Prime(u32),
    Rational,
}

impl Default for Field {
    fn default() -> Self {
        Field::Prime(DEFAULT_PRIME)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("prime {p} too large")));
        }
        Ok(Field::Prime(p))
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Prime(p) => *p,
            Field::Rational => 0,
        }
    }

    /// Rejects a field whose characteristic divides `n`.
    pub fn check_unit(&self, n: u64) -> Result<()> {
        match self {
            Field::Prime(p) if n.is_multiple_of(*p as u64) => Err(Error::InvalidField(format!(
                "characteristic {p} divides {n}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match *self {
            Field::Prime(p) => Scalar::Mod {
                v: n.rem_euclid(p as i64) as u32,
                p,
            },
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match *self {
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Mod {
                    v: r.to_u32().expect("reduced residue fits"),
                    p,
                }
            }
            Field::Rational => Scalar::Rat(BigRational::from_integer(n.clone())),
        }
    }

    /// Uniform element for prime fields; a small random integer for ℚ.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Scalar {
        match *self {
            Field::Prime(p) => Scalar::Mod {
                v: rng.gen_range(0..p),
                p,
            },
            Field::Rational => self.from_i64(rng.gen_range(-9..=9)),
        }
    }

    /// Parses a decimal integer or fraction `a/b`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Invalid(format!("bad coefficient `{s}`"));
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let num = BigInt::from_str(num).map_err(|_| bad())?;
        let den = BigInt::from_str(den).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        let n = self.from_bigint(&num);
        let d = self.from_bigint(&den);
        d.inv().map(|di| n * di).ok_or_else(bad)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime(p) => write!(f, "fp:{p}"),
            Field::Rational => write!(f, "q"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "q" || s == "Q" || s == "rational" {
            return Ok(Field::Rational);
        }
        let p = s
            .strip_prefix("fp:")
            .ok_or_else(|| Error::InvalidField(format!("expected `q` or `fp:P`, got `{s}`")))?;
        let p: u32 = p
            .parse()
            .map_err(|_| Error::InvalidField(format!("bad prime `{p}`")))?;
        Field::prime(p)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { v: u32, p: u32 },
    Rat(BigRational),
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Mod { p, .. } => Field::Prime(*p),
            Scalar::Rat(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { v, .. } => *v == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { v, .. } => *v == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Mod { v, p } => Scalar::Mod {
                v: mod_pow(*v as u64, *p as u64 - 2, *p as u64) as u32,
                p: *p,
            },
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
        })
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Sign used for printing: prime-field values are shown in the symmetric
    /// range `(-p/2, p/2]`.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Mod { v, p } => *v > p / 2,
            Scalar::Rat(r) => r.is_negative(),
        }
    }

    /// Signed integer representative, if it is one.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Mod { v, p } => Some(if *v > p / 2 {
                *v as i64 - *p as i64
            } else {
                *v as i64
            }),
            Scalar::Rat(r) if r.is_integer() => r.to_integer().to_i64(),
            Scalar::Rat(_) => None,
        }
    }

    fn check(&self, other: &Scalar) {
        if self.field() != other.field() {
            panic!("mixed-field arithmetic: {} vs {}", self.field(), other.field());
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { v, p } => {
                if *v > p / 2 {
                    write!(f, "-{}", p - v)
                } else {
                    write!(f, "{v}")
                }
            }
            Scalar::Rat(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Mod { v, p }, Scalar::Mod { v: w, .. }) => Scalar::Mod {
                v: ((*v as u64 + *w as u64) % *p as u64) as u32,
                p: *p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Mod { v, p }, Scalar::Mod { v: w, .. }) => Scalar::Mod {
                v: ((*v as u64 + *p as u64 - *w as u64) % *p as u64) as u32,
                p: *p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a - b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check(rhs);
        match (self, rhs) {
            (Scalar::Mod { v, p }, Scalar::Mod { v: w, .. }) => Scalar::Mod {
                v: ((*v as u64 * *w as u64) % *p as u64) as u32,
                p: *p,
            },
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => unreachable!(),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { v, p } => Scalar::Mod {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::prime(7).unwrap();
        let a = f.from_i64(3);
        let b = f.from_i64(5);
        assert_eq!(&a + &b, f.from_i64(1));
        assert_eq!(&a * &b, f.from_i64(1));
        assert_eq!(a.inv().unwrap(), f.from_i64(5));
        assert_eq!(-&a, f.from_i64(4));
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn rejects_composite_modulus() {
        assert!(Field::prime(32004).is_err());
        assert!("fp:15".parse::<Field>().is_err());
        assert_eq!("fp:32003".parse::<Field>().unwrap(), Field::Prime(32003));
        assert_eq!("q".parse::<Field>().unwrap(), Field::Rational);
    }

    #[test]
    fn parse_fractions() {
        let q = Field::Rational;
        let s = q.parse_scalar("-3/6").unwrap();
        assert_eq!(s.to_string(), "-1/2");
        let f = Field::prime(7).unwrap();
        assert_eq!(f.parse_scalar("1/2").unwrap(), f.from_i64(4));
        assert_eq!(f.from_i64(-1).to_string(), "-1");
    }

    #[test]
    fn characteristic_check() {
        let f = Field::prime(3).unwrap();
        assert!(f.check_unit(3).is_err());
        assert!(f.check_unit(2).is_ok());
        assert!(Field::Rational.check_unit(3).is_ok());
    }
}
