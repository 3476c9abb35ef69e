//! Exact scalars over prime fields GF(p) and the rationals.
//!
//! A [`Scalar`] always carries its canonical representative: an integer in
//! `[0, p)` for prime fields, a reduced fraction with positive denominator for
//! the rationals. Equality is therefore structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported characteristic. Keeps products of two residues inside `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),
    #[error("malformed scalar {0:?}")]
    Malformed(String),
    #[error("fractions are not accepted over {0}: {1:?}")]
    FractionInPrimeField(Field, String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not enumerable")]
    NotEnumerable(Field),
    #[error("scalar belongs to {found}, expected {expected}")]
    FieldMismatch { expected: Field, found: Field },
}

/// Coefficient domain. JSON form: `{"kind":"prime","p":5}` or `{"kind":"rational"}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "FieldRepr")]
pub enum Field {
    Prime { p: u64 },
    Rational,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FieldRepr {
    Prime { p: u64 },
    Rational,
}

impl TryFrom<FieldRepr> for Field {
    type Error = FieldError;

    fn try_from(repr: FieldRepr) -> Result<Self, Self::Error> {
        match repr {
            FieldRepr::Prime { p } => Field::prime(p),
            FieldRepr::Rational => Ok(Field::Rational),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Field::Prime { p })
    }

    pub fn rational() -> Field {
        Field::Rational
    }

    /// Characteristic-p modulus, `None` over the rationals.
    pub fn modulus(&self) -> Option<u64> {
        match *self {
            Field::Prime { p } => Some(p),
            Field::Rational => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.modulus().is_some()
    }

    /// GF(2) is representable, but the wildness statements for commuting
    /// spaces and Lie algebras need at least three elements.
    pub fn is_gf2(&self) -> bool {
        self.modulus() == Some(2)
    }

    pub fn zero(&self) -> Scalar {
        match *self {
            Field::Prime { p } => Scalar::Mod { value: 0, p },
            Field::Rational => Scalar::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match *self {
            Field::Prime { p } => Scalar::Mod {
                value: v.rem_euclid(p as i64) as u64,
                p,
            },
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    pub fn from_u64(&self, v: u64) -> Scalar {
        match *self {
            Field::Prime { p } => Scalar::Mod { value: v % p, p },
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// Parses the scalar text encoding: a decimal integer, or `num/den` over the rationals.
    pub fn parse(&self, text: &str) -> Result<Scalar, FieldError> {
        let t = text.trim();
        let parse_int = |s: &str| -> Result<BigInt, FieldError> {
            let s = s.trim();
            let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(FieldError::Malformed(text.to_string()));
            }
            BigInt::from_str(s).map_err(|_| FieldError::Malformed(text.to_string()))
        };
        match *self {
            Field::Prime { p } => {
                if t.contains('/') {
                    return Err(FieldError::FractionInPrimeField(*self, text.to_string()));
                }
                let v = parse_int(t)?.mod_floor(&BigInt::from(p));
                Ok(Scalar::Mod {
                    value: v.to_u64().expect("residue fits in u64"),
                    p,
                })
            }
            Field::Rational => {
                let (num, den) = match t.split_once('/') {
                    Some((n, d)) => (parse_int(n)?, parse_int(d)?),
                    None => (parse_int(t)?, BigInt::one()),
                };
                if den.is_zero() {
                    return Err(FieldError::ZeroDenominator(text.to_string()));
                }
                Ok(Scalar::Rational(BigRational::new(num, den)))
            }
        }
    }

    /// All elements `0, 1, ..., p-1` in the global tie-breaking order.
    pub fn elements(&self) -> Result<Vec<Scalar>, FieldError> {
        match *self {
            Field::Prime { p } => Ok((0..p).map(|value| Scalar::Mod { value, p }).collect()),
            Field::Rational => Err(FieldError::NotEnumerable(*self)),
        }
    }

    /// First element in enumeration order that is neither 0 nor -1; `1` over
    /// GF(2) and the rationals.
    pub fn default_lambda(&self) -> Scalar {
        match *self {
            Field::Prime { p } if p > 2 => {
                let minus_one = p - 1;
                let v = (0..p)
                    .find(|&v| v != 0 && v != minus_one)
                    .expect("p >= 3 has a third element");
                Scalar::Mod { value: v, p }
            }
            _ => self.one(),
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        s.field() == *self
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Prime { p } => write!(f, "GF({p})"),
            Field::Rational => write!(f, "QQ"),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    /// Accepts `gf5`, `GF(5)`, `prime:5`, `5`, `qq`, `QQ`, `rational`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "qq" || lower == "q" || lower == "rational" {
            return Ok(Field::Rational);
        }
        let digits = lower
            .strip_prefix("gf(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| lower.strip_prefix("gf"))
            .or_else(|| lower.strip_prefix("prime:"))
            .unwrap_or(&lower);
        let p: u64 = digits
            .parse()
            .map_err(|_| FieldError::Malformed(s.to_string()))?;
        Field::prime(p)
    }
}

/// A field element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Mod { value: u64, p: u64 },
    Rational(BigRational),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match *self {
            Scalar::Mod { p, .. } => Field::Prime { p },
            Scalar::Rational(_) => Field::Rational,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rational(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rational(r) => r.is_one(),
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match self {
            Scalar::Mod { value, p } => Ok(Scalar::Mod {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            }),
            Scalar::Rational(r) => Ok(Scalar::Rational(r.recip())),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        Ok(self * &other.inv()?)
    }

    /// Residue for prime-field scalars.
    pub fn residue(&self) -> Option<u64> {
        match self {
            Scalar::Mod { value, .. } => Some(*value),
            Scalar::Rational(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Mod { .. } => None,
        }
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("mixed-field arithmetic: {} and {}", a.field(), b.field())
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) if p == q => {
                let s = a + b;
                Scalar::Mod {
                    value: if s >= *p { s - p } else { s },
                    p: *p,
                }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) if p == q => {
                Scalar::Mod {
                    value: if a >= b { a - b } else { a + p - b },
                    p: *p,
                }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) if p == q => {
                Scalar::Mod {
                    value: a * b % p,
                    p: *p,
                }
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => mismatch(self, rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match self {
            Scalar::Mod { value, p } => Scalar::Mod {
                value: if *value == 0 { 0 } else { p - value },
                p: *p,
            },
            Scalar::Rational(r) => Scalar::Rational(-r),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rational(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Scalar::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}
