use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// Largest supported prime modulus; products of residues stay inside `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// Coefficient field: the rationals or a prime field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

/// A field element. The variant always matches the owning [`FieldSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Mod(u64),
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

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl FieldSpec {
    pub fn prime(l: u64) -> Result<Self> {
        if !is_prime(l) || l > MAX_PRIME {
            return Err(Error::InvalidField(format!("{l} is not a supported prime")));
        }
        Ok(FieldSpec::Prime(l))
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    /// Whether `n` is a unit in the field, i.e. the characteristic does not divide `n`.
    pub fn is_invertible_integer(&self, n: u64) -> bool {
        match self {
            FieldSpec::Rationals => n != 0,
            FieldSpec::Prime(p) => n % p != 0,
        }
    }

    /// Good-field predicate for a finite group: the characteristic does not
    /// divide the group order.
    pub fn is_good_for_order(&self, order: usize) -> bool {
        self.is_invertible_integer(order as u64)
    }

    pub fn zero(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(Rational::zero()),
            FieldSpec::Prime(_) => Scalar::Mod(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(Rational::one()),
            FieldSpec::Prime(_) => Scalar::Mod(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            FieldSpec::Rationals => Scalar::Rat(Rational::from_integer(n)),
            FieldSpec::Prime(p) => Scalar::Mod(n.rem_euclid(*p as i64) as u64),
        }
    }

    /// Image of `n / d`; `None` if `d` is not invertible.
    pub fn from_fraction(&self, n: i64, d: i64) -> Option<Scalar> {
        let d = self.from_i64(d);
        let inv = self.inv(&d)?;
        Some(self.mul(&self.from_i64(n), &inv))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % p),
            _ => mismatch(),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x - y),
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + p - y) % p),
            _ => mismatch(),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(x * y % p),
            _ => mismatch(),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => Scalar::Rat(-x),
            (FieldSpec::Prime(p), Scalar::Mod(x)) => Scalar::Mod((p - x) % p),
            _ => mismatch(),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        match (self, a) {
            (FieldSpec::Rationals, Scalar::Rat(x)) => x.recip().map(Scalar::Rat),
            (FieldSpec::Prime(p), Scalar::Mod(x)) => {
                if *x == 0 {
                    None
                } else {
                    Some(Scalar::Mod(mod_pow(*x, p - 2, *p)))
                }
            }
            _ => mismatch(),
        }
    }

    /// `a += b * c`, the inner kernel of every product and elimination.
    #[inline]
    pub fn add_mul_assign(&self, a: &mut Scalar, b: &Scalar, c: &Scalar) {
        match (self, &mut *a, b, c) {
            (FieldSpec::Prime(p), Scalar::Mod(x), Scalar::Mod(y), Scalar::Mod(z)) => {
                *x = (*x + y * z) % p;
            }
            (FieldSpec::Rationals, Scalar::Rat(x), Scalar::Rat(y), Scalar::Rat(z)) => {
                *x = &*x + &(y * z);
            }
            _ => mismatch(),
        }
    }

    /// Whether `s` belongs to this field's representation.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (FieldSpec::Rationals, Scalar::Rat(_)) => true,
            (FieldSpec::Prime(p), Scalar::Mod(x)) => x < p,
            _ => false,
        }
    }

    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let r: Rational = s
            .parse()
            .map_err(|e: super::rational::ParseRationalError| Error::Parse(e.to_string()))?;
        match self {
            FieldSpec::Rationals => Ok(Scalar::Rat(r)),
            FieldSpec::Prime(p) => {
                let big = r.to_big();
                let p_big = num_bigint::BigInt::from(*p);
                let reduce = |n: &num_bigint::BigInt| -> u64 {
                    use num_integer::Integer;
                    use num_traits::ToPrimitive;
                    n.mod_floor(&p_big).to_u64().expect("residue fits")
                };
                let n = Scalar::Mod(reduce(big.numer()));
                let d = Scalar::Mod(reduce(big.denom()));
                let inv = self
                    .inv(&d)
                    .ok_or_else(|| Error::Parse(format!("{s}: denominator vanishes mod {p}")))?;
                Ok(self.mul(&n, &inv))
            }
        }
    }
}

#[cold]
fn mismatch() -> ! {
    panic!("scalar does not belong to the field it is combined in")
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod(x) => *x == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod(x) => *x == 1,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "F{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "Q" || t.eq_ignore_ascii_case("rationals") {
            return Ok(FieldSpec::Rationals);
        }
        let digits = t
            .strip_prefix('F')
            .or_else(|| t.strip_prefix("GF"))
            .ok_or_else(|| {
                Error::InvalidField(format!("unknown field {s:?}; use Q or F<prime>"))
            })?;
        let l: u64 = digits
            .parse()
            .map_err(|_| Error::InvalidField(format!("unknown field {s:?}; use Q or F<prime>")))?;
        FieldSpec::prime(l)
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FieldSpec> for String {
    fn from(f: FieldSpec) -> String {
        f.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_fields() {
        assert_eq!("Q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!("F7".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(7));
        assert!("F8".parse::<FieldSpec>().is_err());
        assert!("F1".parse::<FieldSpec>().is_err());
        assert!("R".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = FieldSpec::Prime(7);
        let three = f.from_i64(3);
        let inv = f.inv(&three).unwrap();
        assert_eq!(f.mul(&three, &inv), f.one());
        assert_eq!(f.from_i64(-1), Scalar::Mod(6));
        assert_eq!(f.parse_scalar("1/2").unwrap(), Scalar::Mod(4));
        assert!(f.parse_scalar("1/7").is_err());
        assert!(f.inv(&f.zero()).is_none());
    }

    #[test]
    fn good_field_predicate() {
        assert!(FieldSpec::Rationals.is_good_for_order(48));
        assert!(!FieldSpec::Prime(3).is_good_for_order(6));
        assert!(FieldSpec::Prime(5).is_good_for_order(48));
    }
}
