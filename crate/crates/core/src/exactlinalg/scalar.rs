use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Prime used by the fast modular mode.
pub const DEFAULT_PRIME: u32 = 32003;

/// Ground field of a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Field {
    #[default]
    Rational,
    Prime(u32),
}

impl Field {
    pub fn prime() -> Self {
        Field::Prime(DEFAULT_PRIME)
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Fp {
                v: n.rem_euclid(p as i64) as u32,
                p,
            },
        }
    }

    pub fn name(self) -> String {
        match self {
            Field::Rational => "Q".to_string(),
            Field::Prime(p) => format!("F{p}"),
        }
    }
}

/// An exact field element: a reduced rational or a residue modulo a prime.
///
/// Arithmetic between a rational and a residue reduces the rational first,
/// which lets integer constants be written once in rational form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Rat(BigRational),
    Fp { v: u32, p: u32 },
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Field::Rational.from_i64(n)
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Scalar::int(0)
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rational,
            Scalar::Fp { p, .. } => Field::Prime(*p),
        }
    }

    /// Reinterpret in `field`. Panics if a denominator vanishes mod p.
    pub fn to_field(&self, field: Field) -> Scalar {
        match (self, field) {
            (Scalar::Rat(_), Field::Rational) => self.clone(),
            (Scalar::Rat(r), Field::Prime(p)) => {
                let pm = BigInt::from(p);
                let n = r.numer().mod_floor(&pm).to_u64().unwrap() as u32;
                let d = r.denom().mod_floor(&pm).to_u64().unwrap() as u32;
                assert!(d != 0, "denominator {} vanishes mod {p}", r.denom());
                Scalar::Fp {
                    v: mulmod(n, inv_mod(d, p), p),
                    p,
                }
            }
            (Scalar::Fp { p: q, .. }, Field::Prime(p)) if *q == p => self.clone(),
            (Scalar::Fp { .. }, _) => panic!("cannot lift a residue to another field"),
        }
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Scalar::Rat(r) => Scalar::Rat(r.recip()),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: inv_mod(*v, *p),
                p: *p,
            },
        }
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self * &other.inv()
    }

    /// `num/den` for rationals, the residue for prime-field elements.
    pub fn to_text(&self) -> String {
        match self {
            Scalar::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
            Scalar::Fp { v, .. } => v.to_string(),
        }
    }

    pub fn parse(s: &str, field: Field) -> Option<Scalar> {
        let r = match s.split_once('/') {
            Some((a, b)) => {
                let d: BigInt = b.trim().parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                BigRational::new(a.trim().parse().ok()?, d)
            }
            None => BigRational::from_integer(s.trim().parse().ok()?),
        };
        Some(Scalar::Rat(r).to_field(field))
    }

    /// Small integer value if representable, used in reports.
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rat(r) if r.is_integer() => r.numer().to_i64(),
            Scalar::Rat(_) => None,
            Scalar::Fp { v, .. } => Some(*v as i64),
        }
    }

    pub fn is_negative(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_negative())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Scalar::Rat(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime: a^(p-2)
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn unify(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
    match (a, b) {
        (Scalar::Rat(_), Scalar::Fp { p, .. }) => (a.to_field(Field::Prime(*p)), b.clone()),
        (Scalar::Fp { p, .. }, Scalar::Rat(_)) => (a.clone(), b.to_field(Field::Prime(*p))),
        (Scalar::Fp { p, .. }, Scalar::Fp { p: q, .. }) => {
            assert_eq!(p, q, "mixed prime fields");
            (a.clone(), b.clone())
        }
        _ => (a.clone(), b.clone()),
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => Scalar::Fp {
                v: ((*a as u64 + *b as u64) % *p as u64) as u32,
                p: *p,
            },
            _ => {
                let (a, b) = unify(self, rhs);
                &a + &b
            }
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: q }) if p == q => Scalar::Fp {
                v: mulmod(*a, *b, *p),
                p: *p,
            },
            _ => {
                let (a, b) = unify(self, rhs);
                &a * &b
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Fp { v, p } => Scalar::Fp {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s, Field::Rational)
            .ok_or_else(|| serde::de::Error::custom(format!("bad scalar {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_reduce() {
        let a = Scalar::ratio(2, -4);
        assert_eq!(a, Scalar::ratio(-1, 2));
        assert_eq!(a.to_text(), "-1/2");
        assert_eq!(&a + &Scalar::ratio(1, 2), Scalar::zero());
    }

    #[test]
    fn residues() {
        let f = Field::prime();
        let a = f.from_i64(-1);
        assert_eq!(a, Scalar::Fp { v: DEFAULT_PRIME - 1, p: DEFAULT_PRIME });
        assert!((&a * &a).is_one());
        let h = Scalar::ratio(1, 2).to_field(f);
        assert!((&h * &f.from_i64(2)).is_one());
        let x = f.from_i64(1234);
        assert!((&x * &x.inv()).is_one());
    }

    #[test]
    fn mixed_promotes() {
        let f = Field::prime();
        let s = &f.from_i64(3) + &Scalar::int(5);
        assert_eq!(s, f.from_i64(8));
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["3/7", "-5/1", "0/1"] {
            assert_eq!(Scalar::parse(s, Field::Rational).unwrap().to_text(), s);
        }
        assert!(Scalar::parse("1/0", Field::Rational).is_none());
    }
}
