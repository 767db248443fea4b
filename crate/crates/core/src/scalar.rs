//! Exact non-negative rationals with a distinguished infinity, plus signed
//! cost deltas.
//!
//! Every weight, price, distance and cost that leaves the crate is a
//! [`Scalar`]. Differences between two costs are [`Delta`]s because they can
//! be negative and because `∞ - ∞` has no value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Non-negative exact rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Finite(BigRational),
    Infinity,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Finite(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Finite(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::try_from_rational(BigRational::from_integer(BigInt::from(v)))
            .expect("negative integer scalar")
    }

    /// `num / den`; panics on negative values or a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::try_from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
            .expect("negative rational scalar")
    }

    pub fn try_from_rational(r: BigRational) -> Result<Self, Error> {
        if r.is_negative() {
            return Err(Error::NegativeScalar(r.to_string()));
        }
        Ok(Scalar::Finite(r))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Scalar::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Finite(r) if r.is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Finite(r) => Some(r),
            Scalar::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Finite(r) => r.to_f64().unwrap_or(f64::INFINITY),
            Scalar::Infinity => f64::INFINITY,
        }
    }

    /// `self / other`. Finite over zero is infinite; `0/0` is `None`.
    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        match (self, other) {
            (Scalar::Infinity, Scalar::Infinity) => None,
            (Scalar::Infinity, _) => Some(Scalar::Infinity),
            (Scalar::Finite(_), Scalar::Infinity) => Some(Scalar::zero()),
            (Scalar::Finite(a), Scalar::Finite(b)) => {
                if b.is_zero() {
                    if a.is_zero() {
                        None
                    } else {
                        Some(Scalar::Infinity)
                    }
                } else {
                    Some(Scalar::Finite(a / b))
                }
            }
        }
    }

    /// `self - other` as a signed delta.
    pub fn delta_from(&self, before: &Scalar) -> Delta {
        match (self, before) {
            (Scalar::Finite(a), Scalar::Finite(b)) => Delta::Finite(a - b),
            (Scalar::Infinity, Scalar::Finite(_)) => Delta::PlusInfinity,
            (Scalar::Finite(_), Scalar::Infinity) => Delta::MinusInfinity,
            (Scalar::Infinity, Scalar::Infinity) => Delta::Indeterminate,
        }
    }

    /// Largest integer `t >= 0` with `t <= sqrt(self)`, found by exact
    /// comparison `t^2 <= self`.
    pub fn floor_sqrt(&self) -> Option<BigInt> {
        let r = self.as_rational()?;
        let floor = r.floor().to_integer();
        // sqrt(r) <= sqrt(floor + 1), so the integer sqrt of the floor is exact
        Some(floor.sqrt())
    }

    /// Exact square root when `self` is the square of a rational.
    pub fn exact_sqrt(&self) -> Option<Scalar> {
        let r = self.as_rational()?;
        let (n, d) = (r.numer(), r.denom());
        let (sn, sd) = (n.sqrt(), d.sqrt());
        if &(&sn * &sn) == n && &(&sd * &sd) == d {
            Some(Scalar::Finite(BigRational::new(sn, sd)))
        } else {
            None
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::try_from_rational(r).expect("negative rational scalar")
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Infinity, Scalar::Infinity) => Ordering::Equal,
            (Scalar::Infinity, _) => Ordering::Greater,
            (_, Scalar::Infinity) => Ordering::Less,
            (Scalar::Finite(a), Scalar::Finite(b)) => a.cmp(b),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Finite(a), Scalar::Finite(b)) => Scalar::Finite(a + b),
            _ => Scalar::Infinity,
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    /// `0 * ∞` is taken as `0` (an unused edge price never costs anything).
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Finite(a), Scalar::Finite(b)) => Scalar::Finite(a * b),
            (Scalar::Finite(a), Scalar::Infinity) | (Scalar::Infinity, Scalar::Finite(a))
                if a.is_zero() =>
            {
                Scalar::zero()
            }
            _ => Scalar::Infinity,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Finite(r) => fmt_rational(r, f),
            Scalar::Infinity => write!(f, "inf"),
        }
    }
}

/// Parses `"p/q"`, `"p"` or `"inf"`. Whitespace around tokens is ignored.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim().eq_ignore_ascii_case("inf") {
            return Ok(Scalar::Infinity);
        }
        Scalar::try_from_rational(parse_rational(s)?)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Int(i64),
    Text(String),
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match RawNumber::deserialize(d)? {
            RawNumber::Int(v) if v >= 0 => Ok(Scalar::from_int(v)),
            RawNumber::Int(v) => Err(serde::de::Error::custom(format!("negative value {v}"))),
            RawNumber::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Signed difference `after - before` of two costs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Delta {
    Finite(BigRational),
    PlusInfinity,
    MinusInfinity,
    /// Both costs were infinite.
    Indeterminate,
}

impl Delta {
    /// True iff the change is a strict cost decrease.
    pub fn is_improvement(&self) -> bool {
        match self {
            Delta::Finite(d) => d.is_negative(),
            Delta::MinusInfinity => true,
            Delta::PlusInfinity | Delta::Indeterminate => false,
        }
    }

    pub fn zero() -> Self {
        Delta::Finite(BigRational::zero())
    }

    /// Total order used for "best" selection: `-∞ < finite < +∞ < indeterminate`.
    fn rank(&self) -> (u8, Option<&BigRational>) {
        match self {
            Delta::MinusInfinity => (0, None),
            Delta::Finite(r) => (1, Some(r)),
            Delta::PlusInfinity => (2, None),
            Delta::Indeterminate => (3, None),
        }
    }
}

impl PartialOrd for Delta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Delta {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Finite(r) => fmt_rational(r, f),
            Delta::PlusInfinity => write!(f, "inf"),
            Delta::MinusInfinity => write!(f, "-inf"),
            Delta::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Delta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let t = match RawNumber::deserialize(d)? {
            RawNumber::Int(v) => return Ok(Delta::Finite(BigRational::from_integer(v.into()))),
            RawNumber::Text(t) => t,
        };
        match t.trim() {
            "inf" => Ok(Delta::PlusInfinity),
            "-inf" => Ok(Delta::MinusInfinity),
            "indeterminate" => Ok(Delta::Indeterminate),
            other => parse_rational(other)
                .map(Delta::Finite)
                .map_err(serde::de::Error::custom),
        }
    }
}
