//! Exact rational power quantities.
//!
//! All arithmetic is exact. Overflow of the underlying 128-bit numerator or
//! denominator panics instead of wrapping, so a result is either exact or
//! absent.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact rational amount of power.
///
/// Environment powers and allocation entries are non-negative; differences
/// such as deviation gaps may be negative, so the type itself is signed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Power(Ratio<i128>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParsePowerError {
    #[error("empty power value")]
    Empty,
    #[error("invalid power value `{0}`: expected an integer or `numerator/denominator`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Power {
    pub const ZERO: Power = Power(Ratio::new_raw(0, 1));
    pub const ONE: Power = Power(Ratio::new_raw(1, 1));

    pub fn from_int(value: i64) -> Self {
        Power(Ratio::from_integer(value as i128))
    }

    /// `numer / denom`, reduced. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Power(Ratio::new(numer as i128, denom as i128))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `max(self, 0)`.
    pub fn clamp_nonnegative(self) -> Self {
        if self.is_negative() {
            Power::ZERO
        } else {
            self
        }
    }

    /// Exact quotient `self / step` when it is a non-negative integer.
    pub fn multiple_of(&self, step: Power) -> Option<u64> {
        if !step.is_positive() {
            return None;
        }
        let q = *self / step;
        if q.is_integer() && !q.is_negative() {
            u64::try_from(q.numer()).ok()
        } else {
            None
        }
    }

    pub fn times(self, k: u64) -> Self {
        self * Power(Ratio::from_integer(k as i128))
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Power {
    type Err = ParsePowerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParsePowerError::Empty);
        }
        let parse_int = |t: &str| -> Result<i128, ParsePowerError> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(ParsePowerError::Malformed(s.to_string()));
            }
            t.parse::<i128>()
                .map_err(|_| ParsePowerError::Malformed(s.to_string()))
        };
        match s.split_once('/') {
            None => Ok(Power(Ratio::from_integer(parse_int(s)?))),
            Some((n, d)) => {
                let n = parse_int(n)?;
                let d = parse_int(d)?;
                if d == 0 {
                    return Err(ParsePowerError::ZeroDenominator(s.to_string()));
                }
                Ok(Power(Ratio::new(n, d)))
            }
        }
    }
}

impl From<i64> for Power {
    fn from(value: i64) -> Self {
        Power::from_int(value)
    }
}

macro_rules! checked_binop {
    ($tr:ident, $method:ident, $checked:ident, $name:literal) => {
        impl $tr for Power {
            type Output = Power;
            fn $method(self, rhs: Power) -> Power {
                Power(
                    self.0.$checked(&rhs.0).unwrap_or_else(|| {
                        panic!("power {} overflow: {} and {}", $name, self, rhs)
                    }),
                )
            }
        }
    };
}

checked_binop!(Add, add, checked_add, "addition");
checked_binop!(Sub, sub, checked_sub, "subtraction");
checked_binop!(Mul, mul, checked_mul, "multiplication");

impl Div for Power {
    type Output = Power;
    fn div(self, rhs: Power) -> Power {
        assert!(!rhs.is_zero(), "division of power by zero");
        Power(
            self.0
                .checked_div(&rhs.0)
                .unwrap_or_else(|| panic!("power division overflow: {} / {}", self, rhs)),
        )
    }
}

impl Neg for Power {
    type Output = Power;
    fn neg(self) -> Power {
        Power::ZERO - self
    }
}

impl AddAssign for Power {
    fn add_assign(&mut self, rhs: Power) {
        *self = *self + rhs;
    }
}

impl SubAssign for Power {
    fn sub_assign(&mut self, rhs: Power) {
        *self = *self - rhs;
    }
}

impl Sum for Power {
    fn sum<I: Iterator<Item = Power>>(iter: I) -> Power {
        iter.fold(Power::ZERO, |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Power> for Power {
    fn sum<I: Iterator<Item = &'a Power>>(iter: I) -> Power {
        iter.fold(Power::ZERO, |acc, x| acc + *x)
    }
}

// Integers serialize as JSON numbers, everything else as "n/d" strings.
impl Serialize for Power {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(v) = i64::try_from(self.numer()) {
                return serializer.serialize_i64(v);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Power {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PowerVisitor;

        impl Visitor<'_> for PowerVisitor {
            type Value = Power;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"numerator/denominator\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Power, E> {
                Ok(Power::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Power, E> {
                Ok(Power(Ratio::from_integer(v as i128)))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Power, E> {
                Err(E::custom(format!(
                    "floating-point power {v} is not exact; write it as \"numerator/denominator\""
                )))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Power, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(PowerVisitor)
    }
}
