//! Exact integers and rationals with a JSON form that never rounds.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::ser::{Error as _, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub fn big(x: impl Into<BigUint>) -> BigUint {
    x.into()
}

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `x^q <= n^p`, i.e. `x <= n^(p/q)` for nonnegative `x` and `n`.
pub fn le_fractional_power(x: &BigUint, q: u32, n: &BigUint, p: u32) -> bool {
    x.pow(q) <= n.pow(p)
}

fn raw_number<S: Serializer>(digits: String, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(digits).map_err(S::Error::custom)?.serialize(s)
}

/// Arbitrary-width integer, serialized as a bare JSON number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactInt(pub BigInt);

impl From<BigUint> for ExactInt {
    fn from(x: BigUint) -> Self {
        ExactInt(x.into())
    }
}

impl From<u64> for ExactInt {
    fn from(x: u64) -> Self {
        ExactInt(x.into())
    }
}

impl Serialize for ExactInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        raw_number(self.0.to_string(), s)
    }
}

impl fmt::Display for ExactInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Rational serialized as `{"num": n, "den": d}` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(pub BigRational);

impl From<BigRational> for ExactRational {
    fn from(x: BigRational) -> Self {
        ExactRational(x)
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Rational", 2)?;
        st.serialize_field("num", &ExactInt(self.0.numer().clone()))?;
        st.serialize_field("den", &ExactInt(self.0.denom().clone()))?;
        st.end()
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}
