//! Ambient groups (the integers and the integers modulo `m`) and base-`M`
//! digit vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of an ambient group, stored as its canonical representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub i64);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    #[inline]
    pub fn value(self) -> i64 {
        self.0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<i64> for Elem {
    fn from(v: i64) -> Self {
        Elem(v)
    }
}

/// The abelian group the sets `A` and `B` live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AmbientGroup {
    Integers,
    IntegersMod(u64),
}

impl AmbientGroup {
    pub fn modulo(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(AmbientGroup::IntegersMod(m))
    }

    /// Reduces an arbitrary integer to the canonical representative.
    pub fn elem(self, v: i64) -> Elem {
        match self {
            AmbientGroup::Integers => Elem(v),
            AmbientGroup::IntegersMod(m) => Elem((v as i128).rem_euclid(m as i128) as i64),
        }
    }

    pub fn is_canonical(self, x: Elem) -> bool {
        match self {
            AmbientGroup::Integers => true,
            AmbientGroup::IntegersMod(m) => x.0 >= 0 && (x.0 as u64) < m,
        }
    }

    pub fn zero(self) -> Elem {
        Elem::ZERO
    }

    pub fn add(self, x: Elem, y: Elem) -> Result<Elem> {
        match self {
            AmbientGroup::Integers => x.0.checked_add(y.0).map(Elem).ok_or(Error::Overflow),
            AmbientGroup::IntegersMod(m) => {
                let s = (x.0 as i128 + y.0 as i128).rem_euclid(m as i128);
                Ok(Elem(s as i64))
            }
        }
    }

    pub fn neg(self, x: Elem) -> Result<Elem> {
        match self {
            AmbientGroup::Integers => x.0.checked_neg().map(Elem).ok_or(Error::Overflow),
            AmbientGroup::IntegersMod(m) => Ok(Elem((-(x.0 as i128)).rem_euclid(m as i128) as i64)),
        }
    }

    pub fn sub(self, x: Elem, y: Elem) -> Result<Elem> {
        self.add(x, self.neg(y)?)
    }

    /// `k·x`, i.e. `x` added to itself `|k|` times and negated when `k < 0`.
    pub fn scale(self, k: i64, x: Elem) -> Result<Elem> {
        match self {
            AmbientGroup::Integers => x.0.checked_mul(k).map(Elem).ok_or(Error::Overflow),
            AmbientGroup::IntegersMod(m) => {
                let m = m as i128;
                let p = (k as i128).rem_euclid(m) * (x.0 as i128);
                Ok(Elem(p.rem_euclid(m) as i64))
            }
        }
    }
}

impl fmt::Display for AmbientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AmbientGroup::Integers => write!(f, "Z"),
            AmbientGroup::IntegersMod(m) => write!(f, "Z/{m}"),
        }
    }
}

/// A little-endian digit expansion `d_0, ..., d_{n-1}` in base `M`.
///
/// Digits may be negative so that digit-wise differences of set elements
/// (balanced digits) can be represented; [`DigitVector::element`] enforces
/// the `0 <= d < M` range for vectors that stand for set elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitVector {
    base: i64,
    digits: Vec<i64>,
}

impl DigitVector {
    pub fn new(base: i64, digits: Vec<i64>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase { base, min: 2 });
        }
        if digits.is_empty() {
            return Err(Error::EmptyDigitVector);
        }
        Ok(DigitVector { base, digits })
    }

    /// Like [`DigitVector::new`], additionally requiring every digit in `0..base`.
    pub fn element(base: i64, digits: Vec<i64>) -> Result<Self> {
        let v = Self::new(base, digits)?;
        if let Some(&d) = v.digits.iter().find(|&&d| d < 0 || d >= base) {
            return Err(Error::DigitOutOfRange { digit: d, base });
        }
        Ok(v)
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Evaluates `sum d_i M^i` in the integers.
pub fn digits_to_elem(v: &DigitVector) -> Result<Elem> {
    let mut acc: i64 = 0;
    for &d in v.digits.iter().rev() {
        acc = acc
            .checked_mul(v.base)
            .and_then(|a| a.checked_add(d))
            .ok_or(Error::InstanceTooLarge("digit evaluation overflows i64".into()))?;
    }
    Ok(Elem(acc))
}

/// The `n` base-`base` digits of `x`, least significant first.
pub fn elem_to_digits(x: Elem, base: i64, n: usize) -> Result<DigitVector> {
    if base < 2 {
        return Err(Error::InvalidBase { base, min: 2 });
    }
    if n == 0 {
        return Err(Error::EmptyDigitVector);
    }
    let out_of_range = || Error::OutOfRange { value: x.0, base, n };
    if x.0 < 0 {
        return Err(out_of_range());
    }
    let mut rest = x.0;
    let mut digits = Vec::with_capacity(n);
    for _ in 0..n {
        digits.push(rest % base);
        rest /= base;
    }
    if rest != 0 {
        return Err(out_of_range());
    }
    Ok(DigitVector { base, digits })
}
