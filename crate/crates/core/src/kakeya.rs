//! Lower bounds on the dimension of Besicovitch sets in `R^n`, compared
//! against the `(n + 2) / 2` baseline.

use std::cmp::Ordering;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Minkowski,
    Hausdorff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    New,
    Wolff,
    Equal,
}

impl Winner {
    fn compare(new: Rational, wolff: Rational) -> Self {
        match new.cmp(&wolff) {
            Ordering::Greater => Winner::New,
            Ordering::Less => Winner::Wolff,
            Ordering::Equal => Winner::Equal,
        }
    }
}

fn as_fraction<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    if r.is_integer() {
        s.serialize_str(&r.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub n: i64,
    #[serde(serialize_with = "as_fraction")]
    pub minkowski: Rational,
    #[serde(serialize_with = "as_fraction")]
    pub hausdorff: Rational,
    #[serde(serialize_with = "as_fraction")]
    pub wolff: Rational,
    pub best_minkowski: Winner,
    pub best_hausdorff: Winner,
}

/// `4n/7 + 3/7`.
pub fn minkowski_bound(n: i64) -> Rational {
    Rational::new(4 * n + 3, 7)
}

/// `6n/11 + 5/11`.
pub fn hausdorff_bound(n: i64) -> Rational {
    Rational::new(6 * n + 5, 11)
}

/// `(n + 2)/2`.
pub fn wolff_bound(n: i64) -> Rational {
    Rational::new(n + 2, 2)
}

pub fn bound(kind: BoundKind, n: i64) -> Rational {
    match kind {
        BoundKind::Minkowski => minkowski_bound(n),
        BoundKind::Hausdorff => hausdorff_bound(n),
    }
}

pub fn dimension_report(n: i64) -> Result<DimensionReport> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let (minkowski, hausdorff, wolff) = (minkowski_bound(n), hausdorff_bound(n), wolff_bound(n));
    Ok(DimensionReport {
        n,
        minkowski,
        hausdorff,
        wolff,
        best_minkowski: Winner::compare(minkowski, wolff),
        best_hausdorff: Winner::compare(hausdorff, wolff),
    })
}

/// Least `n >= 2` at which the bound strictly exceeds `(n + 2)/2`.
///
/// Both bounds grow with slope above `1/2`, so the scan terminates.
pub fn novelty_threshold(kind: BoundKind) -> i64 {
    (2..).find(|&n| bound(kind, n) > wolff_bound(n)).expect("slope exceeds 1/2")
}
