//! Carry-free digit constructions: a set of digit pairs tensored `n` times in base `M`.

use std::collections::BTreeSet;
use std::path::Path;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::big;
use crate::group::{digits_to_elem, AmbientGroup, DigitVector, Elem};
use crate::instance::Instance;

/// Default limit on `#G` for materialized constructions.
pub const DEFAULT_MATERIALIZE_CAP: u64 = 1_000_000;

/// A per-digit relation `P ⊆ {0..M-1}^2`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DigitPattern {
    pairs: BTreeSet<(u32, u32)>,
    constrain_d: bool,
}

impl DigitPattern {
    pub fn new(pairs: impl IntoIterator<Item = (u32, u32)>, constrain_d: bool) -> Result<Self> {
        let pairs: BTreeSet<_> = pairs.into_iter().collect();
        if pairs.is_empty() {
            return Err(Error::InvalidPattern("a pattern needs at least one pair".into()));
        }
        Ok(DigitPattern { pairs, constrain_d })
    }

    /// `{(x, y) ∈ {0,1,3}^2 : x != y}`.
    pub fn example_one() -> Self {
        let digits = [0, 1, 3];
        let pairs = digits.iter().flat_map(|&x| digits.iter().filter(move |&&y| y != x).map(move |&y| (x, y)));
        DigitPattern::new(pairs, false).unwrap()
    }

    pub fn example_two() -> Self {
        let pairs = [(4, 0), (2, 1), (3, 1), (4, 1), (0, 2), (2, 2), (0, 3), (2, 3)];
        DigitPattern::new(pairs, true).unwrap()
    }

    pub fn pairs(&self) -> &BTreeSet<(u32, u32)> {
        &self.pairs
    }

    pub fn constrain_d(&self) -> bool {
        self.constrain_d
    }

    pub fn with_constrain_d(mut self, constrain_d: bool) -> Self {
        self.constrain_d = constrain_d;
        self
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn image<T: Ord>(&self, f: impl Fn(i64, i64) -> T) -> BTreeSet<T> {
        self.pairs.iter().map(|&(x, y)| f(x as i64, y as i64)).collect()
    }

    pub fn first_digits(&self) -> BTreeSet<i64> {
        self.image(|x, _| x)
    }

    pub fn second_digits(&self) -> BTreeSet<i64> {
        self.image(|_, y| y)
    }

    pub fn sum_digits(&self) -> BTreeSet<i64> {
        self.image(|x, y| x + y)
    }

    pub fn twice_sum_digits(&self) -> BTreeSet<i64> {
        self.image(|x, y| x + 2 * y)
    }

    pub fn difference_digits(&self) -> BTreeSet<i64> {
        self.image(|x, y| x - y)
    }

    pub fn is_difference_injective(&self) -> bool {
        self.difference_digits().len() == self.pairs.len()
    }

    /// Largest of `#A_1, #B_1, #C_1` (and `#D_1` when tracked).
    pub fn max_slice(&self) -> usize {
        let mut m = self.first_digits().len().max(self.second_digits().len()).max(self.sum_digits().len());
        if self.constrain_d {
            m = m.max(self.twice_sum_digits().len());
        }
        m
    }

    /// Smallest base in which every tracked digit expression stays a single
    /// digit and digit-wise differences decode uniquely.
    pub fn min_base(&self) -> i64 {
        let deltas = self.difference_digits();
        let width = deltas.last().unwrap() - deltas.first().unwrap();
        let mut need = *self.sum_digits().last().unwrap();
        if self.constrain_d {
            need = need.max(*self.twice_sum_digits().last().unwrap());
        }
        (1 + need.max(width)).max(2)
    }

    pub fn stats(&self) -> PatternStats {
        pattern_stats(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PatternFile = serde_json::from_str(text).map_err(|e| Error::InvalidPattern(e.to_string()))?;
        DigitPattern::new(file.pairs.into_iter().map(|[x, y]| (x, y)), file.constrain_d)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::InvalidPattern(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }
}

/// On-disk form: `{"pairs": [[x, y], ...], "constrain_d": bool}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternFile {
    pub pairs: Vec<[u32; 2]>,
    #[serde(default)]
    pub constrain_d: bool,
}

impl Serialize for DigitPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternFile { pairs: self.pairs.iter().map(|&(x, y)| [x, y]).collect(), constrain_d: self.constrain_d }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DigitPattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = PatternFile::deserialize(d)?;
        DigitPattern::new(file.pairs.into_iter().map(|[x, y]| (x, y)), file.constrain_d)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternStats {
    pub pairs: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// Present only when the `a + 2b` slice is tracked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    pub delta: usize,
    pub difference_injective: bool,
    pub min_base: i64,
    /// `ln #pairs / ln max_slice`, defined for difference-injective patterns with `max_slice >= 2`.
    #[serde(serialize_with = "six_places")]
    pub exponent: Option<f64>,
}

fn six_places<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_f64((v * 1e6).round() / 1e6),
        None => s.serialize_none(),
    }
}

impl PatternStats {
    pub fn max_slice(&self) -> usize {
        self.a.max(self.b).max(self.c).max(self.d.unwrap_or(0))
    }
}

pub fn pattern_stats(p: &DigitPattern) -> PatternStats {
    let a = p.first_digits().len();
    let b = p.second_digits().len();
    let c = p.sum_digits().len();
    let d = p.constrain_d.then(|| p.twice_sum_digits().len());
    let delta = p.difference_digits().len();
    let difference_injective = delta == p.len();
    let max_slice = a.max(b).max(c).max(d.unwrap_or(0));
    let exponent = (difference_injective && max_slice >= 2).then(|| (p.len() as f64).ln() / (max_slice as f64).ln());
    PatternStats { pairs: p.len(), a, b, c, d, delta, difference_injective, min_base: p.min_base(), exponent }
}

/// Slice cardinalities of an `n`-fold tensoring, from the product identities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSizes {
    pub g: BigUint,
    pub a: BigUint,
    pub b: BigUint,
    pub c: BigUint,
    pub d: Option<BigUint>,
    /// Number of distinct differences; equals `g` for difference-injective patterns.
    pub delta: Option<BigUint>,
}

pub fn analytic_sizes(p: &DigitPattern, n: u32) -> TensorSizes {
    let st = pattern_stats(p);
    let pow = |k: usize| big(k).pow(n);
    TensorSizes {
        g: pow(st.pairs),
        a: pow(st.a),
        b: pow(st.b),
        c: pow(st.c),
        d: st.d.map(pow),
        delta: st.difference_injective.then(|| pow(st.pairs)),
    }
}

fn digit_set(digits: &[i64], n: usize, base: i64) -> Result<Vec<Elem>> {
    let k = digits.len();
    let count = k.pow(n as u32);
    (0..count)
        .map(|mut idx| {
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let d = digits[idx % k];
                    idx /= k;
                    d
                })
                .collect();
            digits_to_elem(&DigitVector::element(base, v)?)
        })
        .collect()
}

/// Instance whose `G` consists of the pairs with every digit pair in `p`.
/// `base = None` selects [`DigitPattern::min_base`].
pub fn tensor_pattern(p: &DigitPattern, n: usize, base: Option<i64>, cap: u64) -> Result<Instance> {
    let min = p.min_base();
    let base = base.unwrap_or(min);
    if base < min {
        return Err(Error::InvalidBase { base, min });
    }
    if n == 0 {
        return Err(Error::InvalidPattern("the number of digits must be at least 1".into()));
    }
    let size = big(p.len()).pow(n as u32);
    if size > big(cap) {
        return Err(Error::InstanceTooLarge(format!("#G = {size} exceeds the materialization cap {cap}")));
    }
    // Every element must fit, including a + 2b in the integers.
    let top = DigitVector::new(base, vec![3 * (base - 1); n])?;
    digits_to_elem(&top)?;

    let pairs: Vec<(i64, i64)> = p.pairs.iter().map(|&(x, y)| (x as i64, y as i64)).collect();
    let k = pairs.len();
    let g = (0..k.pow(n as u32))
        .into_par_iter()
        .map(|mut idx| {
            let (mut xs, mut ys) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let (x, y) = pairs[idx % k];
                xs.push(x);
                ys.push(y);
                idx /= k;
            }
            let a = digits_to_elem(&DigitVector::element(base, xs)?)?;
            let b = digits_to_elem(&DigitVector::element(base, ys)?)?;
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let a_digits: Vec<i64> = p.first_digits().into_iter().collect();
    let b_digits: Vec<i64> = p.second_digits().into_iter().collect();
    Instance::new(AmbientGroup::Integers, digit_set(&a_digits, n, base)?, digit_set(&b_digits, n, base)?, g)
}

/// The first construction: digits in `{0, 1, 3}`, distinct digit-wise. Needs `M >= 7`.
pub fn build_example_one(n: usize, base: i64) -> Result<Instance> {
    if base < 7 {
        return Err(Error::InvalidBase { base, min: 7 });
    }
    tensor_pattern(&DigitPattern::example_one(), n, Some(base), DEFAULT_MATERIALIZE_CAP)
}

/// The second construction with the eight digit pairs. Needs `M >= 9`.
pub fn build_example_two(n: usize, base: i64) -> Result<Instance> {
    if base < 9 {
        return Err(Error::InvalidBase { base, min: 9 });
    }
    tensor_pattern(&DigitPattern::example_two(), n, Some(base), DEFAULT_MATERIALIZE_CAP)
}
