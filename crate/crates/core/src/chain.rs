//! Counting label-chains `(x_0, ..., x_n)` with `f_i(x_{i-1}) = f_i(x_i)`.
//!
//! Items of `X` are the indices `0..size`; each labeling maps them into an
//! explicit label set `0..label_count`, which may contain unused labels.

use std::collections::HashMap;
use std::hash::Hash;
use std::path::Path;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{big, ExactInt, ExactRational};

pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    labels: Vec<usize>,
    label_count: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, label_count: usize) -> Result<Self> {
        if let Some(&l) = labels.iter().find(|&&l| l >= label_count) {
            return Err(Error::MalformedProblem(format!("label {l} outside a label set of size {label_count}")));
        }
        Ok(Labeling { labels, label_count })
    }

    /// Labels `items` by `f`, indexing into the explicit `label_set`.
    pub fn from_fn<T, L, F>(items: &[T], label_set: &[L], f: F) -> Result<Self>
    where
        L: Hash + Eq,
        F: Fn(&T) -> L,
    {
        let index: HashMap<&L, usize> = label_set.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let labels = items
            .iter()
            .map(|x| {
                index
                    .get(&f(x))
                    .copied()
                    .ok_or_else(|| Error::MalformedProblem("map value outside its label set".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Labeling { labels, label_count: index.len() })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_count(&self) -> usize {
        self.label_count
    }
}

/// A finite set `X` with labelings `f_1, ..., f_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainProblem {
    size: usize,
    labelings: Vec<Labeling>,
}

impl ChainProblem {
    pub fn new(size: usize, labelings: Vec<Labeling>) -> Result<Self> {
        for (i, f) in labelings.iter().enumerate() {
            if f.labels.len() != size {
                return Err(Error::MalformedProblem(format!(
                    "labeling {} has {} entries for {size} items",
                    i + 1,
                    f.labels.len()
                )));
            }
            if size > 0 && f.label_count == 0 {
                return Err(Error::EmptyLabelSet { index: i + 1 });
            }
        }
        Ok(ChainProblem { size, labelings })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labelings(&self) -> &[Labeling] {
        &self.labelings
    }

    /// Number of labelings, `n`.
    pub fn len(&self) -> usize {
        self.labelings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labelings.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct File {
            size: usize,
            labelings: Vec<Labeling>,
        }
        let file: File = serde_json::from_str(text).map_err(|e| Error::MalformedProblem(e.to_string()))?;
        let labelings =
            file.labelings.into_iter().map(|f| Labeling::new(f.labels, f.label_count)).collect::<Result<_>>()?;
        Self::new(file.size, labelings)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::MalformedProblem(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    /// A random problem with `1..=max_size` items, `0..=max_n` labelings and
    /// label sets of size `1..=max_labels`. Labelings are either uniform or
    /// concentrated on a few labels, so both balanced and lopsided fibers occur.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, max_size: usize, max_n: usize, max_labels: usize) -> Self {
        let size = rng.gen_range(1..=max_size);
        let n = rng.gen_range(0..=max_n);
        let labelings = (0..n)
            .map(|_| {
                let label_count = rng.gen_range(1..=max_labels);
                let used = if rng.gen_bool(0.5) { label_count } else { rng.gen_range(1..=label_count) };
                let labels = (0..size).map(|_| rng.gen_range(0..used)).collect();
                Labeling { labels, label_count }
            })
            .collect();
        ChainProblem { size, labelings }
    }

    /// `#X^(n+1)`, the number of tuples a direct enumeration visits.
    pub fn enumeration_size(&self) -> BigUint {
        big(self.size).pow(self.labelings.len() as u32 + 1)
    }
}

fn check_cap(needed: &BigUint, cap: u64) -> Result<()> {
    if *needed > BigUint::from(cap) {
        return Err(Error::EnumerationCapExceeded { needed: needed.to_string(), cap });
    }
    Ok(())
}

/// Counts chains by visiting every tuple of `X^(n+1)`.
pub fn chain_count_naive(p: &ChainProblem, cap: u64) -> Result<BigUint> {
    check_cap(&p.enumeration_size(), cap)?;
    let n = p.labelings.len();
    if p.size == 0 {
        return Ok(BigUint::zero());
    }
    let count: u64 = (0..p.size)
        .into_par_iter()
        .map(|x0| {
            let mut tuple = vec![0usize; n + 1];
            tuple[0] = x0;
            let mut count = 0u64;
            loop {
                let ok = (1..=n).all(|i| {
                    let f = &p.labelings[i - 1].labels;
                    f[tuple[i - 1]] == f[tuple[i]]
                });
                count += ok as u64;
                // Odometer over positions 1..=n.
                let mut pos = n;
                loop {
                    if pos == 0 {
                        return count;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < p.size {
                        break;
                    }
                    tuple[pos] = 0;
                    pos -= 1;
                }
            }
        })
        .sum();
    Ok(BigUint::from(count))
}

/// Counts chains by pushing weights through the fibers of each labeling.
///
/// After step `i`, the weight of `x` is the number of chains
/// `(x_0, ..., x_i)` ending at `x_i = x`.
pub fn chain_count_dp(p: &ChainProblem) -> BigUint {
    let mut weights = vec![BigUint::one(); p.size];
    for f in &p.labelings {
        let mut fibers: HashMap<usize, BigUint> = HashMap::new();
        for (w, &l) in weights.iter().zip(&f.labels) {
            *fibers.entry(l).or_default() += w;
        }
        for (w, l) in weights.iter_mut().zip(&f.labels) {
            *w = fibers[l].clone();
        }
    }
    weights.into_iter().sum()
}

/// `(#X)^(n+1) / prod #A_i`.
pub fn chain_lower_bound(p: &ChainProblem) -> Result<BigRational> {
    let mut den = BigUint::one();
    for (i, f) in p.labelings.iter().enumerate() {
        if f.label_count == 0 {
            if p.size > 0 {
                return Err(Error::EmptyLabelSet { index: i + 1 });
            }
            return Ok(BigRational::zero());
        }
        den *= big(f.label_count);
    }
    Ok(BigRational::new(p.enumeration_size().into(), den.into()))
}

/// Items whose label fiber has at least `#X / (2 #A)` members.
pub fn popular_filter<T, L, F>(items: &[T], f: F, label_count: usize) -> Vec<T>
where
    T: Clone,
    L: Hash + Eq,
    F: Fn(&T) -> L,
{
    let labels: Vec<L> = items.iter().map(&f).collect();
    let mut fibers: HashMap<&L, usize> = HashMap::new();
    for l in &labels {
        *fibers.entry(l).or_insert(0) += 1;
    }
    // fiber >= #X / (2 #A)  <=>  2 #A fiber >= #X
    items
        .iter()
        .zip(&labels)
        .filter(|(_, l)| 2 * label_count as u128 * fibers[l] as u128 >= items.len() as u128)
        .map(|(x, _)| x.clone())
        .collect()
}

/// [`popular_filter`] applied to the `index`-th labeling of a problem; returns item indices.
pub fn popular_items(p: &ChainProblem, index: usize) -> Vec<usize> {
    let f = &p.labelings[index];
    let items: Vec<usize> = (0..p.size).collect();
    popular_filter(&items, |&x| f.labels[x], f.label_count)
}

/// The problem over `X^m` whose labelings act coordinate-wise into `A_i^m`.
pub fn tensor_power(p: &ChainProblem, m: u32, cap: u64) -> Result<ChainProblem> {
    if m == 0 {
        return Err(Error::MalformedProblem("tensor power needs m >= 1".into()));
    }
    let needed = big(p.size).pow(m);
    check_cap(&needed, cap)?;
    let size = needed.to_usize().expect("bounded by cap");
    let labelings = p
        .labelings
        .iter()
        .map(|f| {
            let label_count = f.label_count.checked_pow(m).ok_or_else(|| Error::EnumerationCapExceeded {
                needed: format!("{}^{m} labels", f.label_count),
                cap,
            })?;
            let labels = (0..size)
                .map(|mut item| {
                    let mut label = 0;
                    let mut place = 1;
                    for _ in 0..m {
                        label += f.labels[item % p.size] * place;
                        place *= f.label_count;
                        item /= p.size;
                    }
                    label
                })
                .collect();
            Ok(Labeling { labels, label_count })
        })
        .collect::<Result<_>>()?;
    Ok(ChainProblem { size, labelings })
}

/// Outcome of checking the counting lemma on one problem.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub size: usize,
    pub n: usize,
    pub label_counts: Vec<usize>,
    pub dp_count: ExactInt,
    /// `None` when the direct enumeration exceeds the cap.
    pub naive_count: Option<ExactInt>,
    pub lower_bound: ExactRational,
    pub slack: ExactRational,
    pub holds: bool,
    pub counts_agree: bool,
}

pub fn verify_lemma(p: &ChainProblem, naive_cap: u64) -> Result<LemmaReport> {
    let dp = chain_count_dp(p);
    let naive = match chain_count_naive(p, naive_cap) {
        Ok(c) => Some(c),
        Err(Error::EnumerationCapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let bound = chain_lower_bound(p)?;
    let count = BigRational::from_integer(dp.clone().into());
    Ok(LemmaReport {
        size: p.size,
        n: p.labelings.len(),
        label_counts: p.labelings.iter().map(|f| f.label_count).collect(),
        counts_agree: naive.as_ref().is_none_or(|c| *c == dp),
        holds: count >= bound,
        slack: ExactRational(&count - &bound),
        lower_bound: ExactRational(bound),
        naive_count: naive.map(ExactInt::from),
        dp_count: dp.into(),
    })
}
