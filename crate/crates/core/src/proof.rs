//! The sets `V`, `S`, `T`, the maps `f_1..f_4`, `g`, `h`, their explicit
//! inverses, and the inequality chains bounding `#G` by `N^(11/6)` and `N^(7/4)`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::chain::{chain_count_dp, ChainProblem, Labeling};
use crate::error::{Error, Result};
use crate::exact::{big, ExactInt, ExactRational};
use crate::group::{AmbientGroup, Elem};
use crate::instance::{check_hypotheses, reduce_to_difference_injective, Instance};

/// Default limit on `#V`, and on `#S`/`#T` when they are enumerated explicitly.
pub const DEFAULT_V_CAP: u64 = 10_000_000;

/// `v = (a, b, b')` with `(a, b)` and `(a, b')` both in `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triple {
    pub a: Elem,
    pub b: Elem,
    pub b_prime: Elem,
}

impl Triple {
    pub fn new(a: Elem, b: Elem, b_prime: Elem) -> Self {
        Triple { a, b, b_prime }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.b_prime)
    }
}

fn cap_error(needed: impl ToString, cap: u64) -> Error {
    Error::EnumerationCapExceeded { needed: needed.to_string(), cap }
}

/// `#V = sum over a of deg(a)^2`, without building `V`.
pub fn v_size(inst: &Instance) -> BigUint {
    inst.degrees().values().map(|&d| big(d) * big(d)).sum()
}

pub fn build_v(inst: &Instance, cap: u64) -> Result<Vec<Triple>> {
    let size = v_size(inst);
    if size > big(cap) {
        return Err(cap_error(size, cap));
    }
    let mut partners: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
    for &(a, b) in inst.g() {
        partners.entry(a).or_default().push(b);
    }
    Ok(partners
        .into_iter()
        .flat_map(|(a, bs)| {
            let bs2 = bs.clone();
            bs.into_iter().flat_map(move |b| bs2.clone().into_iter().map(move |bp| Triple::new(a, b, bp)))
        })
        .collect())
}

/// Positions of the elements of a sorted set.
struct Indexer(HashMap<Elem, usize>);

impl Indexer {
    fn new(set: &BTreeSet<Elem>) -> Self {
        Indexer(set.iter().enumerate().map(|(i, &x)| (x, i)).collect())
    }

    fn len(&self) -> usize {
        self.0.len()
    }

    fn pair(&self, other: &Indexer, x: Elem, y: Elem) -> usize {
        self.0[&x] * other.len() + other.0[&y]
    }
}

fn sum(g: AmbientGroup, x: Elem, y: Elem) -> Elem {
    g.add(x, y).expect("sums of instance pairs were validated")
}

fn twice_sum(g: AmbientGroup, x: Elem, y: Elem) -> Elem {
    sum(g, x, sum(g, y, y))
}

/// Labelings of `V` by `f_1 = (a+b, a+b')`, `f_2 = (b, b')`, `f_3 = (a+b, b')`
/// into `C×C`, `B×B`, `C×B`.
pub fn s_problem(inst: &Instance, v: &[Triple]) -> ChainProblem {
    let g = inst.group();
    let c = Indexer::new(inst.sums());
    let b = Indexer::new(inst.b());
    let f1 = v.iter().map(|t| c.pair(&c, sum(g, t.a, t.b), sum(g, t.a, t.b_prime))).collect();
    let f2 = v.iter().map(|t| b.pair(&b, t.b, t.b_prime)).collect();
    let f3 = v.iter().map(|t| c.pair(&b, sum(g, t.a, t.b), t.b_prime)).collect();
    let labelings = vec![
        Labeling::new(f1, c.len() * c.len()).expect("indices in range"),
        Labeling::new(f2, b.len() * b.len()).expect("indices in range"),
        Labeling::new(f3, c.len() * b.len()).expect("indices in range"),
    ];
    ChainProblem::new(v.len(), labelings).expect("labelings cover V")
}

/// Labeling of `V` by `f_4 = (a+2b, b')` into `D×B`.
pub fn t_problem(inst: &Instance, v: &[Triple]) -> ChainProblem {
    let g = inst.group();
    let d = Indexer::new(inst.twice_sums());
    let b = Indexer::new(inst.b());
    let f4 = v.iter().map(|t| d.pair(&b, twice_sum(g, t.a, t.b), t.b_prime)).collect();
    let labeling = Labeling::new(f4, d.len() * b.len()).expect("indices in range");
    ChainProblem::new(v.len(), vec![labeling]).expect("labeling covers V")
}

pub fn count_s(inst: &Instance, cap: u64) -> Result<BigUint> {
    let v = build_v(inst, cap)?;
    Ok(chain_count_dp(&s_problem(inst, &v)))
}

pub fn count_t(inst: &Instance, cap: u64) -> Result<BigUint> {
    let v = build_v(inst, cap)?;
    Ok(chain_count_dp(&t_problem(inst, &v)))
}

fn fibers(labels: &[usize]) -> HashMap<usize, Vec<usize>> {
    let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, &l) in labels.iter().enumerate() {
        out.entry(l).or_default().push(i);
    }
    out
}

/// Every element of `S`, by walking the fibers of `f_1`, `f_2`, `f_3`.
pub fn enumerate_s(inst: &Instance, cap: u64) -> Result<Vec<[Triple; 4]>> {
    let v = build_v(inst, cap)?;
    let p = s_problem(inst, &v);
    let total = chain_count_dp(&p);
    if total > big(cap) {
        return Err(cap_error(total, cap));
    }
    let [f1, f2, f3] = [0, 1, 2].map(|i| p.labelings()[i].labels());
    let [fib1, fib2, fib3] = [f1, f2, f3].map(fibers);
    let mut out = Vec::with_capacity(total.to_usize().unwrap_or(0));
    for i0 in 0..v.len() {
        for &i1 in &fib1[&f1[i0]] {
            for &i2 in &fib2[&f2[i1]] {
                for &i3 in &fib3[&f3[i2]] {
                    out.push([v[i0], v[i1], v[i2], v[i3]]);
                }
            }
        }
    }
    Ok(out)
}

/// Every element of `T`, pairs of triples in a common `f_4` fiber.
pub fn enumerate_t(inst: &Instance, cap: u64) -> Result<Vec<[Triple; 2]>> {
    let v = build_v(inst, cap)?;
    let p = t_problem(inst, &v);
    let total = chain_count_dp(&p);
    if total > big(cap) {
        return Err(cap_error(total, cap));
    }
    let f4 = p.labelings()[0].labels();
    let fib = fibers(f4);
    let mut out = Vec::with_capacity(total.to_usize().unwrap_or(0));
    for i0 in 0..v.len() {
        for &i1 in &fib[&f4[i0]] {
            out.push([v[i0], v[i1]]);
        }
    }
    Ok(out)
}

/// `g(v_0, v_1, v_2, v_3) = (v_0, a_2, b_3)`.
pub fn map_g(s: &[Triple; 4]) -> (Triple, Elem, Elem) {
    (s[0], s[2].a, s[3].b)
}

/// `h(v_0, v_1) = (a_0 + b_0, a_0 + b'_0, b_1)`.
pub fn map_h(group: AmbientGroup, t: &[Triple; 2]) -> (Elem, Elem, Elem) {
    (sum(group, t[0].a, t[0].b), sum(group, t[0].a, t[0].b_prime), t[1].b)
}

/// Read-only lookup from a difference `a - b` to the unique pair of `G` realizing it.
pub struct DifferenceIndex<'a> {
    inst: &'a Instance,
    by_difference: HashMap<Elem, (Elem, Elem)>,
    members: HashSet<(Elem, Elem)>,
}

impl<'a> DifferenceIndex<'a> {
    pub fn new(inst: &'a Instance) -> Result<Self> {
        let group = inst.group();
        let mut by_difference = HashMap::with_capacity(inst.g().len());
        for &(a, b) in inst.g() {
            if by_difference.insert(group.sub(a, b)?, (a, b)).is_some() {
                return Err(Error::NotDifferenceInjective);
            }
        }
        Ok(DifferenceIndex { inst, by_difference, members: inst.g().iter().copied().collect() })
    }

    pub fn lookup(&self, difference: Elem) -> Option<(Elem, Elem)> {
        self.by_difference.get(&difference).copied()
    }

    fn check_members(&self, pairs: &[(Elem, Elem)]) -> Result<()> {
        match pairs.iter().find(|p| !self.members.contains(p)) {
            Some((a, b)) => Err(Error::NoPreimage(format!("({a}, {b}) is not in G"))),
            None => Ok(()),
        }
    }

    /// Recovers `(v_0, v_1, v_2, v_3)` from `(v_0, a_2, b_3)`.
    pub fn reconstruct_from_g(&self, v0: Triple, a2: Elem, b3: Elem) -> Result<[Triple; 4]> {
        let g = self.inst.group();
        // a_3 - b'_3 = a_2 - b_3 + b_0 - b'_0
        let delta = g.add(g.sub(a2, b3)?, g.sub(v0.b, v0.b_prime)?)?;
        let (a3, b3p) =
            self.lookup(delta).ok_or_else(|| Error::NoPreimage(format!("difference {delta} is not realized by G")))?;
        let b2p = b3p;
        let b2 = g.sub(g.add(a3, b3)?, a2)?;
        let (b1, b1p) = (b2, b2p);
        let a1 = g.sub(g.add(v0.a, v0.b)?, b1)?;
        if g.add(v0.a, v0.b_prime)? != g.add(a1, b1p)? {
            return Err(Error::NoPreimage("a_0 + b'_0 != a_1 + b'_1".into()));
        }
        self.check_members(&[
            (v0.a, v0.b),
            (v0.a, v0.b_prime),
            (a1, b1),
            (a1, b1p),
            (a2, b2),
            (a2, b2p),
            (a3, b3),
            (a3, b3p),
        ])?;
        Ok([v0, Triple::new(a1, b1, b1p), Triple::new(a2, b2, b2p), Triple::new(a3, b3, b3p)])
    }

    /// Recovers `(v_0, v_1)` from `(a_0 + b_0, a_0 + b'_0, b_1)`.
    pub fn reconstruct_from_h(&self, c1: Elem, c2: Elem, b1: Elem) -> Result<[Triple; 2]> {
        let g = self.inst.group();
        // a_1 - b'_1 = 2(a_0 + b_0) - 2 b_1 - (a_0 + b'_0)
        let delta = g.sub(g.sub(g.scale(2, c1)?, g.scale(2, b1)?)?, c2)?;
        let (a1, b1p) =
            self.lookup(delta).ok_or_else(|| Error::NoPreimage(format!("difference {delta} is not realized by G")))?;
        let b0p = b1p;
        let a0 = g.sub(g.scale(2, c1)?, g.add(a1, g.scale(2, b1)?)?)?;
        let b0 = g.sub(c1, a0)?;
        if g.add(a0, b0p)? != c2 {
            return Err(Error::NoPreimage("a_0 + b'_0 does not match".into()));
        }
        self.check_members(&[(a0, b0), (a0, b0p), (a1, b1), (a1, b1p)])?;
        Ok([Triple::new(a0, b0, b0p), Triple::new(a1, b1, b1p)])
    }
}

pub fn reconstruct_from_g(inst: &Instance, v0: Triple, a2: Elem, b3: Elem) -> Result<[Triple; 4]> {
    DifferenceIndex::new(inst)?.reconstruct_from_g(v0, a2, b3)
}

pub fn reconstruct_from_h(inst: &Instance, c1: Elem, c2: Elem, b1: Elem) -> Result<[Triple; 2]> {
    DifferenceIndex::new(inst)?.reconstruct_from_h(c1, c2, b1)
}

/// One checked relation `lhs <= rhs`.
#[derive(Clone, Debug, Serialize)]
pub struct Inequality {
    pub name: String,
    /// The relation in the form actually compared, e.g. `#V^3 <= N^8`.
    pub relation: String,
    pub lhs: ExactRational,
    pub rhs: ExactRational,
    pub holds: bool,
    /// `rhs - lhs`.
    pub slack: ExactRational,
}

impl Inequality {
    fn new(name: &str, relation: &str, lhs: BigRational, rhs: BigRational) -> Self {
        Inequality {
            name: name.into(),
            relation: relation.into(),
            holds: lhs <= rhs,
            slack: ExactRational(&rhs - &lhs),
            lhs: ExactRational(lhs),
            rhs: ExactRational(rhs),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    /// 6 for the `N^(11/6)` chain, 4 for the `N^(7/4)` chain.
    pub chain: u8,
    #[serde(rename = "N")]
    pub n: u64,
    pub cardinalities: BTreeMap<String, ExactInt>,
    pub inequalities: Vec<Inequality>,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.inequalities.iter().all(|i| i.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Inequality> {
        self.inequalities.iter().filter(|i| !i.holds)
    }
}

fn q(x: impl Into<BigUint>) -> BigRational {
    BigRational::from_integer(x.into().into())
}

// An empty G gives empty slices; the bound is then vacuously zero.
fn frac(num: BigUint, den: BigUint) -> BigRational {
    if den.is_zero() {
        BigRational::zero()
    } else {
        q(num) / q(den)
    }
}

fn reduced_with_hypotheses(inst: &Instance, n: u64, with_d: bool) -> Result<Instance> {
    if n == 0 {
        return Err(Error::HypothesisViolated("N must be at least 1".into()));
    }
    let reduced = reduce_to_difference_injective(inst);
    let report = check_hypotheses(&reduced, n, with_d);
    if !report.all_satisfied() {
        return Err(Error::HypothesisViolated(report.violations().join("; ")));
    }
    Ok(reduced)
}

fn base_cardinalities(inst: &Instance) -> BTreeMap<String, ExactInt> {
    let mut out = BTreeMap::new();
    out.insert("G".into(), ExactInt::from(inst.g().len() as u64));
    out.insert("A".into(), ExactInt::from(inst.a().len() as u64));
    out.insert("B".into(), ExactInt::from(inst.b().len() as u64));
    out.insert("C".into(), ExactInt::from(inst.sums().len() as u64));
    out
}

/// Checks `#V >= #G^2/N`, `#S >= #V^4/N^6`, `#S <= N^2 #V`, `#V <= N^(8/3)`
/// and `#G <= N^(11/6)` on the difference-injective reduction of `inst`,
/// plus the sharper lemma bounds using actual slice sizes.
pub fn verify_chain_6(inst: &Instance, n: u64, cap: u64) -> Result<ChainReport> {
    let inst = reduced_with_hypotheses(inst, n, false)?;
    let v = build_v(&inst, cap)?;
    let s = chain_count_dp(&s_problem(&inst, &v));
    let (g_len, v_len) = (big(inst.g().len()), big(v.len()));
    let (a_len, b_len, c_len) = (big(inst.a().len()), big(inst.b().len()), big(inst.sums().len()));
    let budget = big(n);

    let mut cardinalities = base_cardinalities(&inst);
    cardinalities.insert("V".into(), v_len.clone().into());
    cardinalities.insert("S".into(), s.clone().into());

    let inequalities = vec![
        Inequality::new("v-card", "#G^2/N <= #V", q(g_len.pow(2)) / q(n), q(v_len.clone())),
        Inequality::new("v-card (actual #A)", "#G^2/#A <= #V", q(g_len.pow(2)) / q(a_len.clone()), q(v_len.clone())),
        Inequality::new("s-card", "#V^4/N^6 <= #S", q(v_len.pow(4)) / q(budget.pow(6)), q(s.clone())),
        Inequality::new(
            "s-card (actual slices)",
            "#V^4/(#C^3 #B^3) <= #S",
            frac(v_len.pow(4), c_len.pow(3) * b_len.pow(3)),
            q(s.clone()),
        ),
        Inequality::new("s-upper", "#S <= N^2 #V", q(s.clone()), q(budget.pow(2) * &v_len)),
        Inequality::new("s-upper (actual slices)", "#S <= #V #A #B", q(s), q(&v_len * &a_len * &b_len)),
        Inequality::new("v-upper", "#V^3 <= N^8", q(v_len.pow(3)), q(budget.pow(8))),
        Inequality::new("11-6", "#G^6 <= N^11", q(g_len.pow(6)), q(budget.pow(11))),
    ];
    Ok(ChainReport { chain: 6, n, cardinalities, inequalities })
}

/// Checks `#V >= #G^2/N`, `#T >= #V^2/N^2`, `#T <= N^3`, `#V <= N^(5/2)`
/// and `#G <= N^(7/4)` on the difference-injective reduction of `inst`.
pub fn verify_chain_4(inst: &Instance, n: u64, cap: u64) -> Result<ChainReport> {
    let inst = reduced_with_hypotheses(inst, n, true)?;
    let v = build_v(&inst, cap)?;
    let t = chain_count_dp(&t_problem(&inst, &v));
    let (g_len, v_len) = (big(inst.g().len()), big(v.len()));
    let (a_len, b_len, c_len, d_len) =
        (big(inst.a().len()), big(inst.b().len()), big(inst.sums().len()), big(inst.twice_sums().len()));
    let budget = big(n);

    let mut cardinalities = base_cardinalities(&inst);
    cardinalities.insert("D".into(), d_len.clone().into());
    cardinalities.insert("V".into(), v_len.clone().into());
    cardinalities.insert("T".into(), t.clone().into());

    let inequalities = vec![
        Inequality::new("v-card", "#G^2/N <= #V", q(g_len.pow(2)) / q(n), q(v_len.clone())),
        Inequality::new("v-card (actual #A)", "#G^2/#A <= #V", q(g_len.pow(2)) / q(a_len), q(v_len.clone())),
        Inequality::new("t-card", "#V^2/N^2 <= #T", q(v_len.pow(2)) / q(budget.pow(2)), q(t.clone())),
        Inequality::new(
            "t-card (actual slices)",
            "#V^2/(#D #B) <= #T",
            frac(v_len.pow(2), &d_len * &b_len),
            q(t.clone()),
        ),
        Inequality::new("t-upper", "#T <= N^3", q(t.clone()), q(budget.pow(3))),
        Inequality::new("t-upper (actual slices)", "#T <= #C^2 #B", q(t), q(c_len.pow(2) * &b_len)),
        Inequality::new("v-upper", "#V^2 <= N^5", q(v_len.pow(2)), q(budget.pow(5))),
        Inequality::new("targ-4", "#G^4 <= N^7", q(g_len.pow(4)), q(budget.pow(7))),
    ];
    Ok(ChainReport { chain: 4, n, cardinalities, inequalities })
}
