//! Search over digit patterns in `{0..K}^2` for the largest exponent
//! `ln #pairs / ln max_slice`.
//!
//! Patterns are visited depth-first, adding cells in lexicographic order.
//! Only canonical patterns (see [`canonicalize`]) are scored. Work is split
//! into independent subtrees keyed by the first two cells; each subtree
//! keeps its own incumbent, so the outcome does not depend on scheduling.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{pattern_stats, tensor_pattern, DigitPattern};
use crate::error::{Error, Result};

/// Exponents closer than this are treated as equal.
pub const EXPONENT_TOLERANCE: f64 = 1e-9;

/// Largest alphabet the bitmask representation supports: `(K+1)^2 <= 64`.
pub const MAX_ALPHABET: u32 = 7;

/// Largest alphabet for which exhaustive mode is accepted.
pub const MAX_EXHAUSTIVE_ALPHABET: u32 = 4;

const PROBE_NODES: u64 = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    BranchBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpec {
    /// Digits range over `0..=alphabet_max`.
    pub alphabet_max: u32,
    pub constrain_d: bool,
    pub mode: SearchMode,
    pub node_limit: u64,
    pub time_limit: Duration,
    /// When false, patterns are scored by `#Δ_1` instead of `#pairs`.
    pub require_difference_injective: bool,
    pub witness_cap: usize,
}

impl SearchSpec {
    pub fn new(alphabet_max: u32, constrain_d: bool, mode: SearchMode) -> Self {
        SearchSpec {
            alphabet_max,
            constrain_d,
            mode,
            node_limit: 1_000_000_000,
            time_limit: Duration::from_secs(300),
            require_difference_injective: true,
            witness_cap: 64,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphabet_max > MAX_ALPHABET {
            return Err(Error::InvalidSearchSpec(format!(
                "K = {} exceeds the supported {MAX_ALPHABET}",
                self.alphabet_max
            )));
        }
        if self.mode == SearchMode::Exhaustive && self.alphabet_max > MAX_EXHAUSTIVE_ALPHABET {
            return Err(Error::InvalidSearchSpec(format!(
                "exhaustive mode needs (K+1)^2 <= 25, got K = {}",
                self.alphabet_max
            )));
        }
        if self.node_limit == 0 || self.time_limit.is_zero() || self.witness_cap == 0 {
            return Err(Error::InvalidSearchSpec("budgets must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    /// 0 when no pattern has a defined exponent.
    pub best_exponent: f64,
    pub witnesses: Vec<DigitPattern>,
    pub exhaustive: bool,
    #[serde(rename = "nodes")]
    pub nodes_explored: u64,
}

/// Least pattern in the orbit under independent translations of the two
/// digit alphabets and the joint reflection `(x, y) -> (max_x - x, max_y - y)`.
pub fn canonicalize(p: &DigitPattern, k: u32) -> DigitPattern {
    debug_assert!(p.pairs().iter().all(|&(x, y)| x <= k && y <= k));
    let min_x = p.pairs().iter().map(|q| q.0).min().unwrap();
    let min_y = p.pairs().iter().map(|q| q.1).min().unwrap();
    let shifted: BTreeSet<(u32, u32)> = p.pairs().iter().map(|&(x, y)| (x - min_x, y - min_y)).collect();
    let max_x = shifted.iter().map(|q| q.0).max().unwrap();
    let max_y = shifted.iter().map(|q| q.1).max().unwrap();
    let reflected: BTreeSet<(u32, u32)> = shifted.iter().map(|&(x, y)| (max_x - x, max_y - y)).collect();
    let best = shifted.min(reflected);
    DigitPattern::new(best, p.constrain_d()).unwrap()
}

#[derive(Clone, Copy)]
struct Cell {
    x: u32,
    y: u32,
}

struct Space {
    k: u32,
    cells: Vec<Cell>,
    /// `later_diagonals[i]`: diagonals `x - y` that have a cell at index `>= i`.
    later_diagonals: Vec<u32>,
    ln: Vec<f64>,
    constrain_d: bool,
    require_di: bool,
    prune: bool,
    witness_cap: usize,
}

impl Space {
    fn new(spec: &SearchSpec) -> Self {
        let k = spec.alphabet_max;
        let cells: Vec<Cell> = (0..=k).flat_map(|x| (0..=k).map(move |y| Cell { x, y })).collect();
        let mut later_diagonals = vec![0u32; cells.len() + 1];
        for i in (0..cells.len()).rev() {
            later_diagonals[i] = later_diagonals[i + 1] | 1 << diagonal(k, cells[i]);
        }
        let ln = (0..=cells.len()).map(|i| (i as f64).ln()).collect();
        Space {
            k,
            cells,
            later_diagonals,
            ln,
            constrain_d: spec.constrain_d,
            require_di: spec.require_difference_injective,
            prune: spec.mode == SearchMode::BranchBound,
            witness_cap: spec.witness_cap,
        }
    }

    fn pattern(&self, cells: u64) -> Vec<(u32, u32)> {
        (0..self.cells.len()).filter(|&i| cells >> i & 1 == 1).map(|i| (self.cells[i].x, self.cells[i].y)).collect()
    }

    /// Upper bound on the score of any pattern containing this one whose
    /// extra cells come after `next`.
    fn bound(&self, st: &State, next: usize) -> f64 {
        let num = st.numerator(self.require_di);
        let reachable = num + (self.later_diagonals[next] & !st.delta).count_ones() as usize;
        let floor = st.max_slice(self.constrain_d).max(2);
        (num.max(2)..=reachable)
            .map(|p| self.ln[p] / self.ln[floor.max(ceil_sqrt(p))])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn diagonal(k: u32, c: Cell) -> u32 {
    c.x + k - c.y
}

fn ceil_sqrt(p: usize) -> usize {
    let mut r = (p as f64).sqrt() as usize;
    while r * r < p {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= p {
        r -= 1;
    }
    r
}

#[derive(Clone, Copy, Default)]
struct State {
    cells: u64,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
    delta: u32,
}

impl State {
    fn with(self, k: u32, cell: Cell, index: usize) -> State {
        State {
            cells: self.cells | 1 << index,
            a: self.a | 1 << cell.x,
            b: self.b | 1 << cell.y,
            c: self.c | 1 << (cell.x + cell.y),
            d: self.d | 1 << (cell.x + 2 * cell.y),
            delta: self.delta | 1 << diagonal(k, cell),
        }
    }

    fn numerator(&self, require_di: bool) -> usize {
        if require_di {
            self.cells.count_ones() as usize
        } else {
            self.delta.count_ones() as usize
        }
    }

    fn max_slice(&self, constrain_d: bool) -> usize {
        let mut m = self.a.count_ones().max(self.b.count_ones()).max(self.c.count_ones());
        if constrain_d {
            m = m.max(self.d.count_ones());
        }
        m as usize
    }
}

struct Budget {
    nodes: AtomicU64,
    limit: u64,
    deadline: Instant,
    exhausted: AtomicBool,
}

impl Budget {
    fn spend(&self) -> bool {
        let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.limit || (used.is_multiple_of(4096) && Instant::now() >= self.deadline) {
            self.exhausted.store(true, Ordering::Relaxed);
        }
        !self.exhausted.load(Ordering::Relaxed)
    }
}

type Witness = (usize, Vec<(u32, u32)>);

struct Local {
    /// Best score seen in this subtree.
    best: f64,
    /// Incumbent shared by all subtrees before they start.
    seed: f64,
    witnesses: BTreeSet<Witness>,
    nodes: u64,
}

impl Local {
    fn new(seed: f64) -> Self {
        Local { best: f64::NEG_INFINITY, seed, witnesses: BTreeSet::new(), nodes: 0 }
    }

    fn incumbent(&self) -> f64 {
        self.best.max(self.seed)
    }

    fn offer(&mut self, score: f64, pattern: Vec<(u32, u32)>, cap: usize) {
        if score > self.best + EXPONENT_TOLERANCE {
            self.witnesses.clear();
        }
        self.best = self.best.max(score);
        self.witnesses.insert((pattern.len(), pattern));
        if self.witnesses.len() > cap {
            self.witnesses.pop_last();
        }
    }
}

fn is_canonical(space: &Space, st: &State) -> bool {
    // Minimum first digit 0 is guaranteed by the choice of root cells.
    if st.b & 1 == 0 {
        return false;
    }
    let pattern = space.pattern(st.cells);
    let max_x = pattern.iter().map(|q| q.0).max().unwrap();
    let max_y = pattern.iter().map(|q| q.1).max().unwrap();
    let mut reflected: Vec<(u32, u32)> = pattern.iter().map(|&(x, y)| (max_x - x, max_y - y)).collect();
    reflected.sort_unstable();
    pattern <= reflected
}

fn visit(space: &Space, budget: &Budget, local: &mut Local, st: State, last: usize, expand: bool) {
    if !budget.spend() {
        return;
    }
    local.nodes += 1;
    let m = st.max_slice(space.constrain_d);
    if m >= 2 {
        let score = space.ln[st.numerator(space.require_di)] / space.ln[m];
        if score >= local.incumbent() - EXPONENT_TOLERANCE && is_canonical(space, &st) {
            local.offer(score, space.pattern(st.cells), space.witness_cap);
        }
    }
    if !expand || (space.prune && space.bound(&st, last + 1) < local.incumbent() - EXPONENT_TOLERANCE) {
        return;
    }
    for j in last + 1..space.cells.len() {
        let cell = space.cells[j];
        if space.require_di && st.delta >> diagonal(space.k, cell) & 1 == 1 {
            continue;
        }
        visit(space, budget, local, st.with(space.k, cell, j), j, true);
    }
}

/// Root subtrees: each canonical pattern starts with a cell `(0, y)`. A task
/// is either the one-cell pattern alone or a two-cell prefix with its subtree.
fn tasks(space: &Space) -> Vec<(usize, Option<usize>)> {
    let mut out = Vec::new();
    for first in (0..space.cells.len()).filter(|&i| space.cells[i].x == 0) {
        out.push((first, None));
        for second in first + 1..space.cells.len() {
            let (c1, c2) = (space.cells[first], space.cells[second]);
            if space.require_di && diagonal(space.k, c1) == diagonal(space.k, c2) {
                continue;
            }
            out.push((first, Some(second)));
        }
    }
    out
}

fn run_task(space: &Space, budget: &Budget, seed: f64, task: (usize, Option<usize>)) -> Local {
    let mut local = Local::new(seed);
    let (first, second) = task;
    let root = State::default().with(space.k, space.cells[first], first);
    match second {
        None => visit(space, budget, &mut local, root, first, false),
        Some(j) => visit(space, budget, &mut local, root.with(space.k, space.cells[j], j), j, true),
    }
    local
}

pub fn search(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    let space = Space::new(spec);
    let budget = Budget {
        nodes: AtomicU64::new(0),
        limit: spec.node_limit,
        deadline: Instant::now() + spec.time_limit,
        exhausted: AtomicBool::new(false),
    };

    // A short sequential probe gives every subtree the same starting incumbent.
    let mut seed = f64::NEG_INFINITY;
    let mut probe = None;
    if space.prune {
        let probe_budget = Budget {
            nodes: AtomicU64::new(0),
            limit: PROBE_NODES,
            deadline: budget.deadline,
            exhausted: AtomicBool::new(false),
        };
        let mut local = Local::new(seed);
        for first in (0..space.cells.len()).filter(|&i| space.cells[i].x == 0) {
            let root = State::default().with(space.k, space.cells[first], first);
            visit(&space, &probe_budget, &mut local, root, first, true);
        }
        seed = local.best - EXPONENT_TOLERANCE;
        probe = Some(local);
    }

    let mut results: Vec<Local> = tasks(&space).into_par_iter().map(|t| run_task(&space, &budget, seed, t)).collect();
    results.extend(probe);

    let best = results.iter().map(|l| l.best).fold(f64::NEG_INFINITY, f64::max);
    let mut witnesses: BTreeSet<Witness> = BTreeSet::new();
    for local in &results {
        if local.best >= best - EXPONENT_TOLERANCE {
            witnesses.extend(local.witnesses.iter().cloned());
        }
    }
    let exhaustive = !budget.exhausted.load(Ordering::Relaxed);
    let nodes_explored = results.iter().map(|l| l.nodes).sum::<u64>();
    if witnesses.is_empty() {
        return Ok(SearchResult { best_exponent: 0.0, witnesses: Vec::new(), exhaustive, nodes_explored });
    }
    let witnesses = witnesses
        .into_iter()
        .take(spec.witness_cap)
        .map(|(_, pairs)| DigitPattern::new(pairs, spec.constrain_d).unwrap())
        .collect();
    Ok(SearchResult { best_exponent: best, witnesses, exhaustive, nodes_explored })
}

/// Outcome of re-checking a search result independently of the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

/// Re-scores every witness from scratch, checks admissibility, and tensors
/// each witness to two digits to confirm the exponent through measured
/// cardinalities (`#Δ = num^2`, `max slice = den^2`).
pub fn certify(result: &SearchResult, spec: &SearchSpec) -> Certification {
    let mut diagnostics = Vec::new();
    if result.witnesses.is_empty() && result.best_exponent != 0.0 {
        diagnostics.push("no witnesses for a nonzero exponent".to_string());
    }
    for w in &result.witnesses {
        let mut fail = |msg: String| diagnostics.push(format!("{:?}: {msg}", w.pairs()));
        let w = w.clone().with_constrain_d(spec.constrain_d);
        if w.pairs().iter().any(|&(x, y)| x > spec.alphabet_max || y > spec.alphabet_max) {
            fail("digit outside the alphabet".into());
            continue;
        }
        if canonicalize(&w, spec.alphabet_max) != w {
            fail("not in canonical form".into());
        }
        let st = pattern_stats(&w);
        if spec.require_difference_injective && !st.difference_injective {
            fail("not difference-injective".into());
            continue;
        }
        let numerator = if spec.require_difference_injective { st.pairs } else { st.delta };
        let den = st.max_slice();
        if den < 2 {
            fail("exponent undefined".into());
            continue;
        }
        let exponent = (numerator as f64).ln() / (den as f64).ln();
        if (exponent - result.best_exponent).abs() > EXPONENT_TOLERANCE {
            fail(format!("exponent mismatch: {exponent} vs {}", result.best_exponent));
        }
        let (num, den) = (numerator as u128, den as u128);
        let within = if spec.constrain_d { num.pow(4) <= den.pow(7) } else { num.pow(6) <= den.pow(11) };
        if !within {
            fail("exponent exceeds the proven upper bound".into());
        }
        match tensor_pattern(&w, 2, Some(st.min_base), u64::MAX) {
            Err(e) => fail(format!("not admissible at base {}: {e}", st.min_base)),
            Ok(inst) => {
                let measured_num =
                    if spec.require_difference_injective { inst.g().len() } else { inst.differences().len() };
                let mut measured_den = inst.a().len().max(inst.b().len()).max(inst.sums().len());
                if spec.constrain_d {
                    measured_den = measured_den.max(inst.twice_sums().len());
                }
                if spec.require_difference_injective && inst.differences().len() != inst.g().len() {
                    fail("tensor square is not difference-injective".into());
                }
                if measured_num as u128 != num * num || measured_den as u128 != den * den {
                    fail(format!(
                        "tensor square measures {measured_num}/{measured_den}, expected {}/{}",
                        num * num,
                        den * den
                    ));
                }
            }
        }
    }
    Certification { ok: diagnostics.is_empty(), diagnostics }
}
