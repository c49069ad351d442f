//! The `(A, B, G)` data model and its projections under integer linear forms.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AmbientGroup, Elem};

/// The projection `(a, b) -> alpha*a + beta*b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    alpha: i64,
    beta: i64,
}

impl LinearForm {
    pub const SUM: LinearForm = LinearForm { alpha: 1, beta: 1 };
    pub const DIFFERENCE: LinearForm = LinearForm { alpha: 1, beta: -1 };
    pub const SUM_TWICE: LinearForm = LinearForm { alpha: 1, beta: 2 };
    pub const FIRST: LinearForm = LinearForm { alpha: 1, beta: 0 };
    pub const SECOND: LinearForm = LinearForm { alpha: 0, beta: 1 };

    pub fn new(alpha: i64, beta: i64) -> Result<Self> {
        if alpha == 0 && beta == 0 {
            return Err(Error::MalformedInstance("the zero form is not a projection".into()));
        }
        Ok(LinearForm { alpha, beta })
    }

    pub fn alpha(self) -> i64 {
        self.alpha
    }

    pub fn beta(self) -> i64 {
        self.beta
    }

    pub fn apply(self, group: AmbientGroup, a: Elem, b: Elem) -> Result<Elem> {
        group.add(group.scale(self.alpha, a)?, group.scale(self.beta, b)?)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}a{:+}b", self.alpha, self.beta)
    }
}

/// Finite sets `A`, `B` in an ambient group together with a relation `G ⊆ A × B`.
///
/// Sets are kept sorted so iteration order is canonical. The projections
/// under `a + b`, `a - b` and `a + 2b` are computed once on first use.
#[derive(Clone, Debug)]
pub struct Instance {
    group: AmbientGroup,
    a: BTreeSet<Elem>,
    b: BTreeSet<Elem>,
    g: BTreeSet<(Elem, Elem)>,
    sums: OnceLock<BTreeSet<Elem>>,
    differences: OnceLock<BTreeSet<Elem>>,
    twice_sums: OnceLock<BTreeSet<Elem>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.a == other.a && self.b == other.b && self.g == other.g
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(
        group: AmbientGroup,
        a: impl IntoIterator<Item = Elem>,
        b: impl IntoIterator<Item = Elem>,
        g: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<Self> {
        let a: BTreeSet<Elem> = a.into_iter().collect();
        let b: BTreeSet<Elem> = b.into_iter().collect();
        let g: BTreeSet<(Elem, Elem)> = g.into_iter().collect();
        if a.is_empty() || b.is_empty() {
            return Err(Error::MalformedInstance("A and B must be nonempty".into()));
        }
        if let Some(x) = a.iter().chain(&b).find(|&&x| !group.is_canonical(x)) {
            return Err(Error::MalformedInstance(format!("{x} is not a canonical element of {group}")));
        }
        if let Some((x, y)) = g.iter().find(|(x, y)| !a.contains(x) || !b.contains(y)) {
            return Err(Error::MalformedInstance(format!("pair ({x}, {y}) lies outside A x B")));
        }
        // Every standard projection must be representable.
        for &(x, y) in &g {
            for form in [LinearForm::SUM, LinearForm::DIFFERENCE, LinearForm::SUM_TWICE] {
                form.apply(group, x, y)
                    .map_err(|_| Error::InstanceTooLarge(format!("{form} overflows at ({x}, {y})")))?;
            }
        }
        Ok(Instance {
            group,
            a,
            b,
            g,
            sums: OnceLock::new(),
            differences: OnceLock::new(),
            twice_sums: OnceLock::new(),
        })
    }

    /// Builds an instance whose `A` and `B` are the coordinate projections of `g`.
    pub fn from_relation(group: AmbientGroup, g: impl IntoIterator<Item = (Elem, Elem)>) -> Result<Self> {
        let g: BTreeSet<(Elem, Elem)> = g.into_iter().collect();
        let a: Vec<Elem> = g.iter().map(|p| p.0).collect();
        let b: Vec<Elem> = g.iter().map(|p| p.1).collect();
        Self::new(group, a, b, g)
    }

    pub fn group(&self) -> AmbientGroup {
        self.group
    }

    pub fn a(&self) -> &BTreeSet<Elem> {
        &self.a
    }

    pub fn b(&self) -> &BTreeSet<Elem> {
        &self.b
    }

    pub fn g(&self) -> &BTreeSet<(Elem, Elem)> {
        &self.g
    }

    pub fn project(&self, form: LinearForm) -> Result<BTreeSet<Elem>> {
        self.g.iter().map(|&(a, b)| form.apply(self.group, a, b)).collect()
    }

    fn cached<'a>(&'a self, cell: &'a OnceLock<BTreeSet<Elem>>, form: LinearForm) -> &'a BTreeSet<Elem> {
        cell.get_or_init(|| self.project(form).expect("validated at construction"))
    }

    /// `C = {a + b}`.
    pub fn sums(&self) -> &BTreeSet<Elem> {
        self.cached(&self.sums, LinearForm::SUM)
    }

    /// `{a - b}`.
    pub fn differences(&self) -> &BTreeSet<Elem> {
        self.cached(&self.differences, LinearForm::DIFFERENCE)
    }

    /// `D = {a + 2b}`.
    pub fn twice_sums(&self) -> &BTreeSet<Elem> {
        self.cached(&self.twice_sums, LinearForm::SUM_TWICE)
    }

    pub fn is_difference_injective(&self) -> bool {
        self.differences().len() == self.g.len()
    }

    /// Number of partners of each `a` that occurs in `G`.
    pub fn degrees(&self) -> BTreeMap<Elem, usize> {
        let mut deg = BTreeMap::new();
        for &(a, _) in &self.g {
            *deg.entry(a).or_insert(0) += 1;
        }
        deg
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::MalformedInstance(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::MalformedInstance(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Named(String),
    Mod { r#mod: u64 },
}

/// On-disk form: `{"group": "Z" | {"mod": m}, "A": [...], "B": [...], "G": [[a, b], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub group: GroupSpec,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[serde(rename = "B")]
    pub b: Vec<i64>,
    #[serde(rename = "G")]
    pub g: Vec<[i64; 2]>,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        let group = match inst.group {
            AmbientGroup::Integers => GroupSpec::Named("Z".into()),
            AmbientGroup::IntegersMod(m) => GroupSpec::Mod { r#mod: m },
        };
        InstanceFile {
            group,
            a: inst.a.iter().map(|x| x.0).collect(),
            b: inst.b.iter().map(|x| x.0).collect(),
            g: inst.g.iter().map(|(x, y)| [x.0, y.0]).collect(),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let group = match file.group {
            GroupSpec::Named(ref s) if s == "Z" => AmbientGroup::Integers,
            GroupSpec::Named(s) => return Err(Error::MalformedInstance(format!("unknown group {s:?}"))),
            GroupSpec::Mod { r#mod } => {
                AmbientGroup::modulo(r#mod).map_err(|e| Error::MalformedInstance(e.to_string()))?
            }
        };
        let dup = |v: &[i64]| v.iter().collect::<HashSet<_>>().len() != v.len();
        if dup(&file.a) || dup(&file.b) {
            return Err(Error::MalformedInstance("A and B must not contain duplicates".into()));
        }
        Instance::new(
            group,
            file.a.into_iter().map(Elem),
            file.b.into_iter().map(Elem),
            file.g.into_iter().map(|[x, y]| (Elem(x), Elem(y))),
        )
    }
}

/// Cardinalities of the slices compared against a shared budget `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub sizes: BTreeMap<String, usize>,
    pub satisfied: BTreeMap<String, bool>,
}

impl HypothesisReport {
    pub fn all_satisfied(&self) -> bool {
        self.satisfied.values().all(|&ok| ok)
    }

    /// Human-readable list of the failed hypotheses.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.n as usize;
        if !self.satisfied["ab-card"] {
            out.push(format!("#A = {}, #B = {} exceed N = {n}", self.sizes["A"], self.sizes["B"]));
        }
        if !self.satisfied["c-card"] {
            out.push(format!("#C = {} exceeds N = {n}", self.sizes["C"]));
        }
        if self.satisfied.get("d-card") == Some(&false) {
            out.push(format!("#D = {} exceeds N = {n}", self.sizes["D"]));
        }
        out
    }
}

pub fn check_hypotheses(inst: &Instance, n: u64, with_d: bool) -> HypothesisReport {
    let budget = n as usize;
    let mut sizes = BTreeMap::new();
    sizes.insert("A".to_string(), inst.a.len());
    sizes.insert("B".to_string(), inst.b.len());
    sizes.insert("C".to_string(), inst.sums().len());
    let mut satisfied = BTreeMap::new();
    satisfied.insert("ab-card".to_string(), inst.a.len() <= budget && inst.b.len() <= budget);
    satisfied.insert("c-card".to_string(), inst.sums().len() <= budget);
    if with_d {
        sizes.insert("D".to_string(), inst.twice_sums().len());
        satisfied.insert("d-card".to_string(), inst.twice_sums().len() <= budget);
    }
    HypothesisReport { n, sizes, satisfied }
}

/// The smallest budget satisfying every tracked hypothesis.
pub fn natural_budget(inst: &Instance, with_d: bool) -> u64 {
    let mut n = inst.a.len().max(inst.b.len()).max(inst.sums().len());
    if with_d {
        n = n.max(inst.twice_sums().len());
    }
    n as u64
}

/// Keeps one pair per value of `a - b`: the lexicographically smallest.
/// `A` and `B` are left unchanged.
pub fn reduce_to_difference_injective(inst: &Instance) -> Instance {
    if inst.is_difference_injective() {
        return inst.clone();
    }
    let mut seen = HashSet::new();
    let g: Vec<(Elem, Elem)> = inst
        .g
        .iter()
        .copied()
        .filter(|&(a, b)| seen.insert(LinearForm::DIFFERENCE.apply(inst.group, a, b).expect("validated")))
        .collect();
    Instance::new(inst.group, inst.a.iter().copied(), inst.b.iter().copied(), g)
        .expect("a sub-relation of a valid instance is valid")
}
