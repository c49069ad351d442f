use std::collections::BTreeMap;
use std::time::Duration;

use arproj_core::chain::{verify_lemma, ChainProblem, Labeling, LemmaReport, DEFAULT_ENUMERATION_CAP};
use arproj_core::constructions::{pattern_stats, tensor_pattern, DigitPattern, PatternStats, DEFAULT_MATERIALIZE_CAP};
use arproj_core::instance::natural_budget;
use arproj_core::kakeya::{dimension_report, novelty_threshold, BoundKind, DimensionReport, Winner};
use arproj_core::proof::{verify_chain_4, verify_chain_6, ChainReport, DEFAULT_V_CAP};
use arproj_core::search::{certify, search as run_search, SearchMode, SearchSpec, MAX_EXHAUSTIVE_ALPHABET};
use arproj_core::{Elem, Error, Instance, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::output::{self, Format};
use crate::{
    AutoOr, ChainChoice, ConstructArgs, DimensionsArgs, Global, LemmaArgs, ModeChoice, SearchArgs, VerifyArgs, Which,
    EXIT_BUDGET, EXIT_FAIL,
};

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct ConstructReport {
    source: String,
    n: usize,
    #[serde(rename = "M")]
    base: i64,
    pattern: PatternStats,
    sizes: BTreeMap<&'static str, usize>,
    #[serde(rename = "N")]
    budget: u64,
    /// `ln #Δ / ln N`, absent when `N < 2`.
    exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct ConstructRow<'a> {
    source: &'a str,
    n: usize,
    #[serde(rename = "M")]
    base: i64,
    #[serde(rename = "A")]
    a: usize,
    #[serde(rename = "B")]
    b: usize,
    #[serde(rename = "C")]
    c: usize,
    #[serde(rename = "D")]
    d: Option<usize>,
    difference: usize,
    #[serde(rename = "G")]
    g: usize,
    #[serde(rename = "N")]
    budget: u64,
    exponent: Option<f64>,
}

pub fn construct(g: &Global, a: &ConstructArgs) -> Result<u8> {
    let (source, pattern) = match (a.which, &a.path) {
        (Which::Example1, None) => ("example1".to_string(), DigitPattern::example_one()),
        (Which::Example2, None) => ("example2".to_string(), DigitPattern::example_two()),
        (Which::PatternFile, Some(path)) => (path.display().to_string(), DigitPattern::load(path)?),
        (Which::PatternFile, None) => return Err(Error::InvalidPattern("pattern-file needs a path".into())),
        (_, Some(_)) => return Err(Error::InvalidPattern("a path is only accepted with pattern-file".into())),
    };
    let base = match a.base {
        AutoOr::Auto => pattern.min_base(),
        AutoOr::Value(m) => {
            i64::try_from(m).map_err(|_| Error::InvalidBase { base: i64::MAX, min: pattern.min_base() })?
        }
    };
    let inst = tensor_pattern(&pattern, a.n, Some(base), g.cap.unwrap_or(DEFAULT_MATERIALIZE_CAP))?;

    let with_d = pattern.constrain_d();
    let mut sizes = BTreeMap::new();
    sizes.insert("A", inst.a().len());
    sizes.insert("B", inst.b().len());
    sizes.insert("C", inst.sums().len());
    if with_d {
        sizes.insert("D", inst.twice_sums().len());
    }
    sizes.insert("difference", inst.differences().len());
    sizes.insert("G", inst.g().len());
    let budget = natural_budget(&inst, with_d);
    let exponent = (budget >= 2).then(|| round6((inst.differences().len() as f64).ln() / (budget as f64).ln()));

    if let Some(out) = &a.out {
        std::fs::write(out, inst.to_json() + "\n")?;
    }
    let report = ConstructReport {
        source,
        n: a.n,
        base,
        pattern: pattern_stats(&pattern),
        sizes,
        budget,
        exponent,
        instance_file: a.out.as_ref().map(|p| p.display().to_string()),
        instance: match (&a.out, g.output) {
            (None, Format::Json) => Some(serde_json::from_str(&inst.to_json())?),
            _ => None,
        },
    };

    match g.output {
        Format::Json => output::json(&report)?,
        Format::Csv => output::csv([ConstructRow {
            source: &report.source,
            n: report.n,
            base,
            a: report.sizes["A"],
            b: report.sizes["B"],
            c: report.sizes["C"],
            d: report.sizes.get("D").copied(),
            difference: report.sizes["difference"],
            g: report.sizes["G"],
            budget,
            exponent,
        }])?,
        Format::Text => {
            println!("{}  n = {}  M = {}", report.source, report.n, base);
            for (k, v) in &report.sizes {
                println!("  #{k:<11}{v}");
            }
            println!("  N          {budget}");
            match exponent {
                Some(e) => println!("  exponent   {e:.6}  (ln #difference / ln N)"),
                None => println!("  exponent   undefined (N < 2)"),
            }
            if let Some(f) = &report.instance_file {
                println!("instance written to {f}");
            }
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct InequalityRow<'a> {
    chain: u8,
    #[serde(rename = "N")]
    budget: u64,
    name: &'a str,
    relation: &'a str,
    lhs: String,
    rhs: String,
    slack: String,
    verdict: &'static str,
}

pub fn verify(g: &Global, a: &VerifyArgs) -> Result<u8> {
    let inst = Instance::load(&a.file)?;
    let cap = g.cap.unwrap_or(DEFAULT_V_CAP);
    let chains: &[u8] = match a.chain {
        ChainChoice::Six => &[6],
        ChainChoice::Four => &[4],
        ChainChoice::Both => &[6, 4],
    };
    let reports = chains
        .iter()
        .map(|&c| {
            let n = match a.budget {
                AutoOr::Auto => natural_budget(&inst, c == 4),
                AutoOr::Value(v) => v,
            };
            if c == 6 {
                verify_chain_6(&inst, n, cap)
            } else {
                verify_chain_4(&inst, n, cap)
            }
        })
        .collect::<Result<Vec<ChainReport>>>()?;

    match g.output {
        Format::Json => output::json(&reports)?,
        Format::Csv => output::csv(reports.iter().flat_map(|r| {
            r.inequalities.iter().map(move |i| InequalityRow {
                chain: r.chain,
                budget: r.n,
                name: &i.name,
                relation: &i.relation,
                lhs: i.lhs.to_string(),
                rhs: i.rhs.to_string(),
                slack: i.slack.to_string(),
                verdict: verdict(i.holds),
            })
        }))?,
        Format::Text => {
            for r in &reports {
                println!("chain {}  N = {}", r.chain, r.n);
                let sizes: Vec<String> = r.cardinalities.iter().map(|(k, v)| format!("#{k} = {v}")).collect();
                println!("  {}", sizes.join("  "));
                for i in &r.inequalities {
                    println!("  {}  {:<26}{:<26}{} <= {}", verdict(i.holds), i.name, i.relation, i.lhs, i.rhs);
                }
            }
        }
    }
    Ok(if reports.iter().all(ChainReport::all_hold) { 0 } else { EXIT_FAIL })
}

fn lemma_passes(r: &LemmaReport) -> bool {
    r.holds && r.counts_agree
}

#[derive(Serialize)]
struct LemmaRow {
    index: u64,
    size: usize,
    n: usize,
    dp_count: String,
    naive_count: String,
    lower_bound: String,
    slack: String,
    verdict: &'static str,
}

impl LemmaRow {
    fn new(index: u64, r: &LemmaReport) -> Self {
        LemmaRow {
            index,
            size: r.size,
            n: r.n,
            dp_count: r.dp_count.to_string(),
            naive_count: r.naive_count.as_ref().map_or_else(|| "skipped".into(), |c| c.to_string()),
            lower_bound: r.lower_bound.to_string(),
            slack: r.slack.to_string(),
            verdict: verdict(lemma_passes(r)),
        }
    }
}

#[derive(Serialize)]
struct LemmaSummary {
    seed: u64,
    problems: u64,
    passed: u64,
    naive_compared: u64,
    failures: Vec<u64>,
}

fn v_problem(inst: &Instance) -> Result<ChainProblem> {
    let items: Vec<(Elem, Elem)> = inst.g().iter().copied().collect();
    let labels: Vec<Elem> = inst.a().iter().copied().collect();
    let first = Labeling::from_fn(&items, &labels, |&(a, _)| a)?;
    ChainProblem::new(items.len(), vec![first])
}

pub fn lemma(g: &Global, a: &LemmaArgs) -> Result<u8> {
    let cap = g.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    if let Some(count) = a.random {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        let reports = (0..count)
            .map(|_| {
                let p = ChainProblem::random(&mut rng, a.max_size as usize, a.max_maps as usize, a.max_labels as usize);
                verify_lemma(&p, cap)
            })
            .collect::<Result<Vec<_>>>()?;
        let summary = LemmaSummary {
            seed: g.seed,
            problems: count,
            passed: reports.iter().filter(|r| lemma_passes(r)).count() as u64,
            naive_compared: reports.iter().filter(|r| r.naive_count.is_some()).count() as u64,
            failures: (0..count).filter(|&i| !lemma_passes(&reports[i as usize])).collect(),
        };
        match g.output {
            Format::Json => output::json(&summary)?,
            Format::Csv => output::csv(reports.iter().enumerate().map(|(i, r)| LemmaRow::new(i as u64, r)))?,
            Format::Text => {
                println!(
                    "{}/{} PASS  (seed {}, naive count compared on {})",
                    summary.passed, summary.problems, summary.seed, summary.naive_compared
                );
                for i in &summary.failures {
                    println!("  FAIL  problem {i}");
                }
            }
        }
        return Ok(if summary.failures.is_empty() { 0 } else { EXIT_FAIL });
    }

    let problem = match (&a.file, &a.from_instance) {
        (Some(path), _) => ChainProblem::load(path)?,
        (None, Some(path)) => v_problem(&Instance::load(path)?)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    let r = verify_lemma(&problem, cap)?;
    match g.output {
        Format::Json => output::json(&r)?,
        Format::Csv => output::csv([LemmaRow::new(0, &r)])?,
        Format::Text => {
            let row = LemmaRow::new(0, &r);
            println!("#X = {}  n = {}  label sets {:?}", r.size, r.n, r.label_counts);
            println!("  chain count   {}", row.dp_count);
            println!("  naive count   {}", row.naive_count);
            println!("  lower bound   {}", row.lower_bound);
            println!("  slack         {}", row.slack);
            println!("{}", row.verdict);
        }
    }
    Ok(if lemma_passes(&r) { 0 } else { EXIT_FAIL })
}

#[derive(Serialize)]
struct SearchRow {
    best_exponent: f64,
    witnesses: usize,
    exhaustive: bool,
    nodes: u64,
    certified: bool,
}

fn show_pattern(p: &DigitPattern) -> String {
    let cells: Vec<String> = p.pairs().iter().map(|(x, y)| format!("({x},{y})")).collect();
    format!("{{{}}}", cells.join(","))
}

pub fn search(g: &Global, a: &SearchArgs) -> Result<u8> {
    let mode = match a.mode {
        Some(ModeChoice::Exhaustive) => SearchMode::Exhaustive,
        Some(ModeChoice::BranchBound) => SearchMode::BranchBound,
        None if a.k <= MAX_EXHAUSTIVE_ALPHABET => SearchMode::Exhaustive,
        None => SearchMode::BranchBound,
    };
    let mut spec = SearchSpec::new(a.k, a.constrain_d, mode);
    if let Some(n) = a.node_budget {
        spec.node_limit = n;
    }
    if let Some(t) = a.time_budget {
        spec.time_limit = Duration::from_secs(t);
    }
    if let Some(w) = a.witness_cap {
        spec.witness_cap = w as usize;
    }
    spec.require_difference_injective = !a.allow_non_injective;

    let result = run_search(&spec)?;
    let cert = certify(&result, &spec);
    if let Some(out) = &a.out {
        output::write_json(out, &result)?;
    }
    match g.output {
        Format::Json => output::json(&result)?,
        Format::Csv => output::csv([SearchRow {
            best_exponent: round6(result.best_exponent),
            witnesses: result.witnesses.len(),
            exhaustive: result.exhaustive,
            nodes: result.nodes_explored,
            certified: cert.ok,
        }])?,
        Format::Text => {
            println!("K = {}  constrain_d = {}  mode = {:?}", a.k, a.constrain_d, mode);
            println!("  best exponent  {:.6}", result.best_exponent);
            println!("  witnesses      {}", result.witnesses.len());
            println!("  exhaustive     {}", result.exhaustive);
            println!("  nodes          {}", result.nodes_explored);
            println!("  certified      {}", cert.ok);
            for d in &cert.diagnostics {
                println!("    {d}");
            }
            for w in &result.witnesses {
                println!("  {}", show_pattern(w));
            }
        }
    }
    Ok(if !cert.ok {
        EXIT_FAIL
    } else if !result.exhaustive {
        EXIT_BUDGET
    } else {
        0
    })
}

#[derive(Serialize)]
struct Thresholds {
    minkowski: i64,
    hausdorff: i64,
}

#[derive(Serialize)]
struct DimensionTable {
    rows: Vec<DimensionReport>,
    novelty_from: Thresholds,
}

fn winner_name(w: Winner) -> &'static str {
    match w {
        Winner::New => "new",
        Winner::Wolff => "wolff",
        Winner::Equal => "equal",
    }
}

pub fn dimensions(g: &Global, a: &DimensionsArgs) -> Result<u8> {
    if a.n_max < a.n_min {
        return Err(Error::InvalidDimension(a.n_max));
    }
    let rows = (a.n_min..=a.n_max).map(dimension_report).collect::<Result<Vec<_>>>()?;
    let table = DimensionTable {
        rows,
        novelty_from: Thresholds {
            minkowski: novelty_threshold(BoundKind::Minkowski),
            hausdorff: novelty_threshold(BoundKind::Hausdorff),
        },
    };
    match g.output {
        Format::Json => output::json(&table)?,
        Format::Csv => output::csv(&table.rows)?,
        Format::Text => {
            println!(
                "{:>4}  {:>10}  {:>10}  {:>6}  {:>14}  {:>14}",
                "n", "minkowski", "hausdorff", "wolff", "best_minkowski", "best_hausdorff"
            );
            for r in &table.rows {
                println!(
                    "{:>4}  {:>10}  {:>10}  {:>6}  {:>14}  {:>14}",
                    r.n,
                    r.minkowski.to_string(),
                    r.hausdorff.to_string(),
                    r.wolff.to_string(),
                    winner_name(r.best_minkowski),
                    winner_name(r.best_hausdorff)
                );
            }
            println!("minkowski bound beats wolff from n = {}", table.novelty_from.minkowski);
            println!("hausdorff bound beats wolff from n = {}", table.novelty_from.hausdorff);
        }
    }
    Ok(0)
}
