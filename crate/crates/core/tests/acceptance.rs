//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::panic;
use std::time::{Duration, Instant};

use arproj_core::chain::{chain_count_dp, chain_count_naive, popular_items, tensor_power, verify_lemma, ChainProblem};
use arproj_core::constructions::{build_example_one, build_example_two, pattern_stats, DigitPattern};
use arproj_core::instance::{check_hypotheses, reduce_to_difference_injective};
use arproj_core::kakeya::{dimension_report, novelty_threshold, BoundKind, Rational, Winner};
use arproj_core::proof::{
    enumerate_s, enumerate_t, map_g, map_h, reconstruct_from_g, reconstruct_from_h, verify_chain_4, verify_chain_6,
    Triple, DEFAULT_V_CAP,
};
use arproj_core::sampling::random_instance;
use arproj_core::search::{canonicalize, certify, search, SearchMode, SearchSpec};
use arproj_core::{Elem, Instance};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn pow(x: usize, e: u32) -> BigUint {
    BigUint::from(x).pow(e)
}

/// Slice sizes straight from the pairs: `[#A, #B, #C, #D, #{a-b}, #G]`.
fn measured(inst: &Instance) -> [usize; 6] {
    let g = inst.g();
    let a: BTreeSet<i64> = g.iter().map(|p| p.0 .0).collect();
    let b: BTreeSet<i64> = g.iter().map(|p| p.1 .0).collect();
    let c: BTreeSet<i64> = g.iter().map(|p| p.0 .0 + p.1 .0).collect();
    let d: BTreeSet<i64> = g.iter().map(|p| p.0 .0 + 2 * p.1 .0).collect();
    let diff: BTreeSet<i64> = g.iter().map(|p| p.0 .0 - p.1 .0).collect();
    [a.len(), b.len(), c.len(), d.len(), diff.len(), g.len()]
}

fn example_one_fidelity() -> Outcome {
    let start = Instant::now();
    for n in 1..=6u32 {
        let inst = build_example_one(n as usize, 7).map_err(err)?;
        let [a, b, c, _, diff, g] = measured(&inst);
        let (three, six) = (3usize.pow(n), 6usize.pow(n));
        ensure(inst.a().len() == a && inst.b().len() == b, || format!("n = {n}: A or B has unused elements"))?;
        ensure([a, b, c, g, diff] == [three, three, three, six, six], || {
            format!("n = {n}: #A, #B, #C, #G, #diff = {:?}", [a, b, c, g, diff])
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:.2?}"))?;
    Ok(format!("#A = #B = #C = 3^n, #G = #diff = 6^n for n = 1..6 in {elapsed:.2?}"))
}

fn example_two_fidelity() -> Outcome {
    for n in 1..=4u32 {
        let inst = build_example_two(n as usize, 9).map_err(err)?;
        let [a, b, c, d, diff, g] = measured(&inst);
        let (four, eight) = (4usize.pow(n), 8usize.pow(n));
        ensure([a, b, c, d, g, diff] == [four, four, four, four, eight, eight], || {
            format!("n = {n}: #A, #B, #C, #D, #G, #diff = {:?}", [a, b, c, d, g, diff])
        })?;
    }
    Ok("#A = #B = #C = #D = 4^n, #G = #diff = 8^n for n = 1..4".into())
}

fn random_chains() -> Outcome {
    const COUNT: usize = 1000;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut best: f64 = 0.0;
    for (chain, with_d) in [(6u32, false), (4, true)] {
        for i in 0..COUNT {
            let (inst, n) = random_instance(&mut rng, 12, with_d);
            ensure(inst.a().len() <= 12 && inst.b().len() <= 12, || format!("instance {i} is too large"))?;
            ensure(check_hypotheses(&inst, n, with_d).all_satisfied(), || {
                format!("instance {i} breaks the hypotheses")
            })?;
            let report =
                if with_d { verify_chain_4(&inst, n, DEFAULT_V_CAP) } else { verify_chain_6(&inst, n, DEFAULT_V_CAP) }
                    .map_err(|e| format!("chain {chain}, instance {i}: {e}"))?;
            let failed: Vec<&str> = report.failures().map(|f| f.name.as_str()).collect();
            ensure(failed.is_empty(), || format!("chain {chain}, instance {i}: {failed:?}"))?;
            // The end result, recomputed from the difference set itself.
            let diff = inst.differences().len();
            let (q, p) = if with_d { (4, 7) } else { (6, 11) };
            ensure(pow(diff, q) <= pow(n as usize, p), || {
                format!("chain {chain}, instance {i}: #diff = {diff}, N = {n}")
            })?;
            if n >= 2 {
                best = best.max((diff as f64).ln() / (n as f64).ln());
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.2?}"))?;
    Ok(format!("{COUNT} instances per chain, all inequalities hold, max ln #diff / ln N = {best:.4}, {elapsed:.2?}"))
}

fn lemma_suite() -> Outcome {
    const COUNT: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    for i in 0..COUNT {
        let p = ChainProblem::random(&mut rng, 10, 4, 8);
        let dp = chain_count_dp(&p);
        if p.enumeration_size() <= BigUint::from(1_000_000u32) {
            let naive = chain_count_naive(&p, 1_000_000).map_err(err)?;
            ensure(naive == dp, || format!("problem {i}: dp {dp} != naive {naive}"))?;
            compared += 1;
        }
        // count * prod #A_i >= #X^(n+1)
        let prod: BigUint = p.labelings().iter().map(|f| BigUint::from(f.label_count())).product();
        ensure(&dp * prod >= p.enumeration_size(), || format!("problem {i}: count {dp} below the bound"))?;
        ensure(verify_lemma(&p, 1_000_000).map_err(err)?.holds, || format!("problem {i}: report disagrees"))?;
        for j in 0..p.len() {
            let kept = popular_items(&p, j).len();
            ensure(2 * kept >= p.size(), || format!("problem {i}, map {j}: kept {kept} of {}", p.size()))?;
        }
    }
    ensure(compared == COUNT, || format!("only {compared} problems fit the naive cap"))?;

    let mut tensored = 0;
    for i in 0..200 {
        let p = ChainProblem::random(&mut rng, 5, 3, 4);
        let base = chain_count_dp(&p);
        for m in 1..=3u32 {
            let pm = tensor_power(&p, m, 1_000_000).map_err(err)?;
            let got = chain_count_dp(&pm);
            ensure(got == base.pow(m), || format!("problem {i}, M = {m}: {got} != {base}^{m}"))?;
            tensored += 1;
        }
    }
    Ok(format!("{COUNT} problems: dp = naive, bound and popularity hold; {tensored} tensor powers multiplicative"))
}

fn brute_v(inst: &Instance) -> Vec<Triple> {
    let g = inst.g();
    g.iter().flat_map(|&(a, b)| g.iter().filter(move |p| p.0 == a).map(move |&(_, b2)| Triple::new(a, b, b2))).collect()
}

fn add(x: Elem, y: Elem) -> i64 {
    x.0 + y.0
}

fn round_trips() -> Outcome {
    let ex1 = reduce_to_difference_injective(&build_example_one(1, 7).map_err(err)?);
    let v = brute_v(&ex1);
    let f1 = |t: &Triple| (add(t.a, t.b), add(t.a, t.b_prime));
    let f2 = |t: &Triple| (t.b, t.b_prime);
    let f3 = |t: &Triple| (add(t.a, t.b), t.b_prime);
    let mut s_oracle = BTreeSet::new();
    for &v0 in &v {
        for &v1 in v.iter().filter(|x| f1(x) == f1(&v0)) {
            for &v2 in v.iter().filter(|x| f2(x) == f2(&v1)) {
                for &v3 in v.iter().filter(|x| f3(x) == f3(&v2)) {
                    s_oracle.insert([v0, v1, v2, v3]);
                }
            }
        }
    }
    let s = enumerate_s(&ex1, DEFAULT_V_CAP).map_err(err)?;
    ensure(s.iter().copied().collect::<BTreeSet<_>>() == s_oracle && s.len() == s_oracle.len(), || {
        format!("S has {} elements, oracle {}", s.len(), s_oracle.len())
    })?;
    let images: BTreeSet<_> = s.iter().map(map_g).collect();
    ensure(images.len() == s.len(), || format!("g has {} images on {} elements", images.len(), s.len()))?;
    for x in &s {
        let (v0, a2, b3) = map_g(x);
        let back = reconstruct_from_g(&ex1, v0, a2, b3).map_err(err)?;
        ensure(back == *x, || format!("g round trip failed at {v0}"))?;
    }

    let ex2 = reduce_to_difference_injective(&build_example_two(1, 9).map_err(err)?);
    let v = brute_v(&ex2);
    let f4 = |t: &Triple| (t.a.0 + 2 * t.b.0, t.b_prime);
    let t_oracle: BTreeSet<[Triple; 2]> =
        v.iter().flat_map(|&x| v.iter().filter(move |y| f4(y) == f4(&x)).map(move |&y| [x, y])).collect();
    let t = enumerate_t(&ex2, DEFAULT_V_CAP).map_err(err)?;
    ensure(t.iter().copied().collect::<BTreeSet<_>>() == t_oracle && t.len() == t_oracle.len(), || {
        format!("T has {} elements, oracle {}", t.len(), t_oracle.len())
    })?;
    let images: BTreeSet<_> = t.iter().map(|x| map_h(ex2.group(), x)).collect();
    ensure(images.len() == t.len(), || format!("h has {} images on {} elements", images.len(), t.len()))?;
    for x in &t {
        let (c1, c2, b1) = map_h(ex2.group(), x);
        let back = reconstruct_from_h(&ex2, c1, c2, b1).map_err(err)?;
        ensure(back == *x, || format!("h round trip failed at ({c1}, {c2}, {b1})"))?;
    }
    Ok(format!("g injective on all {} of S, h on all {} of T, both invert exactly", s.len(), t.len()))
}

fn dimension_bounds() -> Outcome {
    let mink = novelty_threshold(BoundKind::Minkowski);
    let haus = novelty_threshold(BoundKind::Hausdorff);
    // Cleared denominators: 8n + 6 > 7n + 14 and 12n + 10 > 11n + 22.
    let mink_oracle = (2..).find(|n| 8 * n + 6 > 7 * n + 14).unwrap();
    let haus_oracle = (2..).find(|n| 12 * n + 10 > 11 * n + 22).unwrap();
    ensure(mink == 9 && mink == mink_oracle, || format!("minkowski threshold {mink}"))?;
    ensure(haus == 13 && haus == haus_oracle, || format!("hausdorff threshold {haus}"))?;
    let r = dimension_report(8).map_err(err)?;
    let five = Rational::from_integer(5);
    ensure(r.minkowski == five && r.wolff == five && r.best_minkowski == Winner::Equal, || {
        format!("n = 8: minkowski {}, wolff {}", r.minkowski, r.wolff)
    })?;
    Ok(format!("thresholds {mink} and {haus}; n = 8 ties at {}", r.minkowski))
}

fn fixture(name: &str) -> Result<serde_json::Value, String> {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    serde_json::from_str(&text).map_err(err)
}

fn search_reproduction() -> Outcome {
    let budget = Duration::from_secs(300);

    let spec = SearchSpec::new(3, false, SearchMode::Exhaustive);
    let start = Instant::now();
    let k3 = search(&spec).map_err(err)?;
    let t3 = start.elapsed();
    ensure(t3 < budget, || format!("K = 3 took {t3:.2?}"))?;
    ensure(k3.exhaustive, || "K = 3 not exhaustive".into())?;
    ensure(k3.best_exponent >= 1.630930 - 1e-6, || format!("K = 3 best {}", k3.best_exponent))?;
    let cert = certify(&k3, &spec);
    ensure(cert.ok, || format!("K = 3 certification: {:?}", cert.diagnostics))?;
    let ex1 = canonicalize(&DigitPattern::example_one(), 3);
    let w = k3.witnesses.iter().find(|w| **w == ex1).ok_or("example-1 pattern is not among the K = 3 witnesses")?;
    let st = pattern_stats(w);
    ensure((st.pairs, st.max_slice(), st.delta) == (6, 3, 6), || format!("witness stats {st:?}"))?;
    ensure(serde_json::to_value(&k3).map_err(err)? == fixture("search_k3.json")?, || {
        "K = 3 differs from fixture".into()
    })?;

    let spec = SearchSpec::new(4, true, SearchMode::Exhaustive);
    let start = Instant::now();
    let k4 = search(&spec).map_err(err)?;
    let t4 = start.elapsed();
    ensure(t4 < budget, || format!("K = 4 took {t4:.2?}"))?;
    ensure(k4.exhaustive, || "K = 4 not exhaustive".into())?;
    ensure(k4.best_exponent >= 1.5 - 1e-9, || format!("K = 4 best {}", k4.best_exponent))?;
    let cert = certify(&k4, &spec);
    ensure(cert.ok, || format!("K = 4 certification: {:?}", cert.diagnostics))?;
    // Exact: some witness has #pairs^2 >= max_slice^3.
    ensure(k4.witnesses.iter().map(pattern_stats).any(|s| pow(s.pairs, 2) >= pow(s.max_slice(), 3)), || {
        "no K = 4 witness reaches exponent 3/2 exactly".into()
    })?;
    ensure(serde_json::to_value(&k4).map_err(err)? == fixture("search_k4_d.json")?, || {
        "K = 4 differs from fixture".into()
    })?;

    Ok(format!(
        "K = 3 optimum {:.6} ({} witness, {t3:.2?}); K = 4 with d optimum {:.6} ({} witnesses, {t4:.2?})",
        k3.best_exponent,
        k3.witnesses.len(),
        k4.best_exponent,
        k4.witnesses.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("first construction", example_one_fidelity),
        ("second construction", example_two_fidelity),
        ("random instances, both chains", random_chains),
        ("chain-counting lemma", lemma_suite),
        ("injectivity round trips", round_trips),
        ("dimension bounds", dimension_bounds),
        ("pattern search", search_reproduction),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS  criterion {}  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL  criterion {}  {name}: {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
