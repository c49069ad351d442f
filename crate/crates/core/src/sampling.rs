//! Seeded random instances that satisfy the slice hypotheses at a returned budget.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::constructions::{tensor_pattern, DigitPattern};
use crate::group::{AmbientGroup, Elem};
use crate::instance::{natural_budget, Instance, LinearForm};

fn random_set<R: Rng + ?Sized>(rng: &mut R, group: AmbientGroup, span: usize, max_side: usize) -> Vec<Elem> {
    let size = rng.gen_range(1..=max_side.min(span));
    if rng.gen_bool(0.3) {
        // Arithmetic progressions keep sum sets small.
        let start = rng.gen_range(0..span) as i64;
        let step = rng.gen_range(1..=3) as i64;
        let set: BTreeSet<Elem> = (0..size as i64).map(|k| group.elem(start + k * step)).collect();
        return set.into_iter().collect();
    }
    sample(rng, span, size).into_iter().map(|x| group.elem(x as i64)).collect()
}

fn restrict<R: Rng + ?Sized>(
    rng: &mut R,
    group: AmbientGroup,
    pairs: Vec<(Elem, Elem)>,
    form: LinearForm,
    budget: usize,
) -> Vec<(Elem, Elem)> {
    let values: Vec<Elem> =
        pairs.iter().map(|&(a, b)| form.apply(group, a, b).unwrap()).collect::<BTreeSet<_>>().into_iter().collect();
    if values.len() <= budget {
        return pairs;
    }
    let keep: BTreeSet<Elem> = sample(rng, values.len(), budget).into_iter().map(|i| values[i]).collect();
    pairs.into_iter().filter(|&(a, b)| keep.contains(&form.apply(group, a, b).unwrap())).collect()
}

/// A digit-pattern instance: a random pattern over `{0..3}^2`, tensored to
/// as many digits as `max_side` allows, with a few pairs dropped.
fn pattern_instance<R: Rng + ?Sized>(rng: &mut R, max_side: usize, with_d: bool) -> Option<Instance> {
    let k = rng.gen_range(1..=3u32);
    let cells: Vec<(u32, u32)> =
        (0..=k).flat_map(|x| (0..=k).map(move |y| (x, y))).filter(|_| rng.gen_bool(0.5)).collect();
    let p = DigitPattern::new(cells, with_d).ok()?;
    let side = p.first_digits().len().max(p.second_digits().len());
    let n = (1..=3).take_while(|&n| side.pow(n) <= max_side).last()? as usize;
    let base = p.min_base() + rng.gen_range(0..=2);
    let inst = tensor_pattern(&p, n, Some(base), 1 << 20).ok()?;
    let drop = rng.gen_range(0.0..0.3);
    let pairs: Vec<(Elem, Elem)> = inst.g().iter().copied().filter(|_| !rng.gen_bool(drop)).collect();
    Instance::new(inst.group(), inst.a().clone(), inst.b().clone(), pairs).ok()
}

/// A random instance with `#A, #B <= max_side` and a budget `N` for which
/// `ab-card` and `c-card` (and `d-card` when `with_d`) hold.
///
/// About half of the instances have their sums (and `a + 2b` values)
/// restricted to at most `max(#A, #B)` values, which pushes `#G` towards
/// the extremal regime; a quarter are digit-pattern products.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, max_side: usize, with_d: bool) -> (Instance, u64) {
    if rng.gen_bool(0.25) {
        if let Some(inst) = pattern_instance(rng, max_side, with_d) {
            let n = natural_budget(&inst, with_d);
            return (inst, n);
        }
    }
    let (group, span) = if rng.gen_bool(0.5) {
        (AmbientGroup::Integers, rng.gen_range(2..=3 * max_side))
    } else {
        let m = rng.gen_range(2..=2 * max_side);
        (AmbientGroup::IntegersMod(m as u64), m)
    };
    let a = random_set(rng, group, span, max_side);
    let b = random_set(rng, group, span, max_side);
    let density: f64 = rng.gen_range(0.2..=1.0);
    let mut pairs: Vec<(Elem, Elem)> =
        a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).filter(|_| rng.gen_bool(density)).collect();
    if rng.gen_bool(0.5) {
        let side = a.len().max(b.len());
        pairs = restrict(rng, group, pairs, LinearForm::SUM, side);
        if with_d {
            pairs = restrict(rng, group, pairs, LinearForm::SUM_TWICE, side);
        }
    }
    let inst = Instance::new(group, a, b, pairs).expect("pairs drawn from A x B");
    let slack = if rng.gen_bool(0.2) { rng.gen_range(1..=3) } else { 0 };
    let n = natural_budget(&inst, with_d) + slack;
    (inst, n)
}
