//! Shared generators and property suites for the integration tests.

#![allow(dead_code)]

pub mod suites;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use streamfix::answer::Universe;
use streamfix::lang::{check_t_consistent, Formula, Program, Rule};
use streamfix::stream::{atoms, AtomSet, ExtNat, Interval, Stream, TimePoint};
use streamfix::Context;

/// Atoms that may appear in generated streams.
pub const STREAM_ATOMS: [&str; 2] = ["a", "b"];
/// Atoms that may appear in generated formulas; `d` is background data.
pub const FORMULA_ATOMS: [&str; 3] = ["a", "b", "d"];
/// Generated time points lie in `[1, HORIZON]`.
pub const HORIZON: u32 = 3;

pub const CASES: u32 = 500;

pub fn config(seed: u64) -> Config {
    Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(seed),
        failure_persistence: None,
        max_shrink_iters: 256,
        ..Config::default()
    }
}

pub fn gamma() -> AtomSet {
    atoms(["d"])
}

pub fn time_point() -> impl Strategy<Value = TimePoint> {
    (1..=HORIZON).prop_map(TimePoint::of)
}

fn radius() -> impl Strategy<Value = ExtNat> {
    prop_oneof![3 => (0..=2u32).prop_map(ExtNat::Fin), 1 => Just(ExtNat::Inf)]
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        6 => prop::sample::select(&FORMULA_ATOMS[..]).prop_map(Formula::atom),
        1 => Just(Formula::Top),
    ]
}

/// Normal formulas: atoms, `⊤`, `∧`, `□`, `@`, windows.
pub fn normal_formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
            inner.clone().prop_map(Formula::boxed),
            (time_point(), inner.clone()).prop_map(|(t, x)| Formula::At(t, Box::new(x))),
            (radius(), radius(), inner).prop_map(|(l, r, x)| Formula::window(l, r, x)),
        ]
    })
}

pub fn box_free_normal_formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
            (time_point(), inner.clone()).prop_map(|(t, x)| Formula::At(t, Box::new(x))),
            (radius(), radius(), inner).prop_map(|(l, r, x)| Formula::window(l, r, x)),
        ]
    })
}

/// Formulas without `¬`, `→` and `□`.
pub fn monotone_formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::or(x, y)),
            inner.clone().prop_map(Formula::diamond),
            (time_point(), inner.clone()).prop_map(|(t, x)| Formula::At(t, Box::new(x))),
            (radius(), radius(), inner).prop_map(|(l, r, x)| Formula::window(l, r, x)),
        ]
    })
}

/// Arbitrary formulas over every connective.
pub fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::or(x, y)),
            (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::implies(x, y)),
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::boxed),
            inner.clone().prop_map(Formula::diamond),
            (time_point(), inner.clone()).prop_map(|(t, x)| Formula::At(t, Box::new(x))),
            (radius(), radius(), inner).prop_map(|(l, r, x)| Formula::window(l, r, x)),
        ]
    })
}

/// A stream over `STREAM_ATOMS × [1, horizon]`, each cell present with
/// probability `density`.
pub fn stream_over(horizon: u32, density: f64) -> impl Strategy<Value = Stream> {
    let n = STREAM_ATOMS.len() * horizon as usize;
    prop::collection::vec(prop::bool::weighted(density), n).prop_map(move |bits| {
        Stream::from_cells(bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| {
            let t = TimePoint::of(i as u32 / STREAM_ATOMS.len() as u32 + 1);
            (
                t,
                streamfix::Atom::new(STREAM_ATOMS[i % STREAM_ATOMS.len()]).unwrap(),
            )
        }))
    })
}

pub fn stream() -> impl Strategy<Value = Stream> {
    stream_over(HORIZON + 1, 0.4)
}

/// Keeps the cells of `s` selected by `mask` (cycled).
pub fn select(s: &Stream, mask: &[bool]) -> Stream {
    Stream::from_cells(
        s.cells()
            .zip(mask.iter().cycle())
            .filter(|(_, keep)| **keep)
            .map(|(c, _)| c),
    )
}

/// `(I, J)` with `I ⊆ J`.
pub fn nested_pair() -> impl Strategy<Value = (Stream, Stream)> {
    (stream(), prop::collection::vec(any::<bool>(), 1..12))
        .prop_map(|(j, mask)| (select(&j, &mask), j))
}

/// `(I, I', J', J)` with `I ⊆ I' ⊆ J' ⊆ J`.
pub fn nested_quad() -> impl Strategy<Value = [Stream; 4]> {
    (
        stream(),
        prop::collection::vec(any::<bool>(), 1..12),
        prop::collection::vec(any::<bool>(), 1..12),
        prop::collection::vec(any::<bool>(), 1..12),
    )
        .prop_map(|(j, m1, m2, m3)| {
            let j2 = select(&j, &m1);
            let i2 = select(&j2, &m2);
            let i = select(&i2, &m3);
            [i, i2, j2, j]
        })
}

/// `x`, `□x`, `◇x` or `@t x` for a single atom `x`.
fn simple(names: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    let atom = move || prop::sample::select(names).prop_map(Formula::atom);
    prop_oneof![
        3 => atom(),
        3 => atom().prop_map(Formula::boxed),
        2 => (time_point(), atom()).prop_map(|(t, x)| Formula::At(t, Box::new(x))),
        1 => atom().prop_map(Formula::diamond),
    ]
}

fn make_rule(head: Formula, pos: Vec<Formula>, neg: Vec<Formula>) -> Rule {
    if pos.is_empty() && neg.is_empty() {
        Rule::fact(head).unwrap()
    } else {
        let pos = if pos.is_empty() {
            vec![Formula::Top]
        } else {
            pos
        };
        Rule::new(head, pos, neg).unwrap()
    }
}

/// Short rules over `a` and `b`, where choices and positive loops are common.
fn plain_rule() -> impl Strategy<Value = Rule> {
    const AB: &[&str] = &["a", "b"];
    (
        simple(AB).prop_filter("normal", Formula::is_normal),
        prop::collection::vec(simple(AB), 0..=1),
        prop::collection::vec(simple(AB), 0..=1),
    )
        .prop_map(|(h, pos, neg)| make_rule(h, pos, neg))
}

/// Rules with nested normal heads and arbitrary body formulas.
fn nested_rule() -> impl Strategy<Value = Rule> {
    const ABD: &[&str] = &["a", "b", "a", "b", "d"];
    let literal = || prop_oneof![3 => simple(ABD), 1 => formula()];
    (
        normal_formula(),
        prop::collection::vec(literal(), 0..=2),
        prop::collection::vec(literal(), 0..=1),
    )
        .prop_map(|(h, pos, neg)| make_rule(h, pos, neg))
}

/// A rule whose head passes the consistency check at `t`.
pub fn rule_at(t: TimePoint) -> impl Strategy<Value = Rule> {
    let g = gamma();
    prop_oneof![2 => plain_rule(), 1 => nested_rule()]
        .prop_filter("head must be t-consistent", move |r| {
            check_t_consistent(&r.head, t, &g).unwrap_or(false)
        })
}

/// A small program, its data stream and evaluation time point.
#[derive(Debug, Clone)]
pub struct Instance {
    pub program: Program,
    pub ctx: Context,
    pub t: TimePoint,
}

impl Instance {
    pub fn universe(&self) -> Universe {
        Universe::new(atoms(STREAM_ATOMS), Interval::closed(1, HORIZON).unwrap()).unwrap()
    }
}

/// Either nothing, an even negative loop `a :- not y. b :- not x.` or a
/// positive loop `a :- y. b :- x.`, where `x` and `y` are simple formulas
/// over `a` and `b` respectively.
fn loop_pair() -> impl Strategy<Value = Vec<Rule>> {
    let over = |name: &'static str| {
        prop_oneof![
            2 => Just(Formula::atom(name)),
            2 => Just(Formula::boxed(Formula::atom(name))),
            1 => time_point().prop_map(move |t| Formula::At(t, Box::new(Formula::atom(name)))),
        ]
    };
    (0..3u8, over("a"), over("b")).prop_map(|(kind, x, y)| {
        let (a, b) = (Formula::atom("a"), Formula::atom("b"));
        match kind {
            0 => vec![],
            1 => vec![make_rule(a, vec![], vec![y]), make_rule(b, vec![], vec![x])],
            _ => vec![make_rule(a, vec![y], vec![]), make_rule(b, vec![x], vec![])],
        }
    })
}

pub fn instance() -> impl Strategy<Value = Instance> {
    time_point().prop_flat_map(move |t| {
        (
            prop::collection::vec(rule_at(t), 1..=3),
            loop_pair(),
            stream_over(HORIZON, 0.12),
        )
            .prop_map(move |(mut rules, pair, data)| {
                rules.extend(pair);
                (rules, data)
            })
            .prop_map(move |(rules, data)| Instance {
                program: Program::new(rules).unwrap(),
                ctx: Context::new(gamma(), data),
                t,
            })
    })
}

/// Instances whose data stream is empty.
pub fn instance_without_data() -> impl Strategy<Value = Instance> {
    instance().prop_map(|mut i| {
        i.ctx.data = Stream::new();
        i
    })
}

/// Programs without windows whose `@` time points lie inside `interval`.
pub fn windowless_instance_in(interval: Interval) -> impl Strategy<Value = Instance> {
    let ok = move |f: &Formula| {
        !f.any_node(&|g| match g {
            Formula::Window(..) => true,
            Formula::At(s, _) => !interval.contains(*s),
            _ => false,
        })
    };
    instance().prop_filter("fragment", move |i| {
        i.program
            .rules()
            .iter()
            .all(|r| ok(&r.head) && r.pos.iter().chain(&r.neg).all(&ok))
            && i.ctx.data.support().is_subset(&interval)
    })
}

/// Ordinary programs over `a`, `b`, `c`.
pub fn ordinary_program() -> impl Strategy<Value = Program> {
    let atom = || prop::sample::select(&["a", "b", "c"][..]).prop_map(Formula::atom);
    let rule = (
        atom(),
        prop::collection::vec(atom(), 0..=2),
        prop::collection::vec(atom(), 0..=2),
    )
        .prop_map(|(h, pos, neg)| {
            if pos.is_empty() && neg.is_empty() {
                Rule::fact(h).unwrap()
            } else {
                let pos = if pos.is_empty() {
                    vec![Formula::Top]
                } else {
                    pos
                };
                Rule::new(h, pos, neg).unwrap()
            }
        });
    prop::collection::vec(rule, 1..=4).prop_map(|r| Program::new(r).unwrap())
}

/// Extends `s` with cells `z` at both ends of `supp(other)` so the two
/// streams share a support.
pub fn align_support(s: &Stream, other: &Stream) -> (Stream, Stream) {
    let z = streamfix::Atom::new("z").unwrap();
    let mut a = s.clone();
    let mut b = other.clone();
    let hull = a.support().hull(&b.support());
    if let (Some(lo), Some(ExtNat::Fin(hi))) = (hull.lo(), hull.hi()) {
        for x in [&mut a, &mut b] {
            x.insert(lo, z.clone());
            x.insert(TimePoint::of(hi), z.clone());
        }
    }
    (a, b)
}
