//! Randomized property suites. Each runs `CASES` seed-pinned cases and
//! returns the minimal failing input on violation.

use proptest::prelude::*;
use proptest::test_runner::TestRunner;
use streamfix::answer::{
    boxplus_translate, enumerate_answer_streams, enumerate_answer_streams_exhaustive,
    is_phi_answer_stream, is_t_answer_stream, is_t_model, is_t_model_via_tp, ordinary_answer_sets,
    AnswerMode, Universe, DEFAULT_MARKER,
};
use streamfix::entails;
use streamfix::levelmap::{
    extract_level_mapping, verify_level_mapping, verify_level_mapping_by_rules, Partitioning,
};
use streamfix::operators::{model_op, partial_model, phi, phi_dagger, tp, translate};
use streamfix::stream::{atoms, AtomSet, Interval, Stream, ThreeValuedStream, TimePoint};
use streamfix::{Atom, Context};

use super::*;

pub type Suite = (&'static str, fn() -> Result<(), String>);

pub const SUITES: &[Suite] = &[
    (
        "box-free partial model ignores the stream",
        box_free_independence,
    ),
    ("model operators are monotone", operator_monotonicity),
    ("M is below MM with equal support", partial_below_model),
    (
        "box translation simulates entailment",
        translation_simulation,
    ),
    ("monotone formulas are monotone", monotone_formulas),
    (
        "MM builds a model below every model",
        model_operator_soundness,
    ),
    (
        "models are the prefixed points of T",
        models_are_prefixed_points,
    ),
    ("Phi on exact streams is T", phi_on_exact_streams),
    ("Phi is precision-monotone", phi_precision_monotone),
    (
        "lfp lies below every prefixed point",
        lfp_below_prefixed_points,
    ),
    (
        "fixpoint answers are FLP answers",
        fixpoint_answers_are_flp_answers,
    ),
    (
        "Phi-answer iff total level mapping",
        level_mapping_characterization,
    ),
    (
        "boxplus translation matches fixed intervals",
        boxplus_equivalence,
    ),
    (
        "ordinary programs match answer sets",
        ordinary_correspondence,
    ),
];

fn run<S: Strategy>(
    seed: u64,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(config(seed));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn err(e: streamfix::Error) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

pub fn box_free_independence() -> Result<(), String> {
    run(
        0x5701,
        (box_free_normal_formula(), time_point(), stream(), stream()),
        |(f, t, i, j)| {
            let g = gamma();
            let mi = partial_model(&i, t, &f, &g).map_err(err)?;
            prop_assert_eq!(&mi, &partial_model(&j, t, &f, &g).map_err(err)?);
            prop_assert_eq!(&mi, &model_op(&i, t, &f, &g).map_err(err)?);
            Ok(())
        },
    )
}

pub fn operator_monotonicity() -> Result<(), String> {
    run(
        0x5702,
        (
            normal_formula(),
            normal_formula(),
            time_point(),
            nested_pair(),
        ),
        |(f, h, t, (i, j))| {
            let g = gamma();
            let m = |s: &Stream, x: &Formula| partial_model(s, t, x, &g).map_err(err);
            let mm = |s: &Stream, x: &Formula| model_op(s, t, x, &g).map_err(err);
            prop_assert!(m(&i, &f)?.is_substream(&m(&j, &f)?));
            prop_assert!(mm(&i, &f)?.is_substream(&mm(&j, &f)?));
            let both = Formula::and(f.clone(), h);
            prop_assert!(m(&i, &f)?.is_substream(&m(&i, &both)?));
            prop_assert!(mm(&i, &f)?.is_substream(&mm(&i, &both)?));
            Ok(())
        },
    )
}

pub fn partial_below_model() -> Result<(), String> {
    run(
        0x5703,
        (normal_formula(), time_point(), stream()),
        |(f, t, i)| {
            let g = gamma();
            let m = partial_model(&i, t, &f, &g).map_err(err)?;
            let mm = model_op(&i, t, &f, &g).map_err(err)?;
            prop_assert!(m.is_substream(&mm));
            prop_assert_eq!(m.support(), mm.support());
            Ok(())
        },
    )
}

pub fn translation_simulation() -> Result<(), String> {
    run(
        0x5704,
        (normal_formula(), time_point(), stream(), stream()),
        |(f, t, i, j)| {
            let g = gamma();
            let (i, j) = align_support(&i, &j);
            let fj = translate(&f, &j, t).map_err(err)?;
            prop_assert_eq!(entails(&i, t, &f, &g), entails(&i, t, &fj, &g));
            let fi = translate(&f, &i, t).map_err(err)?;
            let m = partial_model(&i, t, &f, &g).map_err(err)?;
            prop_assert_eq!(&m, &partial_model(&i, t, &fi, &g).map_err(err)?);
            let fm = translate(&f, &m, t).map_err(err)?;
            prop_assert_eq!(
                model_op(&i, t, &f, &g).map_err(err)?,
                partial_model(&i, t, &fm, &g).map_err(err)?
            );
            Ok(())
        },
    )
}

pub fn monotone_formulas() -> Result<(), String> {
    run(
        0x5705,
        (monotone_formula(), time_point(), nested_pair()),
        |(f, t, (i, j))| {
            let g = gamma();
            if entails(&i, t, &f, &g) {
                prop_assert!(entails(&j, t, &f, &g));
            }
            Ok(())
        },
    )
}

pub fn model_operator_soundness() -> Result<(), String> {
    let g = gamma();
    let consistent = (normal_formula(), time_point()).prop_filter("t-consistent", move |(f, t)| {
        streamfix::lang::check_t_consistent(f, *t, &g).unwrap_or(false)
    });
    run(0x5706, (consistent, stream()), |((f, t), i)| {
        let g = gamma();
        let mm = model_op(&i, t, &f, &g).map_err(err)?;
        prop_assert!(entails(&mm, t, &f, &g), "MM = {} is not a model", mm);
        if f.is_box_free() {
            prop_assert!(entails(
                &partial_model(&i, t, &f, &g).map_err(err)?,
                t,
                &f,
                &g
            ));
        }
        if entails(&i, t, &f, &g) {
            prop_assert!(mm.is_substream(&i));
        }
        Ok(())
    })
}

/// Every stream between the data stream and the full universe.
fn streams_between(data: &Stream, universe: &Universe) -> Vec<Stream> {
    let free: Vec<_> = universe.full_stream().difference(data).cells().collect();
    (0..1u64 << free.len())
        .map(|mask| {
            let mut s = data.clone();
            for (k, (t, a)) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    s.insert(*t, a.clone());
                }
            }
            s
        })
        .collect()
}

fn substreams_between(low: &Stream, high: &Stream) -> Vec<Stream> {
    let free: Vec<_> = high.difference(low).cells().collect();
    (0..1u64 << free.len())
        .map(|mask| {
            let mut s = low.clone();
            for (k, (t, a)) in free.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    s.insert(*t, a.clone());
                }
            }
            s
        })
        .collect()
}

pub fn models_are_prefixed_points() -> Result<(), String> {
    run(0x5707, instance(), |inst| {
        let Instance { program, ctx, t } = &inst;
        for i in streams_between(&ctx.data, &inst.universe()) {
            prop_assert_eq!(
                is_t_model(program, ctx, *t, &i),
                is_t_model_via_tp(program, ctx, *t, &i).map_err(err)?,
                "I = {}",
                i
            );
        }
        Ok(())
    })
}

pub fn phi_on_exact_streams() -> Result<(), String> {
    run(
        0x5708,
        (instance(), stream_over(HORIZON, 0.4)),
        |(inst, extra)| {
            let Instance { program, ctx, t } = &inst;
            let i = ctx.data.union(&extra);
            let exact = ThreeValuedStream::exact(i.clone());
            prop_assert_eq!(
                phi(program, ctx, *t, &exact).map_err(err)?,
                tp(program, ctx, *t, &i).map_err(err)?
            );
            Ok(())
        },
    )
}

pub fn phi_precision_monotone() -> Result<(), String> {
    run(
        0x5709,
        (instance(), nested_quad()),
        |(inst, [i, i2, j2, j])| {
            let Instance { program, ctx, t } = &inst;
            let coarse = ThreeValuedStream::new(i, j).map_err(err)?;
            let fine = ThreeValuedStream::new(i2, j2).map_err(err)?;
            prop_assert!(coarse.precision_leq(&fine));
            let a = phi(program, ctx, *t, &coarse).map_err(err)?;
            let b = phi(program, ctx, *t, &fine).map_err(err)?;
            prop_assert!(a.is_substream(&b), "{} not below {}", a, b);
            Ok(())
        },
    )
}

fn models_in_universe(inst: &Instance) -> Vec<Stream> {
    streams_between(&inst.ctx.data, &inst.universe())
        .into_iter()
        .filter(|i| is_t_model(&inst.program, &inst.ctx, inst.t, i))
        .collect()
}

pub fn lfp_below_prefixed_points() -> Result<(), String> {
    run(0x570a, instance(), |inst| {
        let Instance { program, ctx, t } = &inst;
        for i in models_in_universe(&inst) {
            let lfp = phi_dagger(program, ctx, *t, &i).map_err(err)?.lfp().clone();
            prop_assert!(lfp.is_substream(&i));
            for k in substreams_between(&ctx.data, &i) {
                if tp(program, ctx, *t, &k).map_err(err)?.is_substream(&k) {
                    prop_assert!(lfp.is_substream(&k), "lfp {} vs prefixed {}", lfp, k);
                }
            }
        }
        Ok(())
    })
}

pub fn fixpoint_answers_are_flp_answers() -> Result<(), String> {
    run(0x570b, instance(), |inst| {
        let Instance { program, ctx, t } = &inst;
        let u = inst.universe();
        let flp = enumerate_answer_streams(program, ctx, *t, &u, &AnswerMode::Flp).map_err(err)?;
        let fix =
            enumerate_answer_streams(program, ctx, *t, &u, &AnswerMode::Fixpoint).map_err(err)?;
        for s in &fix {
            prop_assert!(flp.contains(s), "{} is a fixpoint answer only", s);
        }
        let flp_ref = enumerate_answer_streams_exhaustive(program, ctx, *t, &u, &AnswerMode::Flp)
            .map_err(err)?;
        let fix_ref =
            enumerate_answer_streams_exhaustive(program, ctx, *t, &u, &AnswerMode::Fixpoint)
                .map_err(err)?;
        prop_assert_eq!(flp, flp_ref);
        prop_assert_eq!(fix, fix_ref);
        Ok(())
    })
}

/// Partitions `s` by assigning cell `k` to level `levels[k % len]`.
fn partition_by(s: &Stream, levels: &[u8]) -> Option<Partitioning> {
    let mut parts = vec![Stream::new(); 4];
    for (k, (t, a)) in s.cells().enumerate() {
        parts[levels[k % levels.len()] as usize % 4].insert(t, a);
    }
    parts.retain(|p| !p.is_empty());
    Partitioning::from_levels(parts).ok()
}

/// Splits level `at` of `p` into two nonempty consecutive levels.
fn split_level(p: &Partitioning, at: usize, mask: &[bool]) -> Option<Partitioning> {
    let mut levels: Vec<Stream> = p.parts()[1..].to_vec();
    let idx = at % levels.len().max(1);
    let target = levels.get(idx)?.clone();
    let first = select(&target, mask);
    let second = target.difference(&first);
    if first.is_empty() || second.is_empty() {
        return None;
    }
    levels.splice(idx..=idx, [first, second]);
    Partitioning::from_levels(levels).ok()
}

pub fn level_mapping_characterization() -> Result<(), String> {
    let strategy = (
        instance(),
        prop::collection::vec(0u8..4, 1..8),
        0usize..4,
        prop::collection::vec(any::<bool>(), 1..6),
    );
    run(0x570c, strategy, |(inst, levels, at, mask)| {
        let Instance { program, ctx, t } = &inst;
        for i in models_in_universe(&inst) {
            let answer = is_phi_answer_stream(program, ctx, *t, &i).map_err(err)?;
            let extracted = extract_level_mapping(program, ctx, *t, &i).map_err(err)?;
            prop_assert_eq!(answer, extracted.is_some());
            if let Some(s) = &extracted {
                prop_assert_eq!(&s.union(), &i);
                let report = verify_level_mapping(s, program, ctx, *t).map_err(err)?;
                prop_assert!(report.valid && report.total, "{:?}", report);
                if let Some(finer) = split_level(s, at, &mask) {
                    let r = verify_level_mapping(&finer, program, ctx, *t).map_err(err)?;
                    prop_assert!(r.valid && r.total, "refined {:?}", r);
                }
            }
            if let Some(p) = partition_by(&i, &levels) {
                let compact = verify_level_mapping(&p, program, ctx, *t).map_err(err)?;
                let by_rules = verify_level_mapping_by_rules(&p, program, ctx, *t).map_err(err)?;
                prop_assert_eq!(&compact, &by_rules);
                if compact.valid && compact.total {
                    prop_assert!(answer, "{} has a total level mapping", i);
                }
            }
        }
        Ok(())
    })
}

pub fn boxplus_equivalence() -> Result<(), String> {
    let strategy = (1..=HORIZON, 0..HORIZON, 0..HORIZON).prop_flat_map(|(lo, len, off)| {
        let hi = (lo + len).min(HORIZON);
        let interval = Interval::closed(lo, hi).unwrap();
        let t = TimePoint::of(lo + off % (hi - lo + 1));
        windowless_instance_in(interval).prop_map(move |mut inst| {
            inst.t = t;
            (inst, interval)
        })
    });
    run(0x570d, strategy, |(inst, interval)| {
        let Instance { program, ctx, t } = &inst;
        let marker = Atom::new(DEFAULT_MARKER).unwrap();
        let beck_universe = Universe::new(atoms(STREAM_ATOMS), interval).map_err(err)?;
        let beck = enumerate_answer_streams_exhaustive(
            program,
            ctx,
            *t,
            &beck_universe,
            &AnswerMode::Beck(interval),
        )
        .map_err(err)?;
        let translated = boxplus_translate(program, &interval, *t, &marker).map_err(err)?;
        let mut all = atoms(STREAM_ATOMS);
        all.insert(marker.clone());
        let refined_universe = Universe::new(all, interval).map_err(err)?;
        let refined =
            enumerate_answer_streams(&translated, ctx, *t, &refined_universe, &AnswerMode::Flp)
                .map_err(err)?;
        let markers = Stream::from_cells(interval.points().map(|p| (p, marker.clone())));
        let mut expected: Vec<Stream> = beck.iter().map(|s| s.union(&markers)).collect();
        expected.sort();
        prop_assert_eq!(refined, expected, "translated program:\n{}", translated);
        Ok(())
    })
}

pub fn ordinary_correspondence() -> Result<(), String> {
    run(0x570e, ordinary_program(), |program| {
        let sets = ordinary_answer_sets(&program, 20).map_err(err)?;
        let sigma: Vec<_> = ["a", "b", "c"].into_iter().collect();
        let ctx = Context::default();
        for mask in 0u32..8 {
            let a: AtomSet = atoms(
                sigma
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, x)| *x),
            );
            let expected = sets.contains(&a);
            for t in 1..=HORIZON {
                let t = TimePoint::of(t);
                let s = Stream::from_cells(a.iter().map(|x| (t, x.clone())));
                prop_assert_eq!(
                    is_phi_answer_stream(&program, &ctx, t, &s).map_err(err)?,
                    expected
                );
                prop_assert_eq!(
                    is_t_answer_stream(&program, &ctx, t, &s).map_err(err)?,
                    expected
                );
            }
        }
        Ok(())
    })
}
