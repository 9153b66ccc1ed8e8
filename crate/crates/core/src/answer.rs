//! Reducts, model checks and answer streams: the fixed-interval notion of
//! Beck et al., refined FLP `t`-answer streams and `Φ`-answer streams.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::entailment::{entails, holds_fixed, Context};
use crate::error::{Error, Result};
use crate::lang::{check_t_consistent, Formula, Program, Rule};
use crate::operators::{model_op, partial_model, phi_dagger, tp};
use crate::stream::{Atom, AtomSet, Cell, ExtNat, Interval, Stream, StreamView, TimePoint};

/// Default cap on the free cells searched by [`enumerate_answer_streams`].
pub const DEFAULT_UNIVERSE_BOUND: usize = 20;

/// Default name of the marker atom added by [`boxplus_translate`].
pub const DEFAULT_MARKER: &str = "_sharp";

/// Finite search space for answer-stream enumeration: `atoms × horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Universe {
    pub atoms: AtomSet,
    pub horizon: Interval,
}

impl Universe {
    pub fn new(atoms: AtomSet, horizon: Interval) -> Result<Universe> {
        if horizon.is_empty() || !horizon.is_finite() {
            return Err(Error::BadInterval(horizon.to_string()));
        }
        Ok(Universe { atoms, horizon })
    }

    pub fn cell_count(&self) -> usize {
        self.atoms.len() * self.horizon.len().unwrap_or(0) as usize
    }

    /// The stream holding every atom at every time point of the horizon.
    pub fn full_stream(&self) -> Stream {
        Stream::from_cells(
            self.horizon
                .points()
                .flat_map(|t| self.atoms.iter().map(move |a| (t, a.clone()))),
        )
    }
}

/// The default universe: atoms of the program and data (background atoms
/// excluded) over the hull of `supp(D)`, `t` and every `@` time point,
/// widened on both sides by the largest finite window radius.
pub fn default_universe(program: &Program, ctx: &Context, t: TimePoint) -> Universe {
    let mut atoms = program.atoms();
    atoms.extend(ctx.data.atoms());
    atoms.retain(|a| !ctx.gamma.contains(a));
    let (max_at, radius) = program.time_extent();
    let mut hull = ctx.data.support().hull(&Interval::point(t));
    if max_at > 0 {
        hull = hull.hull(&Interval::point(TimePoint::of(max_at)));
    }
    let (lo, hi) = match hull {
        Interval::Span {
            lo,
            hi: ExtNat::Fin(hi),
        } => (lo.get(), hi),
        _ => unreachable!("hull of a point is a finite span"),
    };
    let horizon = Interval::new(
        TimePoint::of(lo.saturating_sub(radius).max(1)),
        ExtNat::Fin(hi.saturating_add(radius)),
    );
    Universe { atoms, horizon }
}

/// Which answer-stream notion to enumerate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "interval")]
pub enum AnswerMode {
    /// Refined `t`-answer streams (minimal models of the reduct).
    Flp,
    /// `Φ`-answer streams.
    Fixpoint,
    /// `(t,T)`-answer streams for a fixed finite interval `T`.
    Beck(Interval),
}

impl fmt::Display for AnswerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnswerMode::Flp => f.write_str("flp"),
            AnswerMode::Fixpoint => f.write_str("fixpoint"),
            AnswerMode::Beck(t) => write!(f, "beck{t}"),
        }
    }
}

/// `P^{I,t}`: the rules whose bodies hold in `I` at `t`.
pub fn reduct(program: &Program, stream: &Stream, t: TimePoint, gamma: &AtomSet) -> Vec<Rule> {
    program
        .rules()
        .iter()
        .filter(|r| entails(stream, t, &r.body(), gamma))
        .cloned()
        .collect()
}

fn violated(rule: &Rule, stream: &Stream, t: TimePoint, gamma: &AtomSet) -> bool {
    entails(stream, t, &rule.body(), gamma) && !entails(stream, t, &rule.head, gamma)
}

fn satisfies_rules(rules: &[Rule], ctx: &Context, t: TimePoint, stream: &Stream) -> bool {
    ctx.data.is_substream(stream) && !rules.iter().any(|r| violated(r, stream, t, &ctx.gamma))
}

/// `I` is an interpretation stream and satisfies every rule at `t`.
pub fn is_t_model(program: &Program, ctx: &Context, t: TimePoint, stream: &Stream) -> bool {
    let direct = satisfies_rules(program.rules(), ctx, t, stream);
    debug_assert!(
        !heads_consistent(program, t, &ctx.gamma)
            || is_t_model_via_tp(program, ctx, t, stream).map_or(true, |v| v == direct),
        "model check disagrees with the prefixed-point check"
    );
    direct
}

/// Model check as a prefixed point: `T(I) ⊆ I`.
pub fn is_t_model_via_tp(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    stream: &Stream,
) -> Result<bool> {
    if !ctx.data.is_substream(stream) {
        return Ok(false);
    }
    Ok(tp(program, ctx, t, stream)?.is_substream(stream))
}

fn heads_consistent(program: &Program, t: TimePoint, gamma: &AtomSet) -> bool {
    program
        .rules()
        .iter()
        .all(|r| check_t_consistent(&r.head, t, gamma).unwrap_or(false))
}

/// True if no proper substream `J` of `I` with `D ⊆ J` satisfies `is_model`.
fn is_minimal(
    ctx: &Context,
    stream: &Stream,
    is_model: impl Fn(&Stream) -> bool + Sync,
) -> Result<bool> {
    let free: Vec<Cell> = stream.difference(&ctx.data).cells().collect();
    if free.len() > ctx.limits.substreams {
        return Err(Error::BoundExceeded {
            what: "minimality check",
            count: free.len(),
            bound: ctx.limits.substreams,
        });
    }
    let full = 1u64 << free.len();
    let smaller = (0..full - 1)
        .into_par_iter()
        .any(|mask| is_model(&with_cells(&ctx.data, &free, mask)));
    Ok(!smaller)
}

fn with_cells(base: &Stream, cells: &[Cell], mask: u64) -> Stream {
    let mut s = base.clone();
    for (i, (t, a)) in cells.iter().enumerate() {
        if mask >> i & 1 == 1 {
            s.insert(*t, a.clone());
        }
    }
    s
}

/// Refined `t`-answer stream: a substream-minimal `t`-model of `P^{I,t}`.
pub fn is_t_answer_stream(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    stream: &Stream,
) -> Result<bool> {
    if !is_t_model(program, ctx, t, stream) {
        return Ok(false);
    }
    let rules = reduct(program, stream, t, &ctx.gamma);
    is_minimal(ctx, stream, |j| satisfies_rules(&rules, ctx, t, j))
}

fn check_fixed_interval(interval: &Interval, t: TimePoint) -> Result<()> {
    if interval.is_empty() || !interval.is_finite() {
        return Err(Error::BadInterval(interval.to_string()));
    }
    if !interval.contains(t) {
        return Err(Error::TimeOutsideInterval {
            t: t.get(),
            interval: interval.to_string(),
        });
    }
    Ok(())
}

fn holds_in(stream: &Stream, interval: &Interval, t: TimePoint, f: &Formula, gamma: &AtomSet) -> bool {
    holds_fixed(StreamView::full(stream), interval, t, f, gamma)
}

fn satisfies_rules_fixed(
    rules: &[Rule],
    ctx: &Context,
    interval: &Interval,
    t: TimePoint,
    stream: &Stream,
) -> bool {
    ctx.data.is_substream(stream)
        && stream.support().is_subset(interval)
        && rules.iter().all(|r| {
            !holds_in(stream, interval, t, &r.body(), &ctx.gamma)
                || holds_in(stream, interval, t, &r.head, &ctx.gamma)
        })
}

/// `(t,T)`-model: an interpretation over `T` satisfying every rule under
/// fixed-interval entailment.
pub fn is_tt_model(
    program: &Program,
    ctx: &Context,
    interval: &Interval,
    t: TimePoint,
    stream: &Stream,
) -> Result<bool> {
    check_fixed_interval(interval, t)?;
    Ok(satisfies_rules_fixed(program.rules(), ctx, interval, t, stream))
}

/// `(t,T)`-answer stream: a minimal `(t,T)`-model of the fixed-interval reduct.
pub fn is_tt_answer_stream(
    program: &Program,
    ctx: &Context,
    interval: &Interval,
    t: TimePoint,
    stream: &Stream,
) -> Result<bool> {
    if !is_tt_model(program, ctx, interval, t, stream)? {
        return Ok(false);
    }
    let rules: Vec<Rule> = program
        .rules()
        .iter()
        .filter(|r| holds_in(stream, interval, t, &r.body(), &ctx.gamma))
        .cloned()
        .collect();
    is_minimal(ctx, stream, |j| {
        satisfies_rules_fixed(&rules, ctx, interval, t, j)
    })
}

/// `Φ`-answer stream: a `t`-model equal to its own `Φ†`.
pub fn is_phi_answer_stream(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    stream: &Stream,
) -> Result<bool> {
    if !is_t_model(program, ctx, t, stream) {
        return Ok(false);
    }
    Ok(phi_dagger(program, ctx, t, stream)?.lfp() == stream)
}

/// Cells an answer stream inside `universe` can hold beyond `D`.
///
/// For the refined notions every answer stream `I ⊆ U` is a fixed point of
/// `T`, so `I ⊆ D ∪ MM_{U,t}(H(P))`. For Beck's notion only head atoms inside
/// `T` can be derived.
pub fn candidate_cells(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    universe: &Universe,
    mode: &AnswerMode,
) -> Result<Vec<Cell>> {
    let full = universe.full_stream();
    let reachable = match mode {
        AnswerMode::Flp | AnswerMode::Fixpoint => {
            let whole = full.union(&ctx.data);
            let heads = program.heads();
            let mut s = model_op(&whole, t, &heads, &ctx.gamma)?;
            s.extend(&partial_model(&whole, t, &heads, &ctx.gamma)?);
            s.intersection(&full)
        }
        AnswerMode::Beck(interval) => {
            check_fixed_interval(interval, t)?;
            let heads = program.head_atoms();
            Stream::from_cells(
                interval
                    .points()
                    .flat_map(|p| heads.iter().map(move |a| (p, a.clone())))
                    .filter(|(_, a)| universe.atoms.contains(a) && !ctx.gamma.contains(a)),
            )
        }
    };
    Ok(reachable.difference(&ctx.data).cells().collect())
}

/// Every answer stream of the selected kind between `D` and `D ∪ U`, sorted.
///
/// Each subset of the [`candidate_cells`] is evaluated once; minimality is
/// then decided for all candidates sharing a reduct with one pass over the
/// subset lattice.
pub fn enumerate_answer_streams(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    universe: &Universe,
    mode: &AnswerMode,
) -> Result<Vec<Stream>> {
    if program.len() > 64 {
        return Err(Error::TooManyRules(program.len()));
    }
    let cells = candidate_cells(program, ctx, t, universe, mode)?;
    if cells.len() > ctx.limits.universe {
        return Err(Error::BoundExceeded {
            what: "answer-stream enumeration",
            count: cells.len(),
            bound: ctx.limits.universe,
        });
    }
    if let AnswerMode::Beck(interval) = mode {
        if !ctx.data.support().is_subset(interval) {
            return Ok(vec![]);
        }
    }
    let rules = program.rules();
    let bodies: Vec<Formula> = rules.iter().map(Rule::body).collect();
    let evaluate = |mask: u64| -> (u64, u64) {
        let s = with_cells(&ctx.data, &cells, mask);
        let mut body_bits = 0u64;
        let mut viol_bits = 0u64;
        for (i, (rule, body)) in rules.iter().zip(&bodies).enumerate() {
            let (b, h) = match mode {
                AnswerMode::Beck(interval) => (
                    holds_in(&s, interval, t, body, &ctx.gamma),
                    holds_in(&s, interval, t, &rule.head, &ctx.gamma),
                ),
                _ => (
                    entails(&s, t, body, &ctx.gamma),
                    entails(&s, t, &rule.head, &ctx.gamma),
                ),
            };
            if b {
                body_bits |= 1 << i;
                if !h {
                    viol_bits |= 1 << i;
                }
            }
        }
        (body_bits, viol_bits)
    };
    let size = 1usize << cells.len();
    let table: Vec<(u64, u64)> = (0..size as u64).into_par_iter().map(evaluate).collect();
    let models: Vec<u64> = (0..size as u64)
        .filter(|&m| table[m as usize].1 == 0)
        .collect();

    let answers: Vec<u64> = match mode {
        AnswerMode::Fixpoint => models
            .into_par_iter()
            .map(|m| {
                let s = with_cells(&ctx.data, &cells, m);
                if tp(program, ctx, t, &s)? != s {
                    return Ok(None);
                }
                Ok((phi_dagger(program, ctx, t, &s)?.lfp() == &s).then_some(m))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect(),
        AnswerMode::Flp | AnswerMode::Beck(_) => {
            let mut by_reduct: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
            for m in models {
                by_reduct.entry(table[m as usize].0).or_default().push(m);
            }
            let mut out = Vec::new();
            for (reduct_bits, members) in by_reduct {
                let below = models_below(&table, reduct_bits);
                out.extend(members.into_iter().filter(|&m| {
                    !(0..cells.len())
                        .any(|b| m >> b & 1 == 1 && below[(m ^ (1 << b)) as usize])
                }));
            }
            out
        }
    };
    let mut streams: Vec<Stream> = answers
        .into_iter()
        .map(|m| with_cells(&ctx.data, &cells, m))
        .collect();
    streams.sort();
    streams.dedup();
    Ok(streams)
}

/// `below[m]`: some submask of `m` satisfies every rule in `reduct_bits`.
fn models_below(table: &[(u64, u64)], reduct_bits: u64) -> Vec<bool> {
    let mut below: Vec<bool> = table.iter().map(|&(_, v)| v & reduct_bits == 0).collect();
    let n = table.len().trailing_zeros();
    for b in 0..n {
        let bit = 1usize << b;
        for m in 0..below.len() {
            if m & bit != 0 && below[m ^ bit] {
                below[m] = true;
            }
        }
    }
    below
}

/// Reference enumeration straight from the definitions: every subset of the
/// universe cells is tested with the single-stream predicates.
pub fn enumerate_answer_streams_exhaustive(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    universe: &Universe,
    mode: &AnswerMode,
) -> Result<Vec<Stream>> {
    let mut free = universe.full_stream().difference(&ctx.data);
    if let AnswerMode::Beck(interval) = mode {
        check_fixed_interval(interval, t)?;
        free = free.restrict(interval);
    }
    let cells: Vec<Cell> = free.cells().collect();
    if cells.len() > ctx.limits.universe {
        return Err(Error::BoundExceeded {
            what: "answer-stream enumeration",
            count: cells.len(),
            bound: ctx.limits.universe,
        });
    }
    let found = (0..1u64 << cells.len())
        .into_par_iter()
        .map(|mask| {
            let s = with_cells(&ctx.data, &cells, mask);
            let ok = match mode {
                AnswerMode::Flp => is_t_answer_stream(program, ctx, t, &s)?,
                AnswerMode::Fixpoint => is_phi_answer_stream(program, ctx, t, &s)?,
                AnswerMode::Beck(interval) => is_tt_answer_stream(program, ctx, interval, t, &s)?,
            };
            Ok(ok.then_some(s))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut streams: Vec<Stream> = found.into_iter().flatten().collect();
    streams.sort();
    Ok(streams)
}

/// `⊞_T P ∪ {@_{t'} # | t' ∈ T}` for evaluation at `t ∈ T`.
///
/// With `T = [t1,t2]`, every head and body literal is wrapped in the window
/// `⊞_{[t-t1, t2-t]}`, which cuts any stream down to `T` when evaluated at `t`.
pub fn boxplus_translate(
    program: &Program,
    interval: &Interval,
    t: TimePoint,
    marker: &Atom,
) -> Result<Program> {
    check_fixed_interval(interval, t)?;
    if program.atoms().contains(marker) {
        return Err(Error::MarkerCollision(marker.to_string()));
    }
    let (lo, hi) = match interval {
        Interval::Span {
            lo,
            hi: ExtNat::Fin(hi),
        } => (lo.get(), *hi),
        _ => unreachable!("checked finite and nonempty"),
    };
    let l = ExtNat::Fin(t.get() - lo);
    let r = ExtNat::Fin(hi - t.get());
    let wrap = |f: &Formula| match f {
        Formula::Top => Formula::Top,
        _ => Formula::window(l, r, f.clone()),
    };
    let mut rules = Vec::with_capacity(program.len() + interval.len().unwrap_or(0) as usize);
    for rule in program.rules() {
        rules.push(Rule::new(
            wrap(&rule.head),
            rule.pos.iter().map(wrap).collect(),
            rule.neg.iter().map(wrap).collect(),
        )?);
    }
    for p in interval.points() {
        rules.push(Rule::fact(Formula::At(p, Box::new(Formula::Atom(marker.clone()))))?);
    }
    Program::new(rules)
}

/// Answer sets of an ordinary program by brute force: `A` is an answer set
/// iff `A` is the least model of the Gelfond-Lifschitz reduct `P^A`.
pub fn ordinary_answer_sets(program: &Program, bound: usize) -> Result<Vec<AtomSet>> {
    if let Some(rule) = program.rules().iter().find(|r| !r.is_ordinary()) {
        return Err(Error::NotOrdinary(rule.to_string()));
    }
    let sigma: Vec<Atom> = program.atoms().into_iter().collect();
    if sigma.len() > bound {
        return Err(Error::BoundExceeded {
            what: "answer-set enumeration",
            count: sigma.len(),
            bound,
        });
    }
    let mut out: Vec<AtomSet> = (0..1u64 << sigma.len())
        .filter_map(|mask| {
            let a: AtomSet = sigma
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect();
            (least_model_of_gl_reduct(program, &a) == a).then_some(a)
        })
        .collect();
    out.sort();
    Ok(out)
}

fn least_model_of_gl_reduct(program: &Program, candidate: &AtomSet) -> AtomSet {
    let atom = |f: &Formula| match f {
        Formula::Atom(a) => Some(a.clone()),
        _ => None,
    };
    let positive: Vec<(Atom, Vec<Atom>)> = program
        .rules()
        .iter()
        .filter(|r| r.neg.iter().filter_map(atom).all(|n| !candidate.contains(&n)))
        .map(|r| {
            (
                atom(&r.head).expect("ordinary head"),
                r.pos.iter().filter_map(atom).collect(),
            )
        })
        .collect();
    let mut model = AtomSet::new();
    loop {
        let before = model.len();
        for (head, body) in &positive {
            if body.iter().all(|b| model.contains(b)) {
                model.insert(head.clone());
            }
        }
        if model.len() == before {
            return model;
        }
    }
}
