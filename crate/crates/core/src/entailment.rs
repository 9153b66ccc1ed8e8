//! Entailment of formulas by streams.
//!
//! Three relations live here:
//!
//! * [`entails_fixed`]: `□`, `◇` and `@` range over a preselected interval `T`.
//! * [`entails`]: `□` and `◇` range over the support of the (windowed) stream
//!   and `@` may refer to any time point.
//! * [`entails3`]: a 3-valued stream `(I, J)` entails a formula when every
//!   stream between `I` and `J` does.
//!
//! Windows do not shrink the support seen by `□`/`◇` down to the nonempty
//! time points inside the window: the support of `I[ℓ,r;t]` is `supp I`
//! intersected with `[max(1,t-ℓ), t+r]` (see [`StreamView`]).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::Formula;
use crate::stream::{AtomSet, Interval, Stream, StreamView, ThreeValuedStream, TimePoint};

/// Default cap on undefined cells enumerated by [`entails3`].
pub const DEFAULT_THREE_VALUED_BOUND: usize = 20;

/// Caps on exhaustive enumeration. Exceeding one is reported as an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Cells of `I - D` searched when checking minimality of a single stream.
    pub substreams: usize,
    /// Undefined cells enumerated by [`entails3`].
    pub three_valued: usize,
    /// Free cells of a universe searched for answer streams.
    pub universe: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            substreams: crate::stream::DEFAULT_SUBSTREAM_BOUND,
            three_valued: DEFAULT_THREE_VALUED_BOUND,
            universe: crate::answer::DEFAULT_UNIVERSE_BOUND,
        }
    }
}

impl Limits {
    pub fn uniform(bound: usize) -> Self {
        Limits {
            substreams: bound,
            three_valued: bound,
            universe: bound,
        }
    }
}

/// Background atoms and the data stream a program is evaluated against.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Context {
    pub gamma: AtomSet,
    pub data: Stream,
    pub limits: Limits,
}

impl Context {
    pub fn new(gamma: AtomSet, data: Stream) -> Self {
        Context {
            gamma,
            data,
            limits: Limits::default(),
        }
    }

    pub fn with_limits(mut self, limits: Limits) -> Self {
        self.limits = limits;
        self
    }
}

pub fn entails(stream: &Stream, t: TimePoint, formula: &Formula, gamma: &AtomSet) -> bool {
    holds(StreamView::full(stream), t, formula, gamma)
}

pub(crate) fn holds(view: StreamView<'_>, t: TimePoint, f: &Formula, gamma: &AtomSet) -> bool {
    match f {
        Formula::Top => true,
        Formula::Atom(a) => gamma.contains(a) || view.holds(t, a),
        Formula::Neg(x) => !holds(view, t, x, gamma),
        Formula::And(x, y) => holds(view, t, x, gamma) && holds(view, t, y, gamma),
        Formula::Or(x, y) => holds(view, t, x, gamma) || holds(view, t, y, gamma),
        Formula::Implies(x, y) => !holds(view, t, x, gamma) || holds(view, t, y, gamma),
        Formula::Diamond(x) => view.support().points().any(|s| holds(view, s, x, gamma)),
        Formula::Box(x) => view.support().points().all(|s| holds(view, s, x, gamma)),
        Formula::At(s, x) => holds(view, *s, x, gamma),
        Formula::Window(l, r, x) => holds(view.narrow(*l, *r, t), t, x, gamma),
    }
}

/// Entailment relative to a fixed, finite interval `T` containing `t`.
pub fn entails_fixed(
    stream: &Stream,
    interval: &Interval,
    t: TimePoint,
    formula: &Formula,
    gamma: &AtomSet,
) -> Result<bool> {
    if interval.is_empty() || !interval.is_finite() {
        return Err(Error::BadInterval(interval.to_string()));
    }
    if !interval.contains(t) {
        return Err(Error::TimeOutsideInterval {
            t: t.get(),
            interval: interval.to_string(),
        });
    }
    Ok(holds_fixed(
        StreamView::full(stream),
        interval,
        t,
        formula,
        gamma,
    ))
}

pub(crate) fn holds_fixed(
    view: StreamView<'_>,
    fixed: &Interval,
    t: TimePoint,
    f: &Formula,
    gamma: &AtomSet,
) -> bool {
    let rec = |v: StreamView<'_>, s: TimePoint, x: &Formula| holds_fixed(v, fixed, s, x, gamma);
    match f {
        Formula::Top => true,
        Formula::Atom(a) => gamma.contains(a) || view.holds(t, a),
        Formula::Neg(x) => !rec(view, t, x),
        Formula::And(x, y) => rec(view, t, x) && rec(view, t, y),
        Formula::Or(x, y) => rec(view, t, x) || rec(view, t, y),
        Formula::Implies(x, y) => !rec(view, t, x) || rec(view, t, y),
        Formula::Diamond(x) => fixed.points().any(|s| rec(view, s, x)),
        Formula::Box(x) => fixed.points().all(|s| rec(view, s, x)),
        Formula::At(s, x) => fixed.contains(*s) && rec(view, *s, x),
        Formula::Window(l, r, x) => rec(view.narrow(*l, *r, t), t, x),
    }
}

/// 3-valued entailment: `entails(K, t, formula)` for every `lower ⊆ K ⊆ upper`.
///
/// The formula is split into its top-level conjuncts. A monotone conjunct
/// only needs to be checked on `lower`, and a negated monotone conjunct only
/// on `upper`. Any other conjunct is checked on every stream in the interval;
/// when it does not look at the support (no `□`, no `◇`), only cells of its
/// own atoms are varied. Exceeding `bound` varied cells is an error.
pub fn entails3(
    p: &ThreeValuedStream,
    t: TimePoint,
    formula: &Formula,
    gamma: &AtomSet,
    bound: usize,
) -> Result<bool> {
    if p.is_exact() {
        return Ok(entails(p.lower(), t, formula, gamma));
    }
    let mut deferred = Vec::new();
    for conjunct in formula.conjuncts() {
        let verdict = match conjunct {
            f if f.is_monotone() => Some(entails(p.lower(), t, f, gamma)),
            Formula::Neg(f) if f.is_monotone() => Some(!entails(p.upper(), t, f, gamma)),
            f => {
                deferred.push(f);
                None
            }
        };
        if verdict == Some(false) {
            return Ok(false);
        }
    }
    for f in deferred {
        if !entails3_exhaustive_restricted(p, t, f, gamma, bound)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn entails3_exhaustive_restricted(
    p: &ThreeValuedStream,
    t: TimePoint,
    f: &Formula,
    gamma: &AtomSet,
    bound: usize,
) -> Result<bool> {
    let mut free = p.undefined();
    if !f.reads_support() {
        let relevant = f.atoms();
        free = Stream::from_cells(free.cells().filter(|(_, a)| relevant.contains(a)));
    }
    for_all_between(p.lower(), &free, bound, |k| entails(k, t, f, gamma))
}

/// Definition-level 3-valued entailment by full enumeration of `[lower, upper]`.
pub fn entails3_exhaustive(
    p: &ThreeValuedStream,
    t: TimePoint,
    formula: &Formula,
    gamma: &AtomSet,
    bound: usize,
) -> Result<bool> {
    for_all_between(p.lower(), &p.undefined(), bound, |k| {
        entails(k, t, formula, gamma)
    })
}

fn for_all_between(
    lower: &Stream,
    free: &Stream,
    bound: usize,
    mut pred: impl FnMut(&Stream) -> bool,
) -> Result<bool> {
    let cells: Vec<_> = free.cells().collect();
    if cells.len() > bound {
        return Err(Error::BoundExceeded {
            what: "3-valued entailment",
            count: cells.len(),
            bound,
        });
    }
    for mask in 0u64..(1u64 << cells.len()) {
        let mut k = lower.clone();
        for (i, (tp, a)) in cells.iter().enumerate() {
            if mask >> i & 1 == 1 {
                k.insert(*tp, a.clone());
            }
        }
        if !pred(&k) {
            return Ok(false);
        }
    }
    Ok(true)
}
