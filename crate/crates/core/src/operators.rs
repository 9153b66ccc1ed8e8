//! Constructive operators: the partial model operator `M`, the model operator
//! `MM`, `□`-elimination, the van Emden-Kowalski operator `T` and the Fitting
//! operator `Φ` with its least fixed point `Φ†`.

use serde::Serialize;

use crate::entailment::{entails, entails3, Context};
use crate::error::{Error, Result};
use crate::lang::{Formula, Program};
use crate::stream::{AtomSet, Stream, StreamView, ThreeValuedStream, TimePoint};

/// Partial model operator `M_{I,t}` on a normal formula.
///
/// Atoms are placed at their evaluation point unless they are background
/// atoms; `⊤` places nothing; `□` places its body at every point of the
/// support of the (windowed) stream `I`.
pub fn partial_model(
    stream: &Stream,
    t: TimePoint,
    formula: &Formula,
    gamma: &AtomSet,
) -> Result<Stream> {
    let mut out = Stream::new();
    place(StreamView::full(stream), t, formula, gamma, &mut out)?;
    Ok(out)
}

fn place(
    view: StreamView<'_>,
    t: TimePoint,
    f: &Formula,
    gamma: &AtomSet,
    out: &mut Stream,
) -> Result<()> {
    match f {
        Formula::Top => {}
        Formula::Atom(a) => {
            if !gamma.contains(a) {
                out.insert(t, a.clone());
            }
        }
        Formula::And(x, y) => {
            place(view, t, x, gamma, out)?;
            place(view, t, y, gamma, out)?;
        }
        Formula::Box(x) => {
            for s in view.support().points() {
                place(view, s, x, gamma, out)?;
            }
        }
        Formula::At(s, x) => place(view, *s, x, gamma, out)?,
        Formula::Window(l, r, x) => place(view.narrow(*l, *r, t), t, x, gamma, out)?,
        Formula::Neg(_) | Formula::Or(..) | Formula::Implies(..) | Formula::Diamond(_) => {
            return Err(Error::NotNormal(f.to_string()))
        }
    }
    Ok(())
}

/// Model operator `MM_{I,t}(φ) = M_{M_{I,t}(φ),t}(φ)`.
pub fn model_op(stream: &Stream, t: TimePoint, formula: &Formula, gamma: &AtomSet) -> Result<Stream> {
    let first = partial_model(stream, t, formula, gamma)?;
    partial_model(&first, t, formula, gamma)
}

/// `□`-elimination `φ_{I,t}`: every `□ψ` becomes the conjunction of `@s ψ`
/// over the support it would range over, and `⊤` if that support is empty.
pub fn translate(formula: &Formula, stream: &Stream, t: TimePoint) -> Result<Formula> {
    unbox(formula, StreamView::full(stream), t)
}

fn unbox(f: &Formula, view: StreamView<'_>, t: TimePoint) -> Result<Formula> {
    Ok(match f {
        Formula::Top | Formula::Atom(_) => f.clone(),
        Formula::And(x, y) => Formula::and(unbox(x, view, t)?, unbox(y, view, t)?),
        Formula::Box(x) => Formula::conj(
            view.support()
                .points()
                .map(|s| Ok(Formula::At(s, Box::new(unbox(x, view, s)?))))
                .collect::<Result<Vec<_>>>()?,
        ),
        Formula::At(s, x) => Formula::At(*s, Box::new(unbox(x, view, *s)?)),
        Formula::Window(l, r, x) => {
            Formula::Window(*l, *r, Box::new(unbox(x, view.narrow(*l, *r, t), t)?))
        }
        Formula::Neg(_) | Formula::Or(..) | Formula::Implies(..) | Formula::Diamond(_) => {
            return Err(Error::NotNormal(f.to_string()))
        }
    })
}

/// Conjunction of the heads of the rules selected by `fires`, in source order.
fn fired_heads(
    program: &Program,
    mut fires: impl FnMut(&Formula) -> Result<bool>,
) -> Result<Formula> {
    let mut heads = Vec::new();
    for rule in program.rules() {
        if fires(&rule.body())? {
            heads.push(rule.head.clone());
        }
    }
    Ok(Formula::conj(heads))
}

/// van Emden-Kowalski operator: `D ∪ MM_{I,t}(heads of rules whose bodies hold in I)`.
pub fn tp(program: &Program, ctx: &Context, t: TimePoint, stream: &Stream) -> Result<Stream> {
    if !ctx.data.is_substream(stream) {
        return Err(Error::NotInterpretation);
    }
    let heads = fired_heads(program, |body| Ok(entails(stream, t, body, &ctx.gamma)))?;
    Ok(ctx.data.union(&model_op(stream, t, &heads, &ctx.gamma)?))
}

/// Fitting operator: like [`tp`], but bodies must hold 3-valuedly in
/// `(lower, upper)` and heads are built from `lower`.
pub fn phi(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    p: &ThreeValuedStream,
) -> Result<Stream> {
    let heads = fired_heads(program, |body| {
        entails3(p, t, body, &ctx.gamma, ctx.limits.three_valued)
    })?;
    Ok(ctx.data.union(&model_op(p.lower(), t, &heads, &ctx.gamma)?))
}

/// The iterates `K_0 = ∅, K_{n+1} = Φ(K_n, I)` of a least fixed point computation.
///
/// The last two stages are equal once the computation has converged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixpointTrace {
    pub stages: Vec<Stream>,
    pub converged: bool,
}

impl FixpointTrace {
    pub fn lfp(&self) -> &Stream {
        self.stages.last().expect("a trace has at least one stage")
    }
}

/// `Φ†(I)`: the least fixed point of `Φ(·, I)` for a `t`-model `I`.
pub fn phi_dagger(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    model: &Stream,
) -> Result<FixpointTrace> {
    if !tp(program, ctx, t, model)?.is_substream(model) {
        return Err(Error::NotTModel(t.get()));
    }
    let mut stages = vec![Stream::new()];
    loop {
        let current = stages.last().expect("nonempty");
        let p = ThreeValuedStream::new(current.clone(), model.clone())?;
        let next = phi(program, ctx, t, &p)?;
        debug_assert!(current.is_substream(&next) && next.is_substream(model));
        let done = &next == current;
        stages.push(next);
        if done {
            return Ok(FixpointTrace {
                stages,
                converged: true,
            });
        }
    }
}
