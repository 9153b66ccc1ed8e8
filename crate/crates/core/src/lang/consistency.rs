//! Syntactic check that a normal head formula can be made true at `t`.
//!
//! The check follows how the partial model operator builds a model: every
//! atom it would place must land inside the range left open by the enclosing
//! windows. Background atoms never need to be placed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lang::{Formula, Program};
use crate::stream::{AtomSet, Interval, TimePoint};

/// Returns `true` only if the model operator is guaranteed to produce a
/// `t`-model of `formula`. A `false` answer does not prove inconsistency.
pub fn check_t_consistent(formula: &Formula, t: TimePoint, gamma: &AtomSet) -> Result<bool> {
    if !formula.is_normal() {
        return Err(Error::NotNormal(formula.to_string()));
    }
    Ok(placeable(formula, t, Interval::ALL, gamma))
}

fn placeable(f: &Formula, at: TimePoint, range: Interval, gamma: &AtomSet) -> bool {
    match f {
        Formula::Top => true,
        Formula::Atom(a) => gamma.contains(a) || range.contains(at),
        Formula::And(x, y) => placeable(x, at, range, gamma) && placeable(y, at, range, gamma),
        Formula::At(t, x) => placeable(x, *t, range, gamma),
        Formula::Window(l, r, x) => {
            placeable(x, at, range.intersect(&Interval::window(*l, *r, at)), gamma)
        }
        Formula::Box(x) => box_points(x, &range)
            .into_iter()
            .all(|p| placeable(x, p, range, gamma)),
        Formula::Neg(_)
        | Formula::Or(..)
        | Formula::Implies(..)
        | Formula::Diamond(_) => unreachable!("checked normal"),
    }
}

/// Points of `range` at which the body of a `□` must be checked.
///
/// Far from the constants and radii occurring in `body`, the check gives the
/// same verdict at every point, so only the points near both ends are tried.
fn box_points(body: &Formula, range: &Interval) -> Vec<TimePoint> {
    let Interval::Span { lo, hi } = *range else {
        return vec![];
    };
    let (max_at, _) = body.time_extent();
    let spread = radius_sum(body) + u64::from(max_at) + 1;
    let lo = u64::from(lo.get());
    let near_lo = lo + spread;
    let mut points: Vec<u64> = match hi.finite() {
        None => (lo..=near_lo).collect(),
        Some(hi) => {
            let hi = u64::from(hi);
            if hi <= near_lo + spread {
                (lo..=hi).collect()
            } else {
                (lo..=near_lo).chain(hi - spread..=hi).collect()
            }
        }
    };
    points.dedup();
    points
        .into_iter()
        .map(|p| TimePoint::of(u32::try_from(p).unwrap_or(u32::MAX)))
        .collect()
}

fn radius_sum(f: &Formula) -> u64 {
    let own = match f {
        Formula::Window(l, r, _) => {
            u64::from(l.finite().unwrap_or(0)) + u64::from(r.finite().unwrap_or(0))
        }
        _ => 0,
    };
    own + f.children().into_iter().map(radius_sum).sum::<u64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HeadIssue {
    /// The head is `⊤` and can never contribute anything.
    TrivialHead,
    /// The head may have no model at the evaluation time point.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeadReport {
    pub rule: usize,
    pub head: String,
    pub normal: bool,
    pub consistent: bool,
    pub issue: Option<HeadIssue>,
}

/// Per-rule head report at time point `t`.
pub fn validate_heads(program: &Program, t: TimePoint, gamma: &AtomSet) -> Vec<HeadReport> {
    program
        .rules()
        .iter()
        .enumerate()
        .map(|(idx, rule)| {
            let normal = rule.head.is_normal();
            let consistent =
                normal && check_t_consistent(&rule.head, t, gamma).unwrap_or(false);
            let issue = if rule.head == Formula::Top {
                Some(HeadIssue::TrivialHead)
            } else if !consistent {
                Some(HeadIssue::Inconsistent)
            } else {
                None
            };
            HeadReport {
                rule: idx + 1,
                head: rule.head.to_string(),
                normal,
                consistent,
                issue,
            }
        })
        .collect()
}
