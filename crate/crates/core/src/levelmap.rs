//! Partitionings and `t`-level mappings: extraction from a `Φ†` trace,
//! verification, and detection of circular justifications.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::answer::{is_phi_answer_stream, is_t_answer_stream, is_t_model};
use crate::entailment::{entails3, Context};
use crate::error::{Error, Result};
use crate::lang::{Formula, Program};
use crate::operators::{model_op, phi, phi_dagger};
use crate::stream::{Stream, ThreeValuedStream, TimePoint};

/// A sequence `(S_0, S_1, ..., S_m)` with `S_0 = ∅`, nonempty and pairwise
/// disjoint parts `S_1..S_m`, covering the stream `S_1 ∪ ... ∪ S_m`.
///
/// The empty stream is covered by the trivial partitioning `(S_0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partitioning {
    parts: Vec<Stream>,
}

impl Partitioning {
    pub fn new(parts: Vec<Stream>) -> Result<Partitioning> {
        match parts.first() {
            None => return Err(Error::InvalidPartitioning("missing level 0".into())),
            Some(s0) if !s0.is_empty() => {
                return Err(Error::InvalidPartitioning("level 0 must be empty".into()))
            }
            _ => {}
        }
        let mut seen = Stream::new();
        for (i, part) in parts.iter().enumerate().skip(1) {
            if part.is_empty() {
                return Err(Error::InvalidPartitioning(format!("level {i} is empty")));
            }
            if !part.is_disjoint(&seen) {
                return Err(Error::InvalidPartitioning(format!(
                    "level {i} overlaps an earlier level"
                )));
            }
            seen.extend(part);
        }
        Ok(Partitioning { parts })
    }

    /// Builds `(∅, S_1, ..., S_m)` from the nonzero levels.
    pub fn from_levels(levels: Vec<Stream>) -> Result<Partitioning> {
        let mut parts = Vec::with_capacity(levels.len() + 1);
        parts.push(Stream::new());
        parts.extend(levels);
        Partitioning::new(parts)
    }

    pub fn parts(&self) -> &[Stream] {
        &self.parts
    }

    /// The index `m` of the last level.
    pub fn height(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn union(&self) -> Stream {
        let mut out = Stream::new();
        for part in &self.parts {
            out.extend(part);
        }
        out
    }
}

impl Serialize for Partitioning {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Level<'a> {
            level: usize,
            stream: &'a Stream,
        }
        let mut seq = serializer.serialize_seq(Some(self.parts.len()))?;
        for (level, stream) in self.parts.iter().enumerate() {
            seq.serialize_element(&Level { level, stream })?;
        }
        seq.end()
    }
}

/// The first level that is not justified by the levels below it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub level: usize,
    /// Cells of the level that the earlier levels do not derive.
    pub cells: Stream,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub valid: bool,
    pub total: bool,
    pub first_violation: Option<Violation>,
}

/// Levels `S_i = I_i - I_{i-1}` of the `Φ†` computation of `I`, or `None`
/// if `I` is not its own least fixed point.
pub fn extract_level_mapping(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    stream: &Stream,
) -> Result<Option<Partitioning>> {
    if !is_t_model(program, ctx, t, stream) {
        return Err(Error::NotTModel(t.get()));
    }
    let trace = phi_dagger(program, ctx, t, stream)?;
    if trace.lfp() != stream {
        return Ok(None);
    }
    let levels = trace
        .stages
        .windows(2)
        .map(|w| w[1].difference(&w[0]))
        .filter(|s| !s.is_empty())
        .collect();
    Partitioning::from_levels(levels).map(Some)
}

/// Checks `S_i ⊆ Φ(S_1 ∪ ... ∪ S_{i-1}, I)` for every level, with `I` the
/// union of all levels; the mapping is total if `I` is also a `t`-model.
pub fn verify_level_mapping(
    partitioning: &Partitioning,
    program: &Program,
    ctx: &Context,
    t: TimePoint,
) -> Result<LevelReport> {
    verify_with(partitioning, program, ctx, t, |p| phi(program, ctx, t, p))
}

/// Same verdicts as [`verify_level_mapping`], computed rule by rule: the
/// heads of all rules whose bodies hold 3-valuedly in `(S_1 ∪ ... ∪ S_{i-1}, I)`
/// are built by the model operator on the lower levels.
pub fn verify_level_mapping_by_rules(
    partitioning: &Partitioning,
    program: &Program,
    ctx: &Context,
    t: TimePoint,
) -> Result<LevelReport> {
    verify_with(partitioning, program, ctx, t, |p| {
        let mut heads = Vec::new();
        for rule in program.rules() {
            if entails3(p, t, &rule.body(), &ctx.gamma, ctx.limits.three_valued)? {
                heads.push(rule.head.clone());
            }
        }
        let derived = model_op(p.lower(), t, &Formula::conj(heads), &ctx.gamma)?;
        Ok(ctx.data.union(&derived))
    })
}

fn verify_with(
    partitioning: &Partitioning,
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    justified: impl Fn(&ThreeValuedStream) -> Result<Stream>,
) -> Result<LevelReport> {
    let whole = partitioning.union();
    let mut below = Stream::new();
    let mut first_violation = None;
    for (level, part) in partitioning.parts().iter().enumerate().skip(1) {
        let p = ThreeValuedStream::new(below.clone(), whole.clone())?;
        let missing = part.difference(&justified(&p)?);
        if !missing.is_empty() {
            first_violation = Some(Violation {
                level,
                cells: missing,
            });
            break;
        }
        below.extend(part);
    }
    let valid = first_violation.is_none();
    Ok(LevelReport {
        valid,
        total: valid && is_t_model(program, ctx, t, &whole),
        first_violation,
    })
}

/// `I` is a `t`-answer stream whose atoms are not all constructively derivable.
pub fn detect_circular(
    program: &Program,
    ctx: &Context,
    t: TimePoint,
    stream: &Stream,
) -> Result<bool> {
    Ok(is_t_answer_stream(program, ctx, t, stream)?
        && !is_phi_answer_stream(program, ctx, t, stream)?)
}
