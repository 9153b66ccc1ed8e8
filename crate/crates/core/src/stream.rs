//! Streams over a propositional alphabet.
//!
//! A stream assigns a set of atoms to every time point `t >= 1`. Only finitely
//! many time points are ever nonempty, so a stream is stored as a sparse map
//! from time points to nonempty atom sets. Because empty entries are never
//! kept, two streams are equal exactly when their maps are equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use itertools::Itertools;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A time point, always at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(u32);

impl TimePoint {
    pub const FIRST: TimePoint = TimePoint(1);

    pub fn new(value: u32) -> Result<Self> {
        if value == 0 {
            Err(Error::InvalidTimePoint)
        } else {
            Ok(TimePoint(value))
        }
    }

    /// Panicking constructor for literals known to be positive.
    pub const fn of(value: u32) -> Self {
        assert!(value >= 1, "time points start at 1");
        TimePoint(value)
    }

    pub const fn get(self) -> u32 {
        self.0
    }

    pub fn succ(self) -> Self {
        TimePoint(self.0 + 1)
    }

    /// `self - n`, clamped to the first time point.
    pub fn saturating_back(self, n: ExtNat) -> Self {
        match n {
            ExtNat::Inf => TimePoint::FIRST,
            ExtNat::Fin(n) => TimePoint(self.0.saturating_sub(n).max(1)),
        }
    }

    pub fn forward(self, n: ExtNat) -> ExtNat {
        match n {
            ExtNat::Inf => ExtNat::Inf,
            ExtNat::Fin(n) => ExtNat::Fin(self.0.saturating_add(n)),
        }
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for TimePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl<'de> Deserialize<'de> for TimePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = u32::deserialize(d)?;
        TimePoint::new(v).map_err(D::Error::custom)
    }
}

/// A natural number or infinity. `Fin(n) < Inf` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtNat {
    Fin(u32),
    Inf,
}

impl ExtNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtNat::Fin(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Inf => None,
        }
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtNat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(ExtNat::Inf);
        }
        s.parse::<u32>()
            .map(ExtNat::Fin)
            .map_err(|_| Error::BadInterval(s.to_string()))
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A set of consecutive time points `[lo, hi]`, possibly unbounded above, or empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interval {
    Empty,
    Span { lo: TimePoint, hi: ExtNat },
}

impl Interval {
    /// All time points `[1, ∞)`.
    pub const ALL: Interval = Interval::Span {
        lo: TimePoint::FIRST,
        hi: ExtNat::Inf,
    };

    pub fn new(lo: TimePoint, hi: ExtNat) -> Self {
        if hi < ExtNat::Fin(lo.get()) {
            Interval::Empty
        } else {
            Interval::Span { lo, hi }
        }
    }

    pub fn closed(lo: u32, hi: u32) -> Result<Self> {
        let lo = TimePoint::new(lo)?;
        Ok(Interval::new(lo, ExtNat::Fin(hi)))
    }

    pub fn point(t: TimePoint) -> Self {
        Interval::Span {
            lo: t,
            hi: ExtNat::Fin(t.get()),
        }
    }

    /// The range a window `[ℓ, r]` selects around `t`: `[max(1, t-ℓ), t+r]`.
    pub fn window(l: ExtNat, r: ExtNat, t: TimePoint) -> Self {
        Interval::new(t.saturating_back(l), t.forward(r))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Interval::Empty => true,
            Interval::Span { hi, .. } => hi.is_finite(),
        }
    }

    pub fn lo(&self) -> Option<TimePoint> {
        match self {
            Interval::Empty => None,
            Interval::Span { lo, .. } => Some(*lo),
        }
    }

    pub fn hi(&self) -> Option<ExtNat> {
        match self {
            Interval::Empty => None,
            Interval::Span { hi, .. } => Some(*hi),
        }
    }

    pub fn contains(&self, t: TimePoint) -> bool {
        match self {
            Interval::Empty => false,
            Interval::Span { lo, hi } => *lo <= t && ExtNat::Fin(t.get()) <= *hi,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        match (self, other) {
            (Interval::Span { lo: a, hi: b }, Interval::Span { lo: c, hi: d }) => {
                Interval::new((*a).max(*c), (*b).min(*d))
            }
            _ => Interval::Empty,
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        match (self, other) {
            (Interval::Empty, x) | (x, Interval::Empty) => *x,
            (Interval::Span { lo: a, hi: b }, Interval::Span { lo: c, hi: d }) => {
                Interval::new((*a).min(*c), (*b).max(*d))
            }
        }
    }

    pub fn is_subset(&self, other: &Interval) -> bool {
        match (self, other) {
            (Interval::Empty, _) => true,
            (_, Interval::Empty) => false,
            (Interval::Span { lo: a, hi: b }, Interval::Span { lo: c, hi: d }) => c <= a && b <= d,
        }
    }

    /// Number of time points, `None` when unbounded.
    pub fn len(&self) -> Option<u64> {
        match self {
            Interval::Empty => Some(0),
            Interval::Span { lo, hi } => hi.finite().map(|h| u64::from(h - lo.get()) + 1),
        }
    }

    /// The time points of a finite interval.
    ///
    /// Panics on unbounded intervals.
    pub fn points(&self) -> impl Iterator<Item = TimePoint> {
        let (lo, hi) = match self {
            Interval::Empty => (1, 0),
            Interval::Span { lo, hi } => (
                lo.get(),
                hi.finite().expect("cannot iterate an unbounded interval"),
            ),
        };
        (lo..=hi).map(TimePoint)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Empty => f.write_str("[]"),
            Interval::Span { lo, hi } => write!(f, "[{lo},{hi}]"),
        }
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Accepts `[lo,hi]`, `lo,hi`, `lo..hi` or a single time point.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadInterval(s.to_string());
        let body = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (lo, hi) = match body.split_once(',').or_else(|| body.split_once("..")) {
            Some((lo, hi)) => (lo, hi),
            None => (body, body),
        };
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let lo = TimePoint::new(lo).map_err(|_| bad())?;
        let hi: ExtNat = hi.parse().map_err(|_| bad())?;
        Ok(Interval::new(lo, hi))
    }
}

/// A propositional atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

/// Words reserved by the program syntax; none of them can name an atom.
pub const KEYWORDS: [&str; 5] = ["box", "diamond", "not", "true", "inf"];

impl Atom {
    /// Identifiers are `[A-Za-z_][A-Za-z0-9_']*`, excluding keywords.
    pub fn new(name: &str) -> Result<Self> {
        let mut chars = name.chars();
        let ok_head = chars
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
        let ok_tail = chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if ok_head && ok_tail && !KEYWORDS.contains(&name) {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(Error::InvalidAtom(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Atom::new(&s).map_err(D::Error::custom)
    }
}

pub type AtomSet = BTreeSet<Atom>;

/// Build an atom set from names, panicking on invalid names.
pub fn atoms<'a>(names: impl IntoIterator<Item = &'a str>) -> AtomSet {
    names
        .into_iter()
        .map(|n| Atom::new(n).expect("valid atom name"))
        .collect()
}

/// A single atom occurrence: `atom` holds at `time`.
pub type Cell = (TimePoint, Atom);

/// A stream with finite support.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stream {
    entries: BTreeMap<TimePoint, AtomSet>,
}

impl Stream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = Cell>) -> Self {
        let mut s = Stream::new();
        for (t, a) in cells {
            s.insert(t, a);
        }
        s
    }

    /// Convenience constructor from `(t, ["a", "b"])` pairs.
    pub fn from_pairs<'a, I, A>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (u32, A)>,
        A: IntoIterator<Item = &'a str>,
    {
        let mut s = Stream::new();
        for (t, names) in pairs {
            for a in atoms(names) {
                s.insert(TimePoint::of(t), a);
            }
        }
        s
    }

    /// The stream `{a}_t`.
    pub fn singleton(t: TimePoint, a: Atom) -> Self {
        Stream::from_cells([(t, a)])
    }

    pub fn insert(&mut self, t: TimePoint, a: Atom) -> bool {
        self.entries.entry(t).or_default().insert(a)
    }

    pub fn remove(&mut self, t: TimePoint, a: &Atom) -> bool {
        let Some(set) = self.entries.get_mut(&t) else {
            return false;
        };
        let removed = set.remove(a);
        if set.is_empty() {
            self.entries.remove(&t);
        }
        removed
    }

    pub fn contains(&self, t: TimePoint, a: &Atom) -> bool {
        self.entries.get(&t).is_some_and(|s| s.contains(a))
    }

    /// Atoms at `t`; `None` stands for the empty set.
    pub fn at(&self, t: TimePoint) -> Option<&AtomSet> {
        self.entries.get(&t)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The nonempty time points with their atoms, in time order.
    pub fn entries(&self) -> impl Iterator<Item = (TimePoint, &AtomSet)> {
        self.entries.iter().map(|(t, s)| (*t, s))
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.entries
            .iter()
            .flat_map(|(t, s)| s.iter().map(move |a| (*t, a.clone())))
    }

    /// Total number of atom occurrences.
    pub fn cell_count(&self) -> usize {
        self.entries.values().map(BTreeSet::len).sum()
    }

    pub fn atoms(&self) -> AtomSet {
        self.entries.values().flatten().cloned().collect()
    }

    /// The tightest interval covering every nonempty time point.
    pub fn support(&self) -> Interval {
        match (self.entries.keys().next(), self.entries.keys().next_back()) {
            (Some(lo), Some(hi)) => Interval::new(*lo, ExtNat::Fin(hi.get())),
            _ => Interval::Empty,
        }
    }

    pub fn is_substream(&self, of: &Stream) -> bool {
        self.entries.iter().all(|(t, s)| {
            of.entries
                .get(t)
                .is_some_and(|other| s.is_subset(other))
        })
    }

    pub fn union(&self, other: &Stream) -> Stream {
        let mut out = self.clone();
        out.extend(other);
        out
    }

    pub fn extend(&mut self, other: &Stream) {
        for (t, set) in &other.entries {
            self.entries
                .entry(*t)
                .or_default()
                .extend(set.iter().cloned());
        }
    }

    /// Point-wise relative complement.
    pub fn difference(&self, other: &Stream) -> Stream {
        let mut entries = BTreeMap::new();
        for (t, set) in &self.entries {
            let rest: AtomSet = match other.entries.get(t) {
                Some(o) => set.difference(o).cloned().collect(),
                None => set.clone(),
            };
            if !rest.is_empty() {
                entries.insert(*t, rest);
            }
        }
        Stream { entries }
    }

    pub fn intersection(&self, other: &Stream) -> Stream {
        let mut entries = BTreeMap::new();
        for (t, set) in &self.entries {
            if let Some(o) = other.entries.get(t) {
                let common: AtomSet = set.intersection(o).cloned().collect();
                if !common.is_empty() {
                    entries.insert(*t, common);
                }
            }
        }
        Stream { entries }
    }

    pub fn is_disjoint(&self, other: &Stream) -> bool {
        self.entries.iter().all(|(t, s)| {
            other
                .entries
                .get(t)
                .is_none_or(|o| s.is_disjoint(o))
        })
    }

    /// The part of the stream inside `range`.
    pub fn restrict(&self, range: &Interval) -> Stream {
        let entries = match range {
            Interval::Empty => BTreeMap::new(),
            Interval::Span { lo, hi } => {
                let upper = match hi {
                    ExtNat::Fin(h) => std::ops::Bound::Included(TimePoint(*h)),
                    ExtNat::Inf => std::ops::Bound::Unbounded,
                };
                self.entries
                    .range((std::ops::Bound::Included(*lo), upper))
                    .map(|(t, s)| (*t, s.clone()))
                    .collect()
            }
        };
        Stream { entries }
    }

    /// The window `I[ℓ, r; t]`: the stream restricted to `[max(1, t-ℓ), t+r]`.
    pub fn apply_window(&self, l: ExtNat, r: ExtNat, t: TimePoint) -> Stream {
        self.restrict(&Interval::window(l, r, t))
    }

    /// Paper-style notation, e.g. `{a}_1 {a,b}_5`; `∅` for the empty stream.
    pub fn notation(&self) -> String {
        if self.is_empty() {
            return "∅".to_string();
        }
        self.entries
            .iter()
            .map(|(t, s)| format!("{{{}}}_{t}", s.iter().join(",")))
            .join(" ")
    }

    /// Serialise in the line-oriented text format (`t: a b`).
    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(t, s)| format!("{t}: {}\n", s.iter().join(" ")))
            .collect()
    }

    pub fn parse_text(text: &str) -> Result<Stream> {
        StreamFile::parse(text).map(|f| f.stream)
    }
}

impl fmt::Display for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())
    }
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    t: TimePoint,
    atoms: Vec<Atom>,
}

impl Serialize for Stream {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.entries.iter().map(|(t, set)| EntryRecord {
            t: *t,
            atoms: set.iter().cloned().collect(),
        }))
    }
}

impl<'de> Deserialize<'de> for Stream {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let records = Vec::<EntryRecord>::deserialize(d)?;
        Ok(Stream::from_cells(records.into_iter().flat_map(|r| {
            let t = r.t;
            r.atoms.into_iter().map(move |a| (t, a))
        })))
    }
}

/// Contents of a stream file: the stream plus an optional `gamma:` stanza.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StreamFile {
    pub stream: Stream,
    pub gamma: Option<AtomSet>,
}

impl StreamFile {
    pub fn parse(text: &str) -> Result<StreamFile> {
        let mut file = StreamFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::StreamFormat { line: line_no, msg };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err("expected `t: atom ...`".to_string()))?;
            let names = rest.split_whitespace().map(|n| {
                Atom::new(n).map_err(|_| err(format!("invalid atom name `{n}`")))
            });
            if key.trim() == "gamma" {
                let set = file.gamma.get_or_insert_with(AtomSet::new);
                for a in names {
                    set.insert(a?);
                }
                continue;
            }
            let t: u32 = key
                .trim()
                .parse()
                .map_err(|_| err(format!("invalid time point `{}`", key.trim())))?;
            let t = TimePoint::new(t).map_err(|_| err("time point must be at least 1".into()))?;
            for a in names {
                file.stream.insert(t, a?);
            }
        }
        Ok(file)
    }
}

/// A stream read through a sequence of windows.
///
/// `range` is the intersection of the windows applied so far. Atoms are only
/// visible inside `range`, and the support used by `□` and `◇` is the support
/// of the underlying stream cut down to `range`.
#[derive(Debug, Clone, Copy)]
pub struct StreamView<'a> {
    pub stream: &'a Stream,
    pub range: Interval,
}

impl<'a> StreamView<'a> {
    pub fn full(stream: &'a Stream) -> Self {
        StreamView {
            stream,
            range: Interval::ALL,
        }
    }

    pub fn narrow(&self, l: ExtNat, r: ExtNat, t: TimePoint) -> Self {
        StreamView {
            stream: self.stream,
            range: self.range.intersect(&Interval::window(l, r, t)),
        }
    }

    pub fn support(&self) -> Interval {
        self.stream.support().intersect(&self.range)
    }

    pub fn holds(&self, t: TimePoint, a: &Atom) -> bool {
        self.range.contains(t) && self.stream.contains(t, a)
    }

    /// The visible part as a plain stream.
    pub fn materialize(&self) -> Stream {
        self.stream.restrict(&self.range)
    }
}

/// A pair of streams `(lower, upper)` with `lower ⊆ upper`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ThreeValuedStream {
    lower: Stream,
    upper: Stream,
}

impl ThreeValuedStream {
    pub fn new(lower: Stream, upper: Stream) -> Result<Self> {
        if lower.is_substream(&upper) {
            Ok(ThreeValuedStream { lower, upper })
        } else {
            Err(Error::InvalidThreeValued)
        }
    }

    /// The 2-valued stream `(s, s)`.
    pub fn exact(s: Stream) -> Self {
        ThreeValuedStream {
            lower: s.clone(),
            upper: s,
        }
    }

    pub fn lower(&self) -> &Stream {
        &self.lower
    }

    pub fn upper(&self) -> &Stream {
        &self.upper
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Cells whose truth value is undefined.
    pub fn undefined(&self) -> Stream {
        self.upper.difference(&self.lower)
    }

    /// Precision ordering: `self ⊆_p other`.
    pub fn precision_leq(&self, other: &ThreeValuedStream) -> bool {
        self.lower.is_substream(&other.lower) && other.upper.is_substream(&self.upper)
    }
}

/// Default cap on occurrences for [`enumerate_substreams`].
pub const DEFAULT_SUBSTREAM_BOUND: usize = 24;

/// Every substream of `s`, ordered by occurrence count and then
/// lexicographically by the chosen cells.
pub fn enumerate_substreams(s: &Stream, bound: usize) -> Result<Vec<Stream>> {
    let cells: Vec<Cell> = s.cells().collect();
    if cells.len() > bound {
        return Err(Error::BoundExceeded {
            what: "substream enumeration",
            count: cells.len(),
            bound,
        });
    }
    Ok(subsets_by_size(&cells)
        .map(|chosen| Stream::from_cells(chosen.into_iter().cloned()))
        .collect())
}

/// Subsets of `items`, smallest first, each size in lexicographic index order.
pub(crate) fn subsets_by_size<T>(items: &[T]) -> impl Iterator<Item = Vec<&T>> {
    (0..=items.len()).flat_map(move |k| items.iter().combinations(k))
}
