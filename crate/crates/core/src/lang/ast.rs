use std::fmt;

use crate::error::{Error, Result};
use crate::stream::{Atom, AtomSet, ExtNat, TimePoint};

/// A formula over atoms with temporal and window operators.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Top,
    Neg(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Diamond(Box<Formula>),
    Box(Box<Formula>),
    At(TimePoint, Box<Formula>),
    Window(ExtNat, ExtNat, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub box_free: bool,
    pub monotone: bool,
    pub normal: bool,
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name).expect("valid atom name"))
    }

    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Box::new(f))
    }

    pub fn boxed(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    pub fn at(t: u32, f: Formula) -> Formula {
        Formula::At(TimePoint::of(t), Box::new(f))
    }

    pub fn window(l: ExtNat, r: ExtNat, f: Formula) -> Formula {
        Formula::Window(l, r, Box::new(f))
    }

    /// Left-nested conjunction; `⊤` for no conjuncts.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Direct subformulas.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Top => vec![],
            Formula::Neg(f)
            | Formula::Diamond(f)
            | Formula::Box(f)
            | Formula::At(_, f)
            | Formula::Window(_, _, f) => vec![f],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
        }
    }

    pub fn any_node(&self, pred: &impl Fn(&Formula) -> bool) -> bool {
        pred(self) || self.children().into_iter().any(|c| c.any_node(pred))
    }

    pub fn classify(&self) -> Classification {
        let mut c = Classification {
            box_free: true,
            monotone: true,
            normal: true,
        };
        self.classify_into(&mut c);
        c
    }

    fn classify_into(&self, c: &mut Classification) {
        match self {
            Formula::Neg(_) | Formula::Implies(..) => {
                c.monotone = false;
                c.normal = false;
            }
            Formula::Box(_) => {
                c.box_free = false;
                c.monotone = false;
            }
            Formula::Or(..) | Formula::Diamond(_) => c.normal = false,
            _ => {}
        }
        for child in self.children() {
            child.classify_into(c);
        }
    }

    pub fn is_normal(&self) -> bool {
        self.classify().normal
    }

    pub fn is_monotone(&self) -> bool {
        self.classify().monotone
    }

    pub fn is_box_free(&self) -> bool {
        self.classify().box_free
    }

    /// True when satisfaction depends on the support of the stream (`□` or `◇`).
    pub fn reads_support(&self) -> bool {
        self.any_node(&|f| matches!(f, Formula::Box(_) | Formula::Diamond(_)))
    }

    pub fn atoms(&self) -> AtomSet {
        let mut out = AtomSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut AtomSet) {
        if let Formula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    /// Top-level conjuncts, flattening nested `∧`.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            f => vec![f],
        }
    }

    /// Largest `@` time point and finite window radius occurring in the formula.
    pub(crate) fn time_extent(&self) -> (u32, u32) {
        let (mut at, mut radius) = match self {
            Formula::At(t, _) => (t.get(), 0),
            Formula::Window(l, r, _) => (
                0,
                l.finite().unwrap_or(0).max(r.finite().unwrap_or(0)),
            ),
            _ => (0, 0),
        };
        for c in self.children() {
            let (a, r) = c.time_extent();
            at = at.max(a);
            radius = radius.max(r);
        }
        (at, radius)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let wrap = self.precedence() < min;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Top => f.write_str("true")?,
            Formula::Neg(x) => {
                f.write_str("!")?;
                x.fmt_prec(f, 4)?;
            }
            Formula::Diamond(x) => {
                f.write_str("diamond ")?;
                x.fmt_prec(f, 4)?;
            }
            Formula::Box(x) => {
                f.write_str("box ")?;
                x.fmt_prec(f, 4)?;
            }
            Formula::At(t, x) => {
                write!(f, "@{t} ")?;
                x.fmt_prec(f, 4)?;
            }
            Formula::Window(l, r, x) => {
                write!(f, "[{l},{r}] ")?;
                x.fmt_prec(f, 4)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                f.write_str(" -> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// `head :- pos_1, ..., pos_j, not neg_1, ..., not neg_m.`
///
/// Facts keep the single positive body literal `⊤`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Formula,
    pub pos: Vec<Formula>,
    pub neg: Vec<Formula>,
}

impl Rule {
    pub fn new(head: Formula, pos: Vec<Formula>, neg: Vec<Formula>) -> Result<Rule> {
        if !head.is_normal() {
            return Err(Error::NotNormal(head.to_string()));
        }
        Ok(Rule { head, pos, neg })
    }

    pub fn fact(head: Formula) -> Result<Rule> {
        Rule::new(head, vec![Formula::Top], vec![])
    }

    pub fn is_fact(&self) -> bool {
        self.body() == Formula::Top
    }

    /// The body as one formula: positive literals, then negated ones.
    pub fn body(&self) -> Formula {
        Formula::conj(
            self.pos
                .iter()
                .cloned()
                .chain(self.neg.iter().cloned().map(Formula::neg)),
        )
    }

    pub fn is_ordinary(&self) -> bool {
        let atomic = |f: &Formula| matches!(f, Formula::Atom(_));
        atomic(&self.head)
            && self.neg.iter().all(atomic)
            && (self.pos == [Formula::Top] || self.pos.iter().all(atomic))
    }

    pub fn atoms(&self) -> AtomSet {
        let mut out = self.head.atoms();
        for f in self.pos.iter().chain(&self.neg) {
            out.extend(f.atoms());
        }
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if self.pos == [Formula::Top] && self.neg.is_empty() {
            return f.write_str(".");
        }
        f.write_str(" :- ")?;
        let lits = self
            .pos
            .iter()
            .map(ToString::to_string)
            .chain(self.neg.iter().map(|n| format!("not {n}")));
        f.write_str(&itertools::join(lits, ", "))?;
        f.write_str(".")
    }
}

/// A nonempty list of rules.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Result<Program> {
        if rules.is_empty() {
            Err(Error::EmptyProgram)
        } else {
            Ok(Program { rules })
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Conjunction of all heads.
    pub fn heads(&self) -> Formula {
        Formula::conj(self.rules.iter().map(|r| r.head.clone()))
    }

    pub fn atoms(&self) -> AtomSet {
        self.rules.iter().flat_map(Rule::atoms).collect()
    }

    pub fn head_atoms(&self) -> AtomSet {
        self.rules.iter().flat_map(|r| r.head.atoms()).collect()
    }

    pub fn is_ordinary(&self) -> bool {
        self.rules.iter().all(Rule::is_ordinary)
    }

    /// Largest `@` time point and finite window radius over all rules.
    pub(crate) fn time_extent(&self) -> (u32, u32) {
        self.rules
            .iter()
            .flat_map(|r| std::iter::once(&r.head).chain(&r.pos).chain(&r.neg))
            .map(Formula::time_extent)
            .fold((0, 0), |(a, r), (x, y)| (a.max(x), r.max(y)))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
