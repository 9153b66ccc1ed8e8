//! Recursive-descent parser for programs and formulas.
//!
//! Precedence from loosest to tightest: `->` (right associative), `|`, `&`,
//! then the prefix operators `!`, `box`, `diamond`, `@T` and `[l,r]`.
//! `not` is default negation and may only start a body literal.

use crate::error::{Error, Result};
use crate::lang::ast::{Formula, Program, Rule};
use crate::stream::{Atom, ExtNat, TimePoint};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    Inf,
    True,
    Box,
    Diamond,
    Not,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Amp,
    Bar,
    Arrow,
    Bang,
    At,
    If,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Inf => "inf",
            Tok::True => "true",
            Tok::Box => "box",
            Tok::Diamond => "diamond",
            Tok::Not => "not",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::Bang => "!",
            Tok::At => "@",
            Tok::If => ":-",
            Tok::Dot => ".",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let single = match c {
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '!' => Some(Tok::Bang),
            '@' => Some(Tok::At),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        let tok = if let Some(t) = single {
            advance(1, &mut i, &mut col);
            t
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            advance(2, &mut i, &mut col);
            Tok::Arrow
        } else if c == ':' && chars.get(i + 1) == Some(&'-') {
            advance(2, &mut i, &mut col);
            Tok::If
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| Error::Syntax {
                line: l0,
                col: c0,
                expected: vec!["a number below 2^32".into()],
                found: format!("`{text}`"),
            })?;
            Tok::Int(n)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                advance(1, &mut i, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            match word.as_str() {
                "inf" => Tok::Inf,
                "true" => Tok::True,
                "box" => Tok::Box,
                "diamond" => Tok::Diamond,
                "not" => Tok::Not,
                _ => Tok::Ident(word),
            }
        } else {
            return Err(Error::Syntax {
                line: l0,
                col: c0,
                expected: vec!["a formula token".into()],
                found: format!("`{c}`"),
            });
        };
        out.push(Spanned {
            tok,
            line: l0,
            col: c0,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

const FORMULA_START: &[&str] = &[
    "an atom", "`true`", "`!`", "`box`", "`diamond`", "`@`", "`[`", "`(`",
];

impl Parser {
    fn new(src: &str) -> Result<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> Error {
        let here = self.peek();
        Error::Syntax {
            line: here.line,
            col: here.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.error(&[&format!("`{}`", tok.spelling())]))
        }
    }

    fn program(&mut self) -> Result<Program> {
        let mut rules = Vec::new();
        while self.peek().tok != Tok::Eof {
            rules.push(self.rule()?);
        }
        Program::new(rules)
    }

    fn rule(&mut self) -> Result<Rule> {
        let start = self.peek().clone();
        let head = self.formula()?;
        if !head.is_normal() {
            return Err(Error::NonNormalHead {
                line: start.line,
                col: start.col,
                head: head.to_string(),
            });
        }
        if self.eat(&Tok::Dot) {
            return Ok(Rule {
                head,
                pos: vec![Formula::Top],
                neg: vec![],
            });
        }
        if !self.eat(&Tok::If) {
            return Err(self.error(&["`:-`", "`.`", "`&`", "`|`", "`->`"]));
        }
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        loop {
            if self.eat(&Tok::Not) {
                neg.push(self.formula()?);
            } else {
                pos.push(self.formula()?);
            }
            if self.eat(&Tok::Dot) {
                break;
            }
            if !self.eat(&Tok::Comma) {
                return Err(self.error(&["`,`", "`.`", "`&`", "`|`", "`->`"]));
            }
        }
        Ok(Rule { head, pos, neg })
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Bar) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        let here = self.peek().clone();
        match here.tok {
            Tok::Bang => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            Tok::Box => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Diamond => {
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            Tok::At => {
                self.bump();
                let num = self.peek().clone();
                let Tok::Int(n) = num.tok else {
                    return Err(self.error(&["a time point"]));
                };
                self.bump();
                let t = TimePoint::new(n).map_err(|_| Error::TimeZero {
                    line: num.line,
                    col: num.col,
                })?;
                Ok(Formula::At(t, Box::new(self.unary()?)))
            }
            Tok::LBracket => {
                self.bump();
                let l = self.ext_nat()?;
                self.expect(Tok::Comma)?;
                let r = self.ext_nat()?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::window(l, r, self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::Top)
            }
            Tok::Ident(ref name) => {
                let atom = Atom::new(name).map_err(|_| self.error(FORMULA_START))?;
                self.bump();
                Ok(Formula::Atom(atom))
            }
            _ => Err(self.error(FORMULA_START)),
        }
    }

    fn ext_nat(&mut self) -> Result<ExtNat> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.bump();
                Ok(ExtNat::Fin(n))
            }
            Tok::Inf => {
                self.bump();
                Ok(ExtNat::Inf)
            }
            _ => Err(self.error(&["a number", "`inf`"])),
        }
    }
}

pub fn parse_program(src: &str) -> Result<Program> {
    Parser::new(src)?.program()
}

/// Parses a single formula. A leading `not` negates the whole formula, as in
/// a negative body literal.
pub fn parse_formula(src: &str) -> Result<Formula> {
    let mut p = Parser::new(src)?;
    let negated = p.eat(&Tok::Not);
    let mut f = p.formula()?;
    if negated {
        f = Formula::neg(f);
    }
    if p.peek().tok != Tok::Eof {
        return Err(p.error(&["end of input", "`&`", "`|`", "`->`"]));
    }
    Ok(f)
}

pub fn print_program(p: &Program) -> String {
    p.to_string()
}
