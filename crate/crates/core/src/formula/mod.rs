//! MITL abstract syntax, concrete syntax, and pointwise evaluation.
//!
//! Grammar (loosest first): `a | b`, `a & b`, `a U[l,u] b` (right
//! associative), then prefix operators `! X[l,u] F[l,u] G[l,u]`. An omitted
//! interval means `[0,inf)`. `true`/`T` and `false` are sugar over the
//! reserved proposition `p0`.

mod eval;
mod word;

pub use eval::{eval_all, eval_at, eval_lasso, eval_lasso_all, Verdict3};
pub use word::{Event, Lasso, TimedWord};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ext::{ExtReal, Rat};

/// Proposition behind the `true` sugar.
pub const RESERVED_PROP: &str = "p0";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lower: u64,
    /// `None` is `+inf`.
    pub upper: Option<u64>,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl Interval {
    pub const ANY: Interval = Interval { lower: 0, upper: None, lower_closed: true, upper_closed: false };

    pub fn new(lower: u64, upper: Option<u64>, lower_closed: bool, upper_closed: bool) -> Result<Self, String> {
        let iv = Interval { lower, upper, lower_closed, upper_closed };
        iv.check()?;
        Ok(iv)
    }

    pub fn closed(lower: u64, upper: u64) -> Self {
        Interval::new(lower, Some(upper), true, true).expect("valid interval")
    }

    pub fn open(lower: u64, upper: u64) -> Self {
        Interval::new(lower, Some(upper), false, false).expect("valid interval")
    }

    fn check(&self) -> Result<(), String> {
        match self.upper {
            None => {
                if self.upper_closed {
                    return Err("an infinite upper bound must be open".into());
                }
            }
            Some(u) => {
                if u == 0 && self.lower == 0 {
                    if !(self.lower_closed && self.upper_closed) {
                        return Err("the only interval with equal ends is [0,0]".into());
                    }
                } else if self.lower >= u {
                    return Err(format!("singular or empty interval with ends {} and {u}", self.lower));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, d: Rat) -> bool {
        self.above_lower(d) && self.below_upper(d)
    }

    pub fn contains_ext(&self, d: ExtReal) -> bool {
        match d {
            ExtReal::Fin(r) => self.contains(r),
            _ => false,
        }
    }

    /// `d` satisfies the lower bound.
    pub fn above_lower(&self, d: Rat) -> bool {
        let b = Rat::from_integer(self.lower as i64);
        if self.lower_closed {
            d >= b
        } else {
            d > b
        }
    }

    /// `d` satisfies the upper bound.
    pub fn below_upper(&self, d: Rat) -> bool {
        match self.upper {
            None => true,
            Some(c) => {
                let c = Rat::from_integer(c as i64);
                if self.upper_closed {
                    d <= c
                } else {
                    d < c
                }
            }
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(Rat::from_integer(0))
    }

    /// Lower end 0 and closed: every distance below the upper bound is in.
    pub fn is_downward_closed(&self) -> bool {
        self.lower == 0 && self.lower_closed
    }

    pub fn is_unbounded(&self) -> bool {
        self.upper.is_none()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lower_closed { '[' } else { '(' };
        let r = if self.upper_closed { ']' } else { ')' };
        match self.upper {
            Some(u) => write!(f, "{l}{},{u}{r}", self.lower),
            None => write!(f, "{l}{},inf{r}", self.lower),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Interval, Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn prop(p: &str) -> Formula {
        Formula::Prop(p.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(i: Interval, f: Formula) -> Formula {
        Formula::Next(i, Box::new(f))
    }

    pub fn until(i: Interval, a: Formula, b: Formula) -> Formula {
        Formula::Until(i, Box::new(a), Box::new(b))
    }

    pub fn tt() -> Formula {
        Formula::or(Formula::prop(RESERVED_PROP), Formula::not(Formula::prop(RESERVED_PROP)))
    }

    pub fn eventually(i: Interval, f: Formula) -> Formula {
        Formula::until(i, Formula::tt(), f)
    }

    pub fn globally(i: Interval, f: Formula) -> Formula {
        Formula::not(Formula::eventually(i, Formula::not(f)))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Prop(_) => vec![],
            Formula::Not(a) | Formula::Next(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(_, a, b) => vec![a, b],
        }
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        if let Formula::Prop(p) = self {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Intervals of all Until subformulae, outermost first.
    pub fn until_intervals(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let Formula::Until(i, _, _) = f {
                out.push(*i);
            }
            stack.extend(f.children().into_iter().rev());
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Not(a) => write!(f, "!{}", Paren(a)),
            Formula::And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Formula::Or(a, b) => write!(f, "{} | {}", Paren(a), Paren(b)),
            Formula::Next(i, a) => write!(f, "X{i} {}", Paren(a)),
            Formula::Until(i, a, b) => write!(f, "{} U{i} {}", Paren(a), Paren(b)),
        }
    }
}

struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::Prop(_) => write!(f, "{}", self.0),
            other => write!(f, "({other})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let f = p.disjunction()?;
    p.ws();
    if p.pos < p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { pos: self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while self.eat(b'|') {
            let g = self.conjunction()?;
            f = Formula::or(f, g);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.until()?;
        while self.eat(b'&') {
            let g = self.until()?;
            f = Formula::and(f, g);
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let f = self.unary()?;
        if self.peek() == Some(b'U') {
            self.pos += 1;
            let i = self.opt_interval()?;
            let g = self.until()?;
            return Ok(Formula::until(i, f, g));
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(c @ (b'X' | b'F' | b'G')) => {
                self.pos += 1;
                let i = self.opt_interval()?;
                let f = self.unary()?;
                Ok(match c {
                    b'X' => Formula::next(i, f),
                    b'F' => Formula::eventually(i, f),
                    _ => Formula::globally(i, f),
                })
            }
            Some(b'(') => {
                self.pos += 1;
                let f = self.disjunction()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(f)
            }
            Some(b'T') => {
                self.pos += 1;
                Ok(Formula::tt())
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while self.ident_continues(self.pos) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                Ok(match name {
                    "true" => Formula::tt(),
                    "false" => Formula::not(Formula::tt()),
                    _ => Formula::prop(name),
                })
            }
            Some(_) => Err(self.err("expected a formula")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn ident_continues(&self, at: usize) -> bool {
        matches!(self.s.get(at), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() || *c == b'_')
    }

    /// An interval starts with `[`, or with `(` followed by a digit.
    fn opt_interval(&mut self) -> Result<Interval, ParseError> {
        let start = self.peek();
        let is_interval = match start {
            Some(b'[') => true,
            Some(b'(') => {
                let mut k = self.pos + 1;
                while k < self.s.len() && self.s[k].is_ascii_whitespace() {
                    k += 1;
                }
                matches!(self.s.get(k), Some(c) if c.is_ascii_digit())
            }
            _ => false,
        };
        if !is_interval {
            return Ok(Interval::ANY);
        }
        let at = self.pos;
        let lower_closed = start == Some(b'[');
        self.pos += 1;
        let lower = self.number()?.ok_or_else(|| self.err("expected a natural number"))?;
        if !self.eat(b',') {
            return Err(self.err("expected `,`"));
        }
        let upper = self.number()?;
        let upper_closed = match self.peek() {
            Some(b']') => true,
            Some(b')') => false,
            _ => return Err(self.err("expected `]` or `)`")),
        };
        self.pos += 1;
        Interval::new(lower, upper, lower_closed, upper_closed).map_err(|msg| ParseError { pos: at, msg })
    }

    /// A natural number, or `None` for `inf`.
    fn number(&mut self) -> Result<Option<u64>, ParseError> {
        self.ws();
        if self.s[self.pos..].starts_with(b"inf") {
            self.pos += 3;
            return Ok(None);
        }
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a natural number or `inf`"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii")
            .parse()
            .map(Some)
            .map_err(|_| ParseError { pos: start, msg: "number out of range".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_until() {
        let f = parse("p U[1,2] q").unwrap();
        assert_eq!(f, Formula::until(Interval::closed(1, 2), Formula::prop("p"), Formula::prop("q")));
    }

    #[test]
    fn parses_point_next() {
        let f = parse("X[0,0] p").unwrap();
        assert_eq!(f, Formula::next(Interval::closed(0, 0), Formula::prop("p")));
    }

    #[test]
    fn rejects_singular_interval() {
        assert!(parse("p U[2,2] q").is_err());
        assert!(parse("p U(0,0] q").is_err());
        assert!(parse("p U[1,inf] q").is_err());
    }

    #[test]
    fn precedence_and_sugar() {
        let f = parse("!p U(1,2) X(5,7] (q & r)").unwrap();
        let expected = Formula::until(
            Interval::open(1, 2),
            Formula::not(Formula::prop("p")),
            Formula::next(Interval::new(5, Some(7), false, true).unwrap(), Formula::and(Formula::prop("q"), Formula::prop("r"))),
        );
        assert_eq!(f, expected);
        let g = parse("(T U[1,2] p) & !(T U p)").unwrap();
        assert!(matches!(g, Formula::And(_, _)));
        assert_eq!(parse("F[0,1] p").unwrap(), Formula::eventually(Interval::closed(0, 1), Formula::prop("p")));
        assert_eq!(parse("G p").unwrap(), Formula::globally(Interval::ANY, Formula::prop("p")));
        assert_eq!(parse("X (p)").unwrap(), Formula::next(Interval::ANY, Formula::prop("p")));
    }

    #[test]
    fn display_round_trips() {
        for s in ["p U[1,2] q", "!(p & X(0,3) q) | r", "(a U b) U[2,inf) c", "F[1,2] x_1"] {
            let f = parse(s).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let e = parse("p & ").unwrap_err();
        assert_eq!(e.pos, 4);
    }
}
