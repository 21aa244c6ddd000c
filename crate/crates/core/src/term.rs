//! Lattice terms and their infix syntax.
//!
//! Syntax: identifiers for generators, `0` and `1` for the bounds, `*` for
//! meet, `+` for join, parentheses. `*` binds tighter than `+`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeTerm {
    Gen(String),
    Meet(Vec<LatticeTerm>),
    Join(Vec<LatticeTerm>),
    Top,
    Bottom,
}

impl LatticeTerm {
    pub fn gen(label: impl Into<String>) -> Self {
        LatticeTerm::Gen(label.into())
    }

    pub fn meet(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Meet(vec![a, b])
    }

    pub fn join(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Join(vec![a, b])
    }

    /// Meet of a list; a single term is returned as is, the empty list is `1`.
    pub fn meet_of(mut items: Vec<LatticeTerm>) -> Self {
        match items.len() {
            0 => LatticeTerm::Top,
            1 => items.pop().unwrap(),
            _ => LatticeTerm::Meet(items),
        }
    }

    /// Join of a list; a single term is returned as is, the empty list is `0`.
    pub fn join_of(mut items: Vec<LatticeTerm>) -> Self {
        match items.len() {
            0 => LatticeTerm::Bottom,
            1 => items.pop().unwrap(),
            _ => LatticeTerm::Join(items),
        }
    }

    /// Height of the term tree; leaves have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            LatticeTerm::Meet(xs) | LatticeTerm::Join(xs) => {
                1 + xs.iter().map(LatticeTerm::depth).max().unwrap_or(0)
            }
            _ => 1,
        }
    }

    pub fn generators(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators(&self, out: &mut BTreeSet<String>) {
        match self {
            LatticeTerm::Gen(g) => {
                out.insert(g.clone());
            }
            LatticeTerm::Meet(xs) | LatticeTerm::Join(xs) => {
                for x in xs {
                    x.collect_generators(out);
                }
            }
            LatticeTerm::Top | LatticeTerm::Bottom => {}
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            chars: src.char_indices().collect(),
            pos: 0,
        };
        let t = p.expr()?;
        p.skip_ws();
        if let Some(&(col, c)) = p.chars.get(p.pos) {
            return Err(Error::parse(1, col + 1, format!("unexpected `{c}`")));
        }
        Ok(t)
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, inside_meet: bool) -> fmt::Result {
        match self {
            LatticeTerm::Gen(g) => write!(f, "{g}"),
            LatticeTerm::Top => write!(f, "1"),
            LatticeTerm::Bottom => write!(f, "0"),
            LatticeTerm::Meet(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    x.fmt_prec(f, true)?;
                }
                Ok(())
            }
            LatticeTerm::Join(xs) => {
                if inside_meet {
                    write!(f, "(")?;
                }
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    x.fmt_prec(f, false)?;
                }
                if inside_meet {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for LatticeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

impl std::str::FromStr for LatticeTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LatticeTerm::parse(s)
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn column(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|&(i, _)| i + 1)
            .unwrap_or_else(|| self.chars.last().map(|&(i, _)| i + 2).unwrap_or(1))
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if matches!(self.chars.get(self.pos), Some(&(_, c)) if c == want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LatticeTerm> {
        let mut items = vec![self.product()?];
        while self.eat('+') {
            items.push(self.product()?);
        }
        Ok(LatticeTerm::join_of(items))
    }

    fn product(&mut self) -> Result<LatticeTerm> {
        let mut items = vec![self.atom()?];
        while self.eat('*') {
            items.push(self.atom()?);
        }
        Ok(LatticeTerm::meet_of(items))
    }

    fn atom(&mut self) -> Result<LatticeTerm> {
        self.skip_ws();
        let col = self.column();
        let Some(&(_, c)) = self.chars.get(self.pos) else {
            return Err(Error::parse(1, col, "unexpected end of term"));
        };
        if c == '(' {
            self.pos += 1;
            let t = self.expr()?;
            if !self.eat(')') {
                return Err(Error::parse(1, self.column(), "expected `)`"));
            }
            return Ok(t);
        }
        if c == '0' || c == '1' {
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some((_, d)) if is_ident_char(*d)) {
                return Err(Error::parse(1, col, "identifiers cannot start with a digit"));
            }
            return Ok(if c == '0' {
                LatticeTerm::Bottom
            } else {
                LatticeTerm::Top
            });
        }
        if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while matches!(self.chars.get(self.pos), Some((_, d)) if is_ident_char(*d)) {
                self.pos += 1;
            }
            let name: String = self.chars[start..self.pos].iter().map(|&(_, d)| d).collect();
            return Ok(LatticeTerm::Gen(name));
        }
        Err(Error::parse(1, col, format!("unexpected `{c}`")))
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_meet_over_join() {
        let t = LatticeTerm::parse("a + b*c").unwrap();
        assert_eq!(
            t,
            LatticeTerm::join(
                LatticeTerm::gen("a"),
                LatticeTerm::meet(LatticeTerm::gen("b"), LatticeTerm::gen("c"))
            )
        );
        assert_eq!(t.depth(), 3);
    }

    #[test]
    fn display_round_trips() {
        for src in ["a*(a + b)", "(a + b)*(a + c)", "0 + x1*1", "a*b*c + d"] {
            let t = LatticeTerm::parse(src).unwrap();
            assert_eq!(t.to_string(), src);
            assert_eq!(LatticeTerm::parse(&t.to_string()).unwrap(), t);
        }
    }

    #[test]
    fn parse_errors_carry_columns() {
        match LatticeTerm::parse("a + ") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match LatticeTerm::parse("(a + b") {
            Err(Error::Parse { message, .. }) => assert!(message.contains(')')),
            other => panic!("{other:?}"),
        }
        assert!(LatticeTerm::parse("a b").is_err());
        assert!(LatticeTerm::parse("1a").is_err());
    }
}
