//! Line-oriented input format for posets and consistency declarations.
//!
//! ```text
//! # comments run to end of line
//! elem a b c          # declare elements
//! le a b              # a <= b
//! bottom a            # declared bounds
//! top c
//! lower a b           # (a, b) lower consistent
//! upper b a           # (b, a) upper consistent
//! chain A: a1 > a2    # declares a1, a2 if new, and a2 <= a1
//! consistent-chains A B
//! ```
//!
//! `consistent-chains A B` declares `(x, y)` lower and upper consistent for
//! every `x` in chain `A` and `y` in chain `B`.

use std::collections::{BTreeSet, HashMap};

use crate::consistency::ConsistencyStructure;
use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::term::is_ident_char;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainDecl {
    pub name: String,
    /// Elements from greatest to least.
    pub elements: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Document {
    pub poset: Poset,
    pub lower: Vec<(usize, usize)>,
    pub upper: Vec<(usize, usize)>,
    pub chains: Vec<ChainDecl>,
}

impl Document {
    /// The declared pairs over the poset as carrier, unsaturated.
    pub fn consistency(&self) -> Result<ConsistencyStructure> {
        let mut c = ConsistencyStructure::new(self.poset.clone())?;
        for &(x, y) in &self.lower {
            c.declare_lower(x, y)?;
        }
        for &(x, y) in &self.upper {
            c.declare_upper(x, y)?;
        }
        Ok(c)
    }

    pub fn chain(&self, name: &str) -> Option<&ChainDecl> {
        self.chains.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Colon,
    Greater,
}

/// Tokens of one line with 1-based columns.
fn lex(line: &str, lineno: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == ':' {
            out.push((Tok::Colon, col));
            i += 1;
        } else if c == '>' {
            out.push((Tok::Greater, col));
            i += 1;
        } else if is_ident_char(c) || c == '-' {
            let start = i;
            while i < chars.len() && (is_ident_char(chars[i]) || chars[i] == '-') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(Error::parse(lineno, col, format!("unexpected `{c}`")));
        }
    }
    Ok(out)
}

struct Builder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    order: Vec<(usize, usize)>,
    bottom: Option<(usize, usize, usize)>,
    top: Option<(usize, usize, usize)>,
    lower: Vec<(usize, usize)>,
    upper: Vec<(usize, usize)>,
    chains: Vec<ChainDecl>,
}

impl Builder {
    fn declare(&mut self, name: &str, line: usize, col: usize) -> Result<usize> {
        if self.index.contains_key(name) {
            return Err(Error::parse(line, col, format!("element `{name}` declared twice")));
        }
        Ok(self.intern(name))
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.labels.len();
        self.labels.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    fn lookup(&self, name: &str, line: usize, col: usize) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::parse(line, col, format!("undeclared element `{name}`")))
    }
}

fn idents(toks: &[(Tok, usize)], line: usize) -> Result<Vec<(&str, usize)>> {
    toks.iter()
        .map(|(t, col)| match t {
            Tok::Ident(s) => Ok((s.as_str(), *col)),
            _ => Err(Error::parse(line, *col, "expected an element name")),
        })
        .collect()
}

fn arity<'a>(args: &'a [(&'a str, usize)], n: usize, directive: &str, line: usize, col: usize) -> Result<&'a [(&'a str, usize)]> {
    if args.len() != n {
        let at = args.get(n).map_or(col, |a| a.1);
        return Err(Error::parse(
            line,
            at,
            format!("`{directive}` takes {n} argument{}, got {}", if n == 1 { "" } else { "s" }, args.len()),
        ));
    }
    Ok(args)
}

pub fn parse(text: &str) -> Result<Document> {
    let mut b = Builder {
        labels: Vec::new(),
        index: HashMap::new(),
        order: Vec::new(),
        bottom: None,
        top: None,
        lower: Vec::new(),
        upper: Vec::new(),
        chains: Vec::new(),
    };
    let mut seen_lower = BTreeSet::new();
    let mut seen_upper = BTreeSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = lex(raw, line)?;
        let Some(((head, hcol), rest)) = toks.split_first() else { continue };
        let Tok::Ident(directive) = head else {
            return Err(Error::parse(line, *hcol, "expected a directive"));
        };
        let hcol = *hcol;
        match directive.as_str() {
            "elem" => {
                for (name, col) in idents(rest, line)? {
                    b.declare(name, line, col)?;
                }
            }
            "le" | "lower" | "upper" => {
                let args = idents(rest, line)?;
                let args = arity(&args, 2, directive, line, hcol)?;
                let x = b.lookup(args[0].0, line, args[0].1)?;
                let y = b.lookup(args[1].0, line, args[1].1)?;
                match directive.as_str() {
                    "le" => b.order.push((x, y)),
                    "lower" => {
                        if seen_lower.insert((x, y)) {
                            b.lower.push((x, y));
                        }
                    }
                    _ => {
                        if seen_upper.insert((x, y)) {
                            b.upper.push((x, y));
                        }
                    }
                }
            }
            "bottom" | "top" => {
                let args = idents(rest, line)?;
                let args = arity(&args, 1, directive, line, hcol)?;
                let x = b.lookup(args[0].0, line, args[0].1)?;
                let slot = if directive == "bottom" { &mut b.bottom } else { &mut b.top };
                if slot.is_some() {
                    return Err(Error::parse(line, hcol, format!("`{directive}` declared twice")));
                }
                *slot = Some((x, line, args[0].1));
            }
            "chain" => parse_chain(&mut b, rest, line, hcol)?,
            "consistent-chains" => {
                let args = idents(rest, line)?;
                let args = arity(&args, 2, directive, line, hcol)?;
                let mut found = Vec::new();
                for &(name, col) in args {
                    let c = b
                        .chains
                        .iter()
                        .find(|c| c.name == name)
                        .ok_or_else(|| Error::parse(line, col, format!("undeclared chain `{name}`")))?;
                    found.push(c.elements.clone());
                }
                for &x in &found[0] {
                    for &y in &found[1] {
                        if seen_lower.insert((x, y)) {
                            b.lower.push((x, y));
                        }
                        if seen_upper.insert((x, y)) {
                            b.upper.push((x, y));
                        }
                    }
                }
            }
            other => return Err(Error::parse(line, hcol, format!("unknown directive `{other}`"))),
        }
    }
    let order: Vec<(&str, &str)> = b
        .order
        .iter()
        .map(|&(x, y)| (b.labels[x].as_str(), b.labels[y].as_str()))
        .collect();
    let poset = Poset::build(&b.labels.iter().map(String::as_str).collect::<Vec<_>>(), &order)?;
    let poset = poset.with_bounds(b.bottom.map(|t| t.0), b.top.map(|t| t.0))?;
    Ok(Document {
        poset,
        lower: b.lower,
        upper: b.upper,
        chains: b.chains,
    })
}

fn parse_chain(b: &mut Builder, rest: &[(Tok, usize)], line: usize, hcol: usize) -> Result<()> {
    let (name, body) = match rest {
        [(Tok::Ident(name), ncol), (Tok::Colon, _), body @ ..] => {
            if b.chains.iter().any(|c| &c.name == name) {
                return Err(Error::parse(line, *ncol, format!("chain `{name}` declared twice")));
            }
            (name.clone(), body)
        }
        _ => return Err(Error::parse(line, hcol, "expected `chain NAME: x > y > ...`")),
    };
    let mut elements = Vec::new();
    let mut expect_name = true;
    for (t, col) in body {
        match (t, expect_name) {
            (Tok::Ident(s), true) => {
                let x = b.intern(s);
                if elements.contains(&x) {
                    return Err(Error::parse(line, *col, format!("`{s}` repeated in chain")));
                }
                elements.push(x);
            }
            (Tok::Greater, false) => {}
            (_, true) => return Err(Error::parse(line, *col, "expected an element name")),
            (_, false) => return Err(Error::parse(line, *col, "expected `>`")),
        }
        expect_name = !expect_name;
    }
    if elements.is_empty() || expect_name {
        let col = body.last().map_or(hcol, |t| t.1 + 1);
        return Err(Error::parse(line, col, "chain must end with an element"));
    }
    for w in elements.windows(2) {
        b.order.push((w[1], w[0]));
    }
    b.chains.push(ChainDecl { name, elements });
    Ok(())
}
