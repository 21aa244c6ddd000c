//! Graphviz output for order diagrams and consistency graphs.
//!
//! Output is deterministic: nodes in element order, edges in lexicographic
//! order of their endpoints.

use std::fmt::Write;

use crate::consistency::{ConsistencyStructure, Relation};
use crate::poset::Poset;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn header(out: &mut String, name: &str, labels: &[String]) {
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    writeln!(out, "  node [shape=plaintext];").unwrap();
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "  n{i} [label={}];", quote(l)).unwrap();
    }
}

/// Hasse diagram with edges pointing from each element to its covers.
pub fn hasse(p: &Poset) -> String {
    let mut out = String::new();
    header(&mut out, "hasse", p.labels());
    for (x, y) in p.covers() {
        writeln!(out, "  n{x} -> n{y} [style=solid, arrowhead=none];").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Consistency graph: an arrow `x -> y` for every ordered pair, solid for
/// lower and dashed for upper. Pairs involving a bound are implied and
/// omitted. Derived pairs are labelled with the rule that produced them.
pub fn consistency_graph(c: &ConsistencyStructure) -> String {
    let labels = c.carrier().labels();
    let mut out = String::new();
    header(&mut out, "consistency", labels);
    let bounds = [c.bottom(), c.top()];
    for rel in [Relation::Lower, Relation::Upper] {
        let style = match rel {
            Relation::Lower => "solid",
            Relation::Upper => "dashed",
        };
        for (x, y) in c.pairs(rel) {
            if bounds.contains(&x) || bounds.contains(&y) {
                continue;
            }
            write!(out, "  n{x} -> n{y} [style={style}").unwrap();
            if let Some(d) = c.origin(x, y, rel) {
                write!(out, ", label={}", quote(d.rule.name())).unwrap();
            }
            out.push_str("];\n");
        }
    }
    out.push_str("}\n");
    out
}
