//! Finitely presented lattices over a finite set of term nodes.
//!
//! Nodes are generators, the bounds, and binary meets and joins of earlier
//! nodes. The engine maintains the least quasi-order on nodes closed under
//!
//! * `x*y <= x`, `x*y <= y`, and `z <= x, z <= y  =>  z <= x*y`;
//! * `x <= x+y`, `y <= x+y`, and `x <= z, y <= z  =>  x+y <= z`;
//! * `0 <= x <= 1`, transitivity, and any imposed facts.
//!
//! For lattices this local closure decides the order of the presented
//! lattice on the nodes present, so two nodes are equal in the presented
//! lattice exactly when they lie in one strongly connected class.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::consistency::Op;
use crate::term::LatticeTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum NodeDef {
    Bottom,
    Top,
    Gen(usize),
    Meet(usize, usize),
    Join(usize, usize),
}

#[derive(Clone, Debug)]
pub(crate) struct Presentation {
    defs: Vec<NodeDef>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    meets_using: Vec<Vec<usize>>,
    joins_using: Vec<Vec<usize>>,
    memo: HashMap<(Op, usize, usize), usize>,
    pending: Vec<(usize, usize)>,
    generator_labels: Vec<String>,
    capacity: usize,
}

pub(crate) const BOTTOM: usize = 0;
pub(crate) const TOP: usize = 1;

impl Presentation {
    /// Nodes `0`, `1`, then one node per generator, with `order` giving the
    /// generator pairs `x <= y`.
    pub(crate) fn new(generator_labels: Vec<String>, order: &[(usize, usize)]) -> Self {
        let mut p = Presentation {
            defs: Vec::new(),
            up: Vec::new(),
            down: Vec::new(),
            meets_using: Vec::new(),
            joins_using: Vec::new(),
            memo: HashMap::new(),
            pending: Vec::new(),
            generator_labels,
            capacity: 0,
        };
        p.push_node(NodeDef::Bottom);
        p.push_node(NodeDef::Top);
        for g in 0..p.generator_labels.len() {
            p.push_node(NodeDef::Gen(g));
        }
        for &(x, y) in order {
            p.pending.push((x + 2, y + 2));
        }
        p.propagate();
        p
    }

    pub(crate) fn len(&self) -> usize {
        self.defs.len()
    }

    pub(crate) fn generator_node(&self, g: usize) -> usize {
        g + 2
    }

    fn grow_rows(&mut self, need: usize) {
        if need <= self.capacity {
            return;
        }
        let cap = (need * 2).max(64);
        for row in self.up.iter_mut().chain(self.down.iter_mut()) {
            row.grow(cap);
        }
        self.capacity = cap;
    }

    fn push_node(&mut self, def: NodeDef) -> usize {
        let id = self.defs.len();
        self.grow_rows(id + 1);
        self.defs.push(def);
        let mut up = FixedBitSet::with_capacity(self.capacity);
        up.insert(id);
        let down = up.clone();
        self.up.push(up);
        self.down.push(down);
        self.meets_using.push(Vec::new());
        self.joins_using.push(Vec::new());
        if id != BOTTOM {
            self.pending.push((BOTTOM, id));
        }
        if id != TOP && id != BOTTOM {
            self.pending.push((id, TOP));
        }
        if id == TOP {
            self.pending.push((BOTTOM, TOP));
        }
        match def {
            NodeDef::Meet(a, b) => {
                self.meets_using[a].push(id);
                self.meets_using[b].push(id);
                self.pending.push((id, a));
                self.pending.push((id, b));
                let mut common = self.down[a].clone();
                common.intersect_with(&self.down[b]);
                self.pending.extend(common.ones().map(|z| (z, id)));
            }
            NodeDef::Join(a, b) => {
                self.joins_using[a].push(id);
                self.joins_using[b].push(id);
                self.pending.push((a, id));
                self.pending.push((b, id));
                let mut common = self.up[a].clone();
                common.intersect_with(&self.up[b]);
                self.pending.extend(common.ones().map(|z| (id, z)));
            }
            _ => {}
        }
        id
    }

    #[inline]
    pub(crate) fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    #[cfg(test)]
    pub(crate) fn equal(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) && self.leq(y, x)
    }

    /// Smallest node of the class of `x`.
    pub(crate) fn rep(&self, x: usize) -> usize {
        let mut class = self.up[x].clone();
        class.intersect_with(&self.down[x]);
        class.ones().next().expect("x is in its own class")
    }

    /// Imposes `x <= y`.
    pub(crate) fn add_fact(&mut self, x: usize, y: usize) {
        self.pending.push((x, y));
        self.propagate();
    }

    fn propagate(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            if self.up[x].contains(y) {
                continue;
            }
            let below: Vec<usize> = self.down[x].ones().collect();
            let above = self.up[y].clone();
            for a in below {
                let mut fresh = above.clone();
                fresh.difference_with(&self.up[a]);
                if fresh.is_clear() {
                    continue;
                }
                self.up[a].union_with(&fresh);
                for b in fresh.ones() {
                    self.down[b].insert(a);
                    self.trigger(a, b);
                }
            }
        }
    }

    /// Rule consequences of the new fact `a <= b`.
    fn trigger(&mut self, a: usize, b: usize) {
        for &m in &self.meets_using[b] {
            let NodeDef::Meet(s, t) = self.defs[m] else { unreachable!() };
            let other = if s == b { t } else { s };
            if self.up[a].contains(other) && !self.up[a].contains(m) {
                self.pending.push((a, m));
            }
        }
        for &j in &self.joins_using[a] {
            let NodeDef::Join(s, t) = self.defs[j] else { unreachable!() };
            let other = if s == a { t } else { s };
            if self.up[other].contains(b) && !self.up[j].contains(b) {
                self.pending.push((j, b));
            }
        }
    }

    /// The node for `x op y`, creating it if no node of that class is known.
    /// Returns the class representative.
    pub(crate) fn op(&mut self, op: Op, x: usize, y: usize) -> (usize, bool) {
        let (rx, ry) = (self.rep(x), self.rep(y));
        if let Some(v) = self.lookup(op, rx, ry) {
            return (v, false);
        }
        let (a, b) = (rx.min(ry), rx.max(ry));
        let id = self.push_node(match op {
            Op::Meet => NodeDef::Meet(a, b),
            Op::Join => NodeDef::Join(a, b),
        });
        self.memo.insert((op, a, b), id);
        self.propagate();
        (self.rep(id), true)
    }

    /// The known class of `x op y` for representatives `x`, `y`.
    pub(crate) fn lookup(&self, op: Op, x: usize, y: usize) -> Option<usize> {
        if x == y {
            return Some(x);
        }
        if self.leq(x, y) {
            return Some(if op == Op::Meet { x } else { y });
        }
        if self.leq(y, x) {
            return Some(if op == Op::Meet { y } else { x });
        }
        self.memo
            .get(&(op, x.min(y), x.max(y)))
            .map(|&id| self.rep(id))
    }

    /// Re-keys the memo table by current representatives.
    pub(crate) fn rekey(&mut self) {
        let old = std::mem::take(&mut self.memo);
        let mut entries: Vec<((Op, usize, usize), usize)> = old.into_iter().collect();
        entries.sort_unstable();
        for ((op, a, b), id) in entries {
            let (ra, rb) = (self.rep(a), self.rep(b));
            self.memo.entry((op, ra.min(rb), ra.max(rb))).or_insert(id);
        }
    }

    /// Class representatives in increasing node order.
    pub(crate) fn reps(&self) -> Vec<usize> {
        (0..self.len()).filter(|&x| self.rep(x) == x).collect()
    }

    /// The defining term of a node, built from representatives.
    pub(crate) fn term(&self, x: usize) -> LatticeTerm {
        match self.defs[x] {
            NodeDef::Bottom => LatticeTerm::Bottom,
            NodeDef::Top => LatticeTerm::Top,
            NodeDef::Gen(g) => LatticeTerm::gen(self.generator_labels[g].clone()),
            NodeDef::Meet(a, b) => flatten(Op::Meet, self.term(a), self.term(b)),
            NodeDef::Join(a, b) => flatten(Op::Join, self.term(a), self.term(b)),
        }
    }
}

fn flatten(op: Op, a: LatticeTerm, b: LatticeTerm) -> LatticeTerm {
    let mut items = Vec::new();
    for t in [a, b] {
        match (op, t) {
            (Op::Meet, LatticeTerm::Meet(xs)) | (Op::Join, LatticeTerm::Join(xs)) => items.extend(xs),
            (_, t) => items.push(t),
        }
    }
    match op {
        Op::Meet => LatticeTerm::Meet(items),
        Op::Join => LatticeTerm::Join(items),
    }
}
