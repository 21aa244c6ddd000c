//! Finite lattices as posets with total meet and join tables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::Poset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLattice {
    poset: Poset,
    meet: Vec<u32>,
    join: Vec<u32>,
}

impl FiniteLattice {
    /// Computes meet and join tables for `poset`; fails with the first pair
    /// lacking a meet or join.
    pub fn from_poset(poset: Poset) -> Result<Self> {
        let n = poset.len();
        if n == 0 {
            return Err(Error::MissingBound("bottom"));
        }
        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in x..n {
                let m = poset.try_meet(x, y).ok_or_else(|| {
                    Error::NotALattice(poset.label(x).into(), poset.label(y).into(), "meet")
                })?;
                let j = poset.try_join(x, y).ok_or_else(|| {
                    Error::NotALattice(poset.label(x).into(), poset.label(y).into(), "join")
                })?;
                meet[x * n + y] = m as u32;
                meet[y * n + x] = m as u32;
                join[x * n + y] = j as u32;
                join[y * n + x] = j as u32;
            }
        }
        let poset = poset.with_detected_bounds();
        Ok(FiniteLattice { poset, meet, join })
    }

    /// Builds a lattice from its two operations. The order is recovered by
    /// `x <= y iff x*y = x`; the tables are then checked to realize greatest
    /// lower and least upper bounds of that order.
    pub fn from_operations<M, J>(labels: Vec<String>, meet_op: M, join_op: J) -> Result<Self>
    where
        M: Fn(usize, usize) -> usize,
        J: Fn(usize, usize) -> usize,
    {
        let n = labels.len();
        if n == 0 {
            return Err(Error::MissingBound("bottom"));
        }
        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                meet[x * n + y] = meet_op(x, y) as u32;
                join[x * n + y] = join_op(x, y) as u32;
            }
        }
        let poset = Poset::from_leq(labels, |x, y| meet[x * n + y] as usize == x)?;
        let lattice = FiniteLattice {
            poset: poset.with_detected_bounds(),
            meet,
            join,
        };
        lattice.verify_tables()?;
        Ok(lattice)
    }

    fn verify_tables(&self) -> Result<()> {
        let n = self.len();
        let p = &self.poset;
        for x in 0..n {
            for y in 0..n {
                let m = self.meet(x, y);
                let mut lower = p.down_set(x).clone();
                lower.intersect_with(p.down_set(y));
                if !lower.contains(m) || !lower.is_subset(p.down_set(m)) {
                    return Err(Error::NotALattice(
                        p.label(x).into(),
                        p.label(y).into(),
                        "meet",
                    ));
                }
                let j = self.join(x, y);
                let mut upper = p.up_set(x).clone();
                upper.intersect_with(p.up_set(y));
                if !upper.contains(j) || !upper.is_subset(p.up_set(j)) {
                    return Err(Error::NotALattice(
                        p.label(x).into(),
                        p.label(y).into(),
                        "join",
                    ));
                }
            }
        }
        if p.bottom().is_none() {
            return Err(Error::MissingBound("bottom"));
        }
        if p.top().is_none() {
            return Err(Error::MissingBound("top"));
        }
        Ok(())
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn label(&self, x: usize) -> &str {
        self.poset.label(x)
    }

    pub fn labels(&self) -> &[String] {
        self.poset.labels()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.poset.index_of(label)
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.poset.leq(x, y)
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y] as usize
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y] as usize
    }

    pub fn bottom(&self) -> usize {
        self.poset.bottom().expect("finite lattice has a bottom")
    }

    pub fn top(&self) -> usize {
        self.poset.top().expect("finite lattice has a top")
    }

    pub fn join_all<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    pub fn meet_all<I: IntoIterator<Item = usize>>(&self, xs: I) -> usize {
        xs.into_iter().fold(self.top(), |acc, x| self.meet(acc, x))
    }

    /// The same lattice with every element renamed.
    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        let n = self.len();
        FiniteLattice::from_operations(
            labels,
            |x, y| self.meet[x * n + y] as usize,
            |x, y| self.join[x * n + y] as usize,
        )
    }

    /// Elements `x != 0` such that `x = a + b` forces `x = a` or `x = b`.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        let n = self.len();
        let mut decomposable = vec![false; n];
        decomposable[self.bottom()] = true;
        for a in 0..n {
            for b in (a + 1)..n {
                let j = self.join(a, b);
                if j != a && j != b {
                    decomposable[j] = true;
                }
            }
        }
        (0..n).filter(|&x| !decomposable[x]).collect()
    }

    /// Elements `x != 1` such that `x = a * b` forces `x = a` or `x = b`.
    pub fn meet_irreducibles(&self) -> Vec<usize> {
        let n = self.len();
        let mut decomposable = vec![false; n];
        decomposable[self.top()] = true;
        for a in 0..n {
            for b in (a + 1)..n {
                let m = self.meet(a, b);
                if m != a && m != b {
                    decomposable[m] = true;
                }
            }
        }
        (0..n).filter(|&x| !decomposable[x]).collect()
    }

    /// The irredundant decomposition of `x` into join-irreducibles: the
    /// maximal join-irreducibles below `x`. Unique in a distributive lattice.
    pub fn birkhoff_decompose(&self, x: usize) -> Result<Vec<usize>> {
        if let Some([a, b, c]) = self.check_laws().distributive_witness {
            return Err(Error::NotDistributive(
                self.label(a).into(),
                self.label(b).into(),
                self.label(c).into(),
            ));
        }
        Ok(self.maximal_irreducibles_below(x, &self.join_irreducibles()))
    }

    pub(crate) fn maximal_irreducibles_below(&self, x: usize, irreducibles: &[usize]) -> Vec<usize> {
        let below: Vec<usize> = irreducibles
            .iter()
            .copied()
            .filter(|&j| self.leq(j, x))
            .collect();
        below
            .iter()
            .copied()
            .filter(|&j| !below.iter().any(|&k| k != j && self.leq(j, k)))
            .collect()
    }

    /// Smallest sublattice containing `gens`, 0 and 1.
    pub fn sublattice_closure(&self, gens: &[usize]) -> Sublattice {
        let n = self.len();
        let mut member = vec![false; n];
        let mut members: Vec<usize> = Vec::new();
        for x in [self.bottom(), self.top()].into_iter().chain(gens.iter().copied()) {
            if !member[x] {
                member[x] = true;
                members.push(x);
            }
        }
        // Semi-naive rounds: combine each new element with everything so far.
        let mut frontier_start = 0;
        while frontier_start < members.len() {
            let frontier_end = members.len();
            for i in frontier_start..frontier_end {
                for j in 0..frontier_end {
                    let (x, y) = (members[i], members[j]);
                    for z in [self.meet(x, y), self.join(x, y)] {
                        if !member[z] {
                            member[z] = true;
                            members.push(z);
                        }
                    }
                }
            }
            frontier_start = frontier_end;
        }
        members.sort_unstable();
        let mut local = vec![usize::MAX; n];
        for (i, &x) in members.iter().enumerate() {
            local[x] = i;
        }
        let labels = members.iter().map(|&x| self.label(x).to_string()).collect();
        let lattice = FiniteLattice::from_operations(
            labels,
            |a, b| local[self.meet(members[a], members[b])],
            |a, b| local[self.join(members[a], members[b])],
        )
        .expect("a subset closed under meet and join is a lattice");
        Sublattice { lattice, members }
    }

    /// Runs every law check exhaustively over triples.
    pub fn check_laws(&self) -> LawReport {
        let n = self.len();
        let mut r = LawReport {
            size: n,
            idempotence: None,
            commutativity: None,
            associativity: None,
            absorption: None,
            compar: None,
            modular: true,
            modular_witness: None,
            distributive: true,
            distributive_witness: None,
            dis1_failures: 0,
            dis2_failures: 0,
            ha_failures: 0,
            triples_checked: n * n * n,
        };
        for x in 0..n {
            if r.idempotence.is_none() && (self.meet(x, x) != x || self.join(x, x) != x) {
                r.idempotence = Some(vec![x]);
            }
            for y in 0..n {
                let (m, j) = (self.meet(x, y), self.join(x, y));
                if r.commutativity.is_none() && (m != self.meet(y, x) || j != self.join(y, x)) {
                    r.commutativity = Some(vec![x, y]);
                }
                if r.absorption.is_none()
                    && (self.meet(x, self.join(x, y)) != x || self.join(x, self.meet(x, y)) != x)
                {
                    r.absorption = Some(vec![x, y]);
                }
                if r.compar.is_none() && (self.leq(x, y) != (m == x)) {
                    r.compar = Some(vec![x, y]);
                }
                for z in 0..n {
                    self.check_triple(&mut r, x, y, z);
                }
            }
        }
        r
    }

    #[inline]
    fn check_triple(&self, r: &mut LawReport, x: usize, y: usize, z: usize) {
        let xy_m = self.meet(x, y);
        let xy_j = self.join(x, y);
        if r.associativity.is_none()
            && (self.meet(xy_m, z) != self.meet(x, self.meet(y, z))
                || self.join(xy_j, z) != self.join(x, self.join(y, z)))
        {
            r.associativity = Some(vec![x, y, z]);
        }
        let lhs1 = self.meet(xy_j, z); // (x+y)z
        let rhs1 = self.join(self.meet(x, z), self.meet(y, z)); // xz+yz
        let yz_m = self.meet(y, z);
        let lhs2 = self.join(x, yz_m); // x+yz
        let rhs2 = self.meet(xy_j, self.join(x, z)); // (x+y)(x+z)
        if !self.leq(rhs1, lhs1) {
            r.dis1_failures += 1;
        }
        if !self.leq(lhs2, rhs2) {
            r.dis2_failures += 1;
        }
        if self.leq(x, z) {
            if !self.leq(lhs2, lhs1) {
                r.ha_failures += 1;
            }
            if lhs1 != lhs2 && r.modular {
                r.modular = false;
                r.modular_witness = Some([x, y, z]);
            }
        }
        if r.distributive {
            // x(y+z) = xy + xz and x + yz = (x+y)(x+z)
            let a = self.meet(x, self.join(y, z));
            let b = self.join(xy_m, self.meet(x, z));
            if a != b || lhs2 != rhs2 {
                r.distributive = false;
                r.distributive_witness = Some([x, y, z]);
            }
        }
    }

    /// A pentagon sublattice `[o, a, c, b, i]` with `o < a < c < i`,
    /// `a + b = c + b = i`, `a * b = c * b = o`.
    pub fn find_n5(&self) -> Option<[usize; 5]> {
        let n = self.len();
        for a in 0..n {
            for c in 0..n {
                if !self.poset.lt(a, c) {
                    continue;
                }
                for b in 0..n {
                    let o = self.meet(a, b);
                    let i = self.join(a, b);
                    if self.meet(c, b) == o && self.join(c, b) == i {
                        return Some([o, a, c, b, i]);
                    }
                }
            }
        }
        None
    }

    /// A diamond sublattice `[o, a, b, c, i]` with three pairwise
    /// incomparable atoms sharing meets and joins.
    pub fn find_m3(&self) -> Option<[usize; 5]> {
        let n = self.len();
        for a in 0..n {
            for b in (a + 1)..n {
                let o = self.meet(a, b);
                let i = self.join(a, b);
                if o == a || o == b {
                    continue;
                }
                for c in (b + 1)..n {
                    if self.meet(a, c) == o
                        && self.meet(b, c) == o
                        && self.join(a, c) == i
                        && self.join(b, c) == i
                    {
                        return Some([o, a, b, c, i]);
                    }
                }
            }
        }
        None
    }

    pub fn is_isomorphic(&self, other: &FiniteLattice) -> bool {
        crate::catalog::find_isomorphism(self, other).is_some()
    }
}

/// Computes the lattice tables of `p` if every pair has a meet and a join.
pub fn is_lattice(p: &Poset) -> Option<FiniteLattice> {
    if p.is_empty() {
        return None;
    }
    FiniteLattice::from_poset(p.clone()).ok()
}

#[derive(Clone, Debug)]
pub struct Sublattice {
    pub lattice: FiniteLattice,
    /// Indices in the ambient lattice, in increasing order; local index `i`
    /// of `lattice` is `members[i]`.
    pub members: Vec<usize>,
}

/// Outcome of [`FiniteLattice::check_laws`]. Each `Option<Vec<usize>>` is
/// `None` when the law holds, otherwise the first failing tuple in
/// element-index order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub size: usize,
    pub idempotence: Option<Vec<usize>>,
    pub commutativity: Option<Vec<usize>>,
    pub associativity: Option<Vec<usize>>,
    pub absorption: Option<Vec<usize>>,
    /// `x <= y iff x*y = x`
    pub compar: Option<Vec<usize>>,
    pub modular: bool,
    pub modular_witness: Option<[usize; 3]>,
    pub distributive: bool,
    pub distributive_witness: Option<[usize; 3]>,
    pub dis1_failures: usize,
    pub dis2_failures: usize,
    pub ha_failures: usize,
    pub triples_checked: usize,
}

impl LawReport {
    pub fn postulates_hold(&self) -> bool {
        self.idempotence.is_none()
            && self.commutativity.is_none()
            && self.associativity.is_none()
            && self.absorption.is_none()
            && self.compar.is_none()
    }

    pub fn inequalities_hold(&self) -> bool {
        self.dis1_failures == 0 && self.dis2_failures == 0 && self.ha_failures == 0
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn lattice(elements: &[&str], covers: &[(&str, &str)]) -> FiniteLattice {
        is_lattice(&Poset::build(elements, covers).unwrap()).unwrap()
    }

    pub(crate) fn n5() -> FiniteLattice {
        lattice(
            &["0", "a", "b", "c", "1"],
            &[("0", "a"), ("a", "c"), ("c", "1"), ("0", "b"), ("b", "1")],
        )
    }

    pub(crate) fn m3() -> FiniteLattice {
        lattice(
            &["0", "a", "b", "c", "1"],
            &[
                ("0", "a"),
                ("0", "b"),
                ("0", "c"),
                ("a", "1"),
                ("b", "1"),
                ("c", "1"),
            ],
        )
    }

    pub(crate) fn boolean2() -> FiniteLattice {
        lattice(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
    }

    #[test]
    fn boolean_square_is_lattice() {
        let l = boolean2();
        assert_eq!(l.meet(1, 2), 0);
        assert_eq!(l.join(1, 2), 3);
        let r = l.check_laws();
        assert!(r.postulates_hold() && r.distributive && r.modular);
    }

    #[test]
    fn antichain_is_not_lattice() {
        let p = Poset::build::<&str>(&["a", "b"], &[]).unwrap();
        assert!(is_lattice(&p).is_none());
    }

    #[test]
    fn pentagon_is_lattice_but_not_modular() {
        let l = n5();
        let r = l.check_laws();
        assert!(r.postulates_hold());
        assert!(!r.modular);
        assert!(!r.distributive);
        // First x <= z with (x+y)z != x+yz in index order: x=a, y=b, z=c.
        assert_eq!(r.modular_witness, Some([1, 2, 3]));
        assert!(r.inequalities_hold());
        assert!(l.find_n5().is_some());
        assert!(l.find_m3().is_none());
    }

    #[test]
    fn diamond_is_modular_not_distributive() {
        let l = m3();
        let r = l.check_laws();
        assert!(r.modular);
        assert!(!r.distributive);
        assert!(r.inequalities_hold());
        assert_eq!(l.find_m3(), Some([0, 1, 2, 3, 4]));
        assert!(l.find_n5().is_none());
    }

    #[test]
    fn irreducibles_of_small_lattices() {
        assert_eq!(boolean2().join_irreducibles(), vec![1, 2]);
        let chain = lattice(&["0", "a", "1"], &[("0", "a"), ("a", "1")]);
        assert_eq!(chain.join_irreducibles(), vec![1, 2]);
    }

    #[test]
    fn birkhoff_on_boolean_square() {
        let l = boolean2();
        assert_eq!(l.birkhoff_decompose(0).unwrap(), Vec::<usize>::new());
        assert_eq!(l.birkhoff_decompose(3).unwrap(), vec![1, 2]);
        assert_eq!(l.birkhoff_decompose(1).unwrap(), vec![1]);
        assert!(matches!(
            n5().birkhoff_decompose(4),
            Err(Error::NotDistributive(..))
        ));
    }

    #[test]
    fn closure_of_single_generator() {
        let l = boolean2();
        let s = l.sublattice_closure(&[1]);
        assert_eq!(s.members, vec![0, 1, 3]);
        assert_eq!(s.lattice.len(), 3);
        let all = l.sublattice_closure(&[0, 1, 2, 3]);
        assert_eq!(all.members, vec![0, 1, 2, 3]);
        assert_eq!(all.lattice, l);
    }

    #[test]
    fn from_operations_rejects_bad_tables() {
        // "meet" that is not idempotent cannot realize a glb.
        let labels: Vec<String> = vec!["x".into(), "y".into()];
        assert!(FiniteLattice::from_operations(labels, |_, _| 0, |_, _| 1).is_err());
    }
}
