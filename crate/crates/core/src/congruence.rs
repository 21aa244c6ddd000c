//! Lattice congruences, their generation from pairs, and quotients.

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;

/// A partition of lattice elements; `rep[x]` is the smallest element of the
/// class of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Congruence {
    rep: Vec<usize>,
}

impl Congruence {
    pub fn discrete(n: usize) -> Self {
        Congruence { rep: (0..n).collect() }
    }

    pub fn total(n: usize) -> Self {
        Congruence { rep: vec![0; n] }
    }

    /// A partition from arbitrary class labels, one per element.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut first = std::collections::HashMap::new();
        let rep = labels
            .iter()
            .enumerate()
            .map(|(x, l)| *first.entry(*l).or_insert(x))
            .collect();
        Congruence { rep }
    }

    fn from_union_find(uf: &mut UnionFind<usize>, n: usize) -> Self {
        let labels: Vec<usize> = (0..n).map(|x| uf.find_mut(x)).collect();
        Self::from_labels(&labels)
    }

    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }

    pub fn rep(&self, x: usize) -> usize {
        self.rep[x]
    }

    pub fn same(&self, x: usize, y: usize) -> bool {
        self.rep[x] == self.rep[y]
    }

    pub fn class_count(&self) -> usize {
        self.rep.iter().enumerate().filter(|&(x, &r)| x == r).count()
    }

    /// Classes ordered by their smallest element.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.len()];
        for (x, &r) in self.rep.iter().enumerate() {
            if slot[r] == usize::MAX {
                slot[r] = out.len();
                out.push(Vec::new());
            }
            out[slot[r]].push(x);
        }
        out
    }

    /// Whether every class of `self` lies inside a class of `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        (0..self.len()).all(|x| other.same(x, self.rep[x]))
    }

    /// Pairs `(x, rep(x))` for every non-representative element.
    pub fn generating_pairs(&self) -> Vec<(usize, usize)> {
        self.rep
            .iter()
            .enumerate()
            .filter(|&(x, &r)| x != r)
            .map(|(x, &r)| (x, r))
            .collect()
    }

    /// First `(x, y, l)` with `x ~ y` whose translate by `l` leaves the
    /// partition, if any.
    pub fn translation_failure(&self, l: &FiniteLattice) -> Option<(usize, usize, usize)> {
        for (x, r) in self.generating_pairs() {
            for z in 0..l.len() {
                if !self.same(l.meet(x, z), l.meet(r, z)) || !self.same(l.join(x, z), l.join(r, z)) {
                    return Some((x, r, z));
                }
            }
        }
        None
    }
}

/// The least congruence containing `pairs`.
pub fn generate_congruence(l: &FiniteLattice, pairs: &[(usize, usize)]) -> Congruence {
    let n = l.len();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = pairs.to_vec();
    while let Some((x, y)) = work.pop() {
        if !uf.union(x, y) {
            continue;
        }
        // Each merged edge contributes all of its translates; translates of
        // edges already inside a class are connected through earlier edges.
        for z in 0..n {
            work.push((l.meet(x, z), l.meet(y, z)));
            work.push((l.join(x, z), l.join(y, z)));
        }
    }
    Congruence::from_union_find(&mut uf, n)
}

#[derive(Clone, Debug)]
pub struct Quotient {
    pub lattice: FiniteLattice,
    /// Quotient element of each original element.
    pub class_of: Vec<usize>,
}

/// `L / c` with classes ordered by their smallest element. Class labels are
/// the member labels, braced when the class is not a singleton.
pub fn quotient(l: &FiniteLattice, c: &Congruence) -> Result<Quotient> {
    if c.len() != l.len() {
        return Err(Error::LengthMismatch(c.len(), l.len()));
    }
    if let Some((x, y, z)) = c.translation_failure(l) {
        return Err(Error::NotACongruence(
            l.label(x).to_string(),
            l.label(y).to_string(),
            l.label(z).to_string(),
        ));
    }
    let classes = c.classes();
    let mut class_of = vec![0; l.len()];
    for (k, members) in classes.iter().enumerate() {
        for &x in members {
            class_of[x] = k;
        }
    }
    let labels: Vec<String> = classes
        .iter()
        .map(|members| {
            if members.len() == 1 {
                l.label(members[0]).to_string()
            } else {
                let inner: Vec<&str> = members.iter().map(|&x| l.label(x)).collect();
                format!("{{{}}}", inner.join(", "))
            }
        })
        .collect();
    let reps: Vec<usize> = classes.iter().map(|m| m[0]).collect();
    let lattice = FiniteLattice::from_operations(
        labels,
        |x, y| class_of[l.meet(reps[x], reps[y])],
        |x, y| class_of[l.join(reps[x], reps[y])],
    )?;
    Ok(Quotient { lattice, class_of })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderLiftingFailure {
    pub left: usize,
    pub right: usize,
    pub quotient_leq: bool,
    pub lifted_leq: bool,
}

/// Checks that `X <= Y` in the quotient exactly when some `x` in `X` and
/// `y` in `Y` satisfy `x <= y` in `L`; returns the first violating pair of
/// quotient elements.
pub fn check_order_lifting(l: &FiniteLattice, q: &Quotient) -> Option<OrderLiftingFailure> {
    let k = q.lattice.len();
    let mut lifted = vec![false; k * k];
    for x in 0..l.len() {
        for y in l.poset().up_set(x).ones() {
            lifted[q.class_of[x] * k + q.class_of[y]] = true;
        }
    }
    for a in 0..k {
        for b in 0..k {
            let quotient_leq = q.lattice.leq(a, b);
            if quotient_leq != lifted[a * k + b] {
                return Some(OrderLiftingFailure {
                    left: a,
                    right: b,
                    quotient_leq,
                    lifted_leq: lifted[a * k + b],
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::tests::{lattice, m3, n5};

    fn chain4() -> FiniteLattice {
        lattice(&["0", "a", "b", "1"], &[("0", "a"), ("a", "b"), ("b", "1")])
    }

    #[test]
    fn empty_pairs_give_discrete() {
        let l = chain4();
        assert_eq!(generate_congruence(&l, &[]), Congruence::discrete(4));
    }

    #[test]
    fn chain_interval_collapses_alone() {
        let l = chain4();
        let c = generate_congruence(&l, &[(1, 2)]);
        assert_eq!(c.classes(), vec![vec![0], vec![1, 2], vec![3]]);
        let q = quotient(&l, &c).unwrap();
        assert_eq!(q.lattice.len(), 3);
        assert_eq!(q.lattice.label(1), "{a, b}");
        assert!(check_order_lifting(&l, &q).is_none());
    }

    #[test]
    fn m3_is_simple() {
        // Identifying any atom with 0 collapses the diamond.
        let l = m3();
        let c = generate_congruence(&l, &[(0, 1)]);
        assert_eq!(c.class_count(), 1);
        assert_eq!(quotient(&l, &c).unwrap().lattice.len(), 1);
    }

    #[test]
    fn discrete_quotient_is_identity() {
        let l = n5();
        let q = quotient(&l, &Congruence::discrete(5)).unwrap();
        assert!(q.lattice.is_isomorphic(&l));
        assert_eq!(q.lattice.labels(), l.labels());
    }

    #[test]
    fn non_congruence_rejected() {
        // In N5 (0 < a < c < 1, 0 < b < 1), merging {a, c} alone is a
        // congruence but merging {0, a} alone is not: joining with b gives
        // b ~ 1, which the partition does not contain.
        let l = n5();
        let bad = Congruence::from_labels(&[0, 0, 2, 3, 4]);
        assert!(matches!(quotient(&l, &bad), Err(Error::NotACongruence(..))));
        let ok = generate_congruence(&l, &[(1, 3)]);
        assert_eq!(ok.class_count(), 4);
    }

    #[test]
    fn closure_operator() {
        let l = n5();
        let c1 = generate_congruence(&l, &[(0, 1)]);
        let c2 = generate_congruence(&l, &c1.generating_pairs());
        assert_eq!(c1, c2);
        let bigger = generate_congruence(&l, &[(0, 1), (3, 4)]);
        assert!(c1.refines(&bigger));
    }
}
