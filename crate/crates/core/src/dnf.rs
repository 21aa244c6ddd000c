//! Canonical disjunctive normal forms for the free bounded distributive
//! lattice D(P) generated by a poset P, plus the two-valued valuation
//! semantics used to cross-check them.
//!
//! A form is a join of meet-sets. Meet-sets keep only P-minimal generators,
//! and no meet-set lies below another; both levels are kept sorted, so equal
//! lattice elements have identical forms.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::poset::Poset;
use crate::term::LatticeTerm;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalDnf {
    clauses: Vec<Vec<usize>>,
}

impl CanonicalDnf {
    pub fn bottom() -> Self {
        CanonicalDnf { clauses: vec![] }
    }

    pub fn top() -> Self {
        CanonicalDnf {
            clauses: vec![vec![]],
        }
    }

    pub fn generator(g: usize) -> Self {
        CanonicalDnf {
            clauses: vec![vec![g]],
        }
    }

    /// Builds a form from arbitrary meet-sets, reducing it to canonical shape.
    pub fn from_clauses(p: &Poset, clauses: Vec<Vec<usize>>) -> Self {
        let mut reduced: Vec<Vec<usize>> = clauses.into_iter().map(|c| reduce_meet_set(p, c)).collect();
        reduced.sort();
        reduced.dedup();
        let mut keep = Vec::with_capacity(reduced.len());
        for (i, s) in reduced.iter().enumerate() {
            let absorbed = reduced
                .iter()
                .enumerate()
                .any(|(j, t)| i != j && clause_leq(p, s, t));
            if !absorbed {
                keep.push(s.clone());
            }
        }
        CanonicalDnf { clauses: keep }
    }

    pub fn clauses(&self) -> &[Vec<usize>] {
        &self.clauses
    }

    pub fn is_bottom(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_top(&self) -> bool {
        self.clauses.len() == 1 && self.clauses[0].is_empty()
    }

    pub fn join(&self, other: &Self, p: &Poset) -> Self {
        let mut all = self.clauses.clone();
        all.extend(other.clauses.iter().cloned());
        Self::from_clauses(p, all)
    }

    pub fn meet(&self, other: &Self, p: &Poset) -> Self {
        let mut all = Vec::with_capacity(self.clauses.len() * other.clauses.len());
        for s in &self.clauses {
            for t in &other.clauses {
                let mut u = s.clone();
                u.extend(t.iter().copied());
                all.push(u);
            }
        }
        Self::from_clauses(p, all)
    }

    /// Reads the form back as a term over the labels of `p`.
    pub fn to_term(&self, p: &Poset) -> LatticeTerm {
        LatticeTerm::join_of(
            self.clauses
                .iter()
                .map(|c| LatticeTerm::meet_of(c.iter().map(|&g| LatticeTerm::gen(p.label(g))).collect()))
                .collect(),
        )
    }

    /// Value under a two-valued valuation indexed by generator.
    pub fn eval(&self, v: &[bool]) -> bool {
        self.clauses.iter().any(|c| c.iter().all(|&g| v[g]))
    }

    pub fn display<'a>(&'a self, p: &'a Poset) -> DnfDisplay<'a> {
        DnfDisplay { dnf: self, poset: p }
    }
}

pub struct DnfDisplay<'a> {
    dnf: &'a CanonicalDnf,
    poset: &'a Poset,
}

impl fmt::Display for DnfDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dnf.is_bottom() {
            return write!(f, "0");
        }
        for (i, c) in self.dnf.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_empty() {
                write!(f, "1")?;
            }
            for (k, &g) in c.iter().enumerate() {
                if k > 0 {
                    write!(f, "*")?;
                }
                write!(f, "{}", self.poset.label(g))?;
            }
        }
        Ok(())
    }
}

fn reduce_meet_set(p: &Poset, mut set: Vec<usize>) -> Vec<usize> {
    set.sort_unstable();
    set.dedup();
    let keep: Vec<usize> = set
        .iter()
        .copied()
        .filter(|&g| !set.iter().any(|&h| p.lt(h, g)))
        .collect();
    keep
}

/// `meet(s) <= meet(t)`: every generator of `t` dominates one of `s`.
fn clause_leq(p: &Poset, s: &[usize], t: &[usize]) -> bool {
    t.iter().all(|&y| s.iter().any(|&x| p.leq(x, y)))
}

pub fn to_dnf(t: &LatticeTerm, p: &Poset) -> Result<CanonicalDnf> {
    Ok(match t {
        LatticeTerm::Gen(g) => {
            CanonicalDnf::generator(p.index_of(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?)
        }
        LatticeTerm::Top => CanonicalDnf::top(),
        LatticeTerm::Bottom => CanonicalDnf::bottom(),
        LatticeTerm::Join(xs) => {
            let mut acc = CanonicalDnf::bottom();
            for x in xs {
                acc = acc.join(&to_dnf(x, p)?, p);
            }
            acc
        }
        LatticeTerm::Meet(xs) => {
            let mut acc = CanonicalDnf::top();
            for x in xs {
                acc = acc.meet(&to_dnf(x, p)?, p);
            }
            acc
        }
    })
}

/// Order of D(P): each clause of `d1` lies below some clause of `d2`.
pub fn dnf_leq(d1: &CanonicalDnf, d2: &CanonicalDnf, p: &Poset) -> bool {
    d1.clauses
        .iter()
        .all(|s| d2.clauses.iter().any(|t| clause_leq(p, s, t)))
}

pub fn check_valuation(p: &Poset, v: &[bool]) -> Result<()> {
    if v.len() != p.len() {
        return Err(Error::ValuationLength {
            expected: p.len(),
            got: v.len(),
        });
    }
    for x in 0..p.len() {
        if v[x] {
            if let Some(y) = p.up_set(x).ones().find(|&y| !v[y]) {
                return Err(Error::NonMonotoneValuation(
                    p.label(x).to_string(),
                    p.label(y).to_string(),
                ));
            }
        }
    }
    Ok(())
}

/// Evaluates `t` with meet = min, join = max under an order-preserving
/// map `P -> {0, 1}` given by generator index.
pub fn eval_valuation(t: &LatticeTerm, p: &Poset, v: &[bool]) -> Result<bool> {
    check_valuation(p, v)?;
    eval_unchecked(t, p, v)
}

fn eval_unchecked(t: &LatticeTerm, p: &Poset, v: &[bool]) -> Result<bool> {
    Ok(match t {
        LatticeTerm::Gen(g) => v[p.index_of(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?],
        LatticeTerm::Top => true,
        LatticeTerm::Bottom => false,
        LatticeTerm::Meet(xs) => {
            for x in xs {
                if !eval_unchecked(x, p, v)? {
                    return Ok(false);
                }
            }
            true
        }
        LatticeTerm::Join(xs) => {
            for x in xs {
                if eval_unchecked(x, p, v)? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// All order-preserving maps `P -> {0, 1}` (indicators of up-sets), in
/// increasing order of their bit masks.
pub fn monotone_valuations(p: &Poset) -> Vec<Vec<bool>> {
    let n = p.len();
    assert!(n < 32, "valuation enumeration is exhaustive over 2^n masks");
    (0u32..(1 << n))
        .filter_map(|mask| {
            let v: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
            check_valuation(p, &v).ok().map(|_| v)
        })
        .collect()
}

pub fn terms_equal(t1: &LatticeTerm, t2: &LatticeTerm, p: &Poset) -> Result<bool> {
    Ok(to_dnf(t1, p)? == to_dnf(t2, p)?)
}

/// A monotone valuation on which the two terms differ, if any.
pub fn distinguishing_valuation(t1: &LatticeTerm, t2: &LatticeTerm, p: &Poset) -> Result<Option<Vec<bool>>> {
    for v in monotone_valuations(p) {
        if eval_unchecked(t1, p, &v)? != eval_unchecked(t2, p, &v)? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

pub const MAX_GENERATORS: usize = 6;

/// D(P) as a finite lattice. Element labels are the printed canonical forms;
/// the returned vector gives the form of each element index.
pub fn enumerate_d(p: &Poset, max_elements: usize) -> Result<(FiniteLattice, Vec<CanonicalDnf>)> {
    if p.len() > MAX_GENERATORS {
        return Err(Error::guard("generators of D(P)", p.len(), MAX_GENERATORS));
    }
    let mut elems: Vec<CanonicalDnf> = vec![CanonicalDnf::bottom(), CanonicalDnf::top()];
    elems.extend((0..p.len()).map(CanonicalDnf::generator));
    let mut seen: HashMap<CanonicalDnf, usize> = HashMap::new();
    elems.retain(|d| {
        let fresh = !seen.contains_key(d);
        if fresh {
            seen.insert(d.clone(), seen.len());
        }
        fresh
    });
    let mut done = 0;
    while done < elems.len() {
        let end = elems.len();
        for i in done..end {
            for j in 0..=i {
                for d in [elems[i].meet(&elems[j], p), elems[i].join(&elems[j], p)] {
                    if !seen.contains_key(&d) {
                        if elems.len() >= max_elements {
                            return Err(Error::guard("elements of D(P)", elems.len() + 1, max_elements));
                        }
                        seen.insert(d.clone(), elems.len());
                        elems.push(d);
                    }
                }
            }
        }
        done = end;
    }
    elems.sort();
    let index: HashMap<&CanonicalDnf, usize> = elems.iter().enumerate().map(|(i, d)| (d, i)).collect();
    let labels: Vec<String> = elems.iter().map(|d| d.display(p).to_string()).collect();
    let lattice = FiniteLattice::from_operations(
        labels,
        |x, y| index[&elems[x].meet(&elems[y], p)],
        |x, y| index[&elems[x].join(&elems[y], p)],
    )?;
    Ok((lattice, elems))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn antichain(n: usize) -> Poset {
        let labels: Vec<String> = (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
        Poset::build::<String>(&labels, &[]).unwrap()
    }

    fn t(s: &str) -> LatticeTerm {
        LatticeTerm::parse(s).unwrap()
    }

    #[test]
    fn one_distribution_step() {
        let p = antichain(3);
        let d = to_dnf(&t("(a + b)*c"), &p).unwrap();
        assert_eq!(d.clauses(), &[vec![0, 2], vec![1, 2]]);
        assert_eq!(d.display(&p).to_string(), "a*c + b*c");
    }

    #[test]
    fn absorption_and_order() {
        let p = antichain(2);
        assert_eq!(to_dnf(&t("a*(a + b)"), &p).unwrap(), CanonicalDnf::generator(0));
        let chain = Poset::build(&["a", "b"], &[("a", "b")]).unwrap();
        assert_eq!(to_dnf(&t("a + b"), &chain).unwrap(), CanonicalDnf::generator(1));
        assert_eq!(to_dnf(&t("a*b"), &chain).unwrap(), CanonicalDnf::generator(0));
    }

    #[test]
    fn bounds() {
        let p = antichain(2);
        assert!(to_dnf(&t("a + 1"), &p).unwrap().is_top());
        assert!(to_dnf(&t("a*0"), &p).unwrap().is_bottom());
        assert_eq!(to_dnf(&t("a*1 + 0"), &p).unwrap(), CanonicalDnf::generator(0));
    }

    #[test]
    fn leq_on_antichain() {
        let p = antichain(2);
        let join = to_dnf(&t("a + b"), &p).unwrap();
        let meet = to_dnf(&t("a*b"), &p).unwrap();
        assert!(dnf_leq(&meet, &join, &p));
        assert!(!dnf_leq(&join, &meet, &p));
        assert!(dnf_leq(&meet, &CanonicalDnf::generator(0), &p));
    }

    #[test]
    fn valuations() {
        let chain = Poset::build(&["a", "b"], &[("a", "b")]).unwrap();
        assert!(matches!(
            eval_valuation(&t("a"), &chain, &[true, false]),
            Err(Error::NonMonotoneValuation(a, b)) if a == "a" && b == "b"
        ));
        assert!(eval_valuation(&t("a*b"), &chain, &[true, true]).unwrap());
        let p = antichain(2);
        assert!(!eval_valuation(&t("a*b"), &p, &[true, false]).unwrap());
        assert_eq!(monotone_valuations(&p).len(), 4);
        assert_eq!(monotone_valuations(&chain).len(), 3);
    }

    #[test]
    fn distributive_law_and_unknown_generator() {
        let p = antichain(3);
        assert!(terms_equal(&t("(a + b)*(a + c)"), &t("a + b*c"), &p).unwrap());
        assert!(!terms_equal(&t("a"), &t("b"), &p).unwrap());
        assert!(matches!(to_dnf(&t("z"), &p), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn small_free_lattices() {
        let (l, _) = enumerate_d(&antichain(1), 1000).unwrap();
        assert_eq!(l.len(), 3);
        let (l, _) = enumerate_d(&antichain(2), 1000).unwrap();
        assert_eq!(l.len(), 6);
        assert!(l.check_laws().distributive);
        // Free bounded distributive lattice on 3 generators: 18 + 2.
        let (l, _) = enumerate_d(&antichain(3), 1000).unwrap();
        assert_eq!(l.len(), 20);
        assert!(matches!(enumerate_d(&antichain(7), 10), Err(Error::SizeGuardExceeded { .. })));
        assert!(matches!(enumerate_d(&antichain(4), 50), Err(Error::SizeGuardExceeded { .. })));
    }
}
