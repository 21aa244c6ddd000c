//! Finite partially ordered sets.
//!
//! The order is stored densely: one bit row per element for its up-set and
//! one for its down-set. Carriers are expected to stay in the low thousands.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Poset {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    bottom: Option<usize>,
    top: Option<usize>,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.up == other.up
            && self.bottom == other.bottom
            && self.top == other.top
    }
}

impl Eq for Poset {}

fn index_labels(labels: &[String]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        if index.insert(l.clone(), i).is_some() {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(index)
}

impl Poset {
    /// Builds the reflexive-transitive closure of `relations` (pairs `x <= y`)
    /// over `elements`.
    pub fn build<S: AsRef<str>>(elements: &[S], relations: &[(S, S)]) -> Result<Self> {
        let labels: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let index = index_labels(&labels)?;
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for (x, y) in relations {
            let xi = *index
                .get(x.as_ref())
                .ok_or_else(|| Error::UnknownElement(x.as_ref().to_string()))?;
            let yi = *index
                .get(y.as_ref())
                .ok_or_else(|| Error::UnknownElement(y.as_ref().to_string()))?;
            up[xi].insert(yi);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        Self::from_up_sets(labels, index, up)
    }

    /// Builds a poset from a complete order predicate, validating that it is a
    /// partial order.
    pub fn from_leq<F>(labels: Vec<String>, leq: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> bool,
    {
        let index = index_labels(&labels)?;
        let n = labels.len();
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            for j in 0..n {
                if i == j || leq(i, j) {
                    row.insert(j);
                }
            }
        }
        for i in 0..n {
            for j in up[i].ones() {
                if !up[j].is_subset(&up[i]) {
                    // Not transitive: report the offending pair.
                    return Err(Error::CycleError(labels[i].clone(), labels[j].clone()));
                }
            }
        }
        Self::from_up_sets(labels, index, up)
    }

    fn from_up_sets(
        labels: Vec<String>,
        index: HashMap<String, usize>,
        up: Vec<FixedBitSet>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter().enumerate() {
            for j in row.ones() {
                if j != i && up[j].contains(i) {
                    let (a, b) = if i < j { (i, j) } else { (j, i) };
                    return Err(Error::CycleError(labels[a].clone(), labels[b].clone()));
                }
                down[j].insert(i);
            }
        }
        Ok(Poset {
            labels,
            index,
            up,
            down,
            bottom: None,
            top: None,
        })
    }

    /// Declares bounds; each must be comparable to every element in the
    /// stated direction.
    pub fn with_bounds(mut self, bottom: Option<usize>, top: Option<usize>) -> Result<Self> {
        if let Some(b) = bottom {
            if self.up[b].count_ones(..) != self.len() {
                return Err(Error::InvalidBound(self.labels[b].clone(), "bottom"));
            }
        }
        if let Some(t) = top {
            if self.down[t].count_ones(..) != self.len() {
                return Err(Error::InvalidBound(self.labels[t].clone(), "top"));
            }
        }
        self.bottom = bottom;
        self.top = top;
        Ok(self)
    }

    /// Sets the bounds to the least and greatest elements when they exist.
    pub fn with_detected_bounds(self) -> Self {
        let bottom = self.least();
        let top = self.greatest();
        self.with_bounds(bottom, top).expect("detected bounds are valid")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.index_of(label)
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn bottom(&self) -> Option<usize> {
        self.bottom
    }

    pub fn top(&self) -> Option<usize> {
        self.top
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `{y : x <= y}`
    pub fn up_set(&self, x: usize) -> &FixedBitSet {
        &self.up[x]
    }

    /// `{y : y <= x}`
    pub fn down_set(&self, x: usize) -> &FixedBitSet {
        &self.down[x]
    }

    pub fn least(&self) -> Option<usize> {
        (0..self.len()).find(|&x| self.up[x].count_ones(..) == self.len())
    }

    pub fn greatest(&self) -> Option<usize> {
        (0..self.len()).find(|&x| self.down[x].count_ones(..) == self.len())
    }

    /// Greatest lower bound of `x` and `y`, if one exists.
    pub fn try_meet(&self, x: usize, y: usize) -> Option<usize> {
        let mut lower = self.down[x].clone();
        lower.intersect_with(&self.down[y]);
        greatest_of(&lower, &self.down)
    }

    /// Least upper bound of `x` and `y`, if one exists.
    pub fn try_join(&self, x: usize, y: usize) -> Option<usize> {
        let mut upper = self.up[x].clone();
        upper.intersect_with(&self.up[y]);
        greatest_of(&upper, &self.up)
    }

    /// Covering pairs `(x, y)` with `x < y` and nothing strictly between,
    /// in lexicographic order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for x in 0..n {
            let mut strict = self.up[x].clone();
            strict.set(x, false);
            let mut beyond = FixedBitSet::with_capacity(n);
            for z in strict.ones() {
                let mut above = self.up[z].clone();
                above.set(z, false);
                beyond.union_with(&above);
            }
            strict.difference_with(&beyond);
            out.extend(strict.ones().map(|y| (x, y)));
        }
        out
    }

    /// The dual poset: same labels, reversed order, bounds swapped.
    pub fn dual(&self) -> Poset {
        Poset {
            labels: self.labels.clone(),
            index: self.index.clone(),
            up: self.down.clone(),
            down: self.up.clone(),
            bottom: self.top,
            top: self.bottom,
        }
    }
}

/// Within `set`, the element whose row in `rows` contains all of `set`.
/// With `rows` = down-sets this is the maximum of `set`; with up-sets, the
/// minimum.
fn greatest_of(set: &FixedBitSet, rows: &[FixedBitSet]) -> Option<usize> {
    let best = set.ones().max_by_key(|&g| rows[g].count_ones(..))?;
    set.is_subset(&rows[best]).then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitivity_is_derived() {
        let p = Poset::build(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
    }

    #[test]
    fn two_cycle_is_rejected() {
        let err = Poset::build(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap_err();
        assert!(matches!(err, Error::CycleError(a, b) if a == "a" && b == "b"));
    }

    #[test]
    fn empty_relations_give_antichain() {
        let p = Poset::build::<&str>(&["a", "b"], &[]).unwrap();
        assert!(!p.comparable(0, 1));
        assert_eq!(p.try_meet(0, 1), None);
        assert_eq!(p.try_join(0, 1), None);
    }

    #[test]
    fn duplicate_labels() {
        assert!(matches!(
            Poset::build::<&str>(&["a", "a"], &[]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn meets_in_small_posets() {
        let chain = Poset::build(&["a", "b"], &[("a", "b")]).unwrap();
        assert_eq!(chain.try_meet(0, 1), Some(0));
        assert_eq!(chain.try_join(0, 1), Some(1));

        let v = Poset::build(&["0", "a", "b"], &[("0", "a"), ("0", "b")]).unwrap();
        assert_eq!(v.try_meet(1, 2), Some(0));
        assert_eq!(v.try_join(1, 2), None);
    }

    #[test]
    fn bowtie_has_no_meet() {
        // a, b both below c and d: lower bounds of c, d are {a, b}, no maximum.
        let p = Poset::build(
            &["a", "b", "c", "d"],
            &[("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")],
        )
        .unwrap();
        assert_eq!(p.try_meet(2, 3), None);
        assert_eq!(p.try_join(0, 1), None);
    }

    #[test]
    fn bounds_are_checked() {
        let p = Poset::build(&["a", "b"], &[("a", "b")]).unwrap();
        assert!(p.clone().with_bounds(Some(0), Some(1)).is_ok());
        assert!(p.with_bounds(Some(1), None).is_err());
    }

    #[test]
    fn covers_of_diamond() {
        let p = Poset::build(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
        .unwrap();
        assert_eq!(p.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn from_leq_rejects_non_transitive() {
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let r = Poset::from_leq(labels, |x, y| (x, y) == (0, 1) || (x, y) == (1, 2));
        assert!(r.is_err());
    }
}
