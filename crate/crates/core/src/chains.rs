//! The lattice generated by a consistent pair of chains and its grid model.
//!
//! Chains `1 = a_0 > a_1 > ... > a_n > a_{n+1} = 0` and
//! `0 = b_0 < b_1 < ... < b_m < b_{m+1} = 1`. Elements are staircases:
//! down-closed subsets of the grid `[1, m+1] x [1, n+1]`, stored as the
//! non-increasing column heights `h(1), ..., h(m+1)` with values in
//! `[0, n+1]`. Heights grow upward (positive `y`).
//!
//! * `a_i` is the set of rows `y <= n+1-i`;
//! * `b_j` is the set of columns `x <= j`;
//! * `u_ij = a_i * b_j` is the rectangle `x <= j, y <= n+1-i`;
//! * `v_ij = a_i + b_j` is the union of the two.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;

pub const MAX_CHAIN_LENGTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainPair {
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainElem {
    Zero,
    One,
    A(usize),
    B(usize),
    U(usize, usize),
    V(usize, usize),
}

impl ChainPair {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::IndexOutOfRange(format!(
                "chain lengths must be positive (n = {n}, m = {m})"
            )));
        }
        Ok(ChainPair { n, m })
    }

    /// Number of columns, `m + 1`.
    pub fn width(&self) -> usize {
        self.m + 1
    }

    /// Number of rows, `n + 1`.
    pub fn height(&self) -> usize {
        self.n + 1
    }

    fn check_i(&self, i: usize) -> Result<()> {
        if i > self.n + 1 {
            return Err(Error::IndexOutOfRange(format!("a index {i} not in [0, {}]", self.n + 1)));
        }
        Ok(())
    }

    fn check_j(&self, j: usize) -> Result<()> {
        if j > self.m + 1 {
            return Err(Error::IndexOutOfRange(format!("b index {j} not in [0, {}]", self.m + 1)));
        }
        Ok(())
    }

    pub fn check_u(&self, i: usize, j: usize) -> Result<()> {
        self.check_i(i)?;
        self.check_j(j)
    }

    fn row_height(&self, i: usize) -> usize {
        self.n + 1 - i
    }

    pub fn embed(&self, e: ChainElem) -> Result<Staircase> {
        let (w, top) = (self.width(), self.height());
        let heights = match e {
            ChainElem::Zero => vec![0; w],
            ChainElem::One => vec![top; w],
            ChainElem::A(i) => {
                self.check_i(i)?;
                vec![self.row_height(i); w]
            }
            ChainElem::B(j) => {
                self.check_j(j)?;
                (1..=w).map(|x| if x <= j { top } else { 0 }).collect()
            }
            ChainElem::U(i, j) => {
                self.check_u(i, j)?;
                (1..=w).map(|x| if x <= j { self.row_height(i) } else { 0 }).collect()
            }
            ChainElem::V(i, j) => {
                self.check_u(i, j)?;
                (1..=w)
                    .map(|x| if x <= j { top } else { self.row_height(i) })
                    .collect()
            }
        };
        Ok(Staircase { heights })
    }

    pub fn u_sum_normal_form(&self, pairs: &[(usize, usize)]) -> Result<UNormalForm> {
        for &(i, j) in pairs {
            self.check_u(i, j)?;
        }
        let live: Vec<(usize, usize)> = pairs
            .iter()
            .copied()
            .filter(|&(i, j)| i <= self.n && j >= 1)
            .collect();
        let mut keep: Vec<(usize, usize)> = Vec::with_capacity(live.len());
        for (t, &(p, q)) in live.iter().enumerate() {
            // u_pq <= u_rs iff p >= r and q <= s; among duplicates keep the first.
            let absorbed = live.iter().enumerate().any(|(s, &(r, k))| {
                (r, k) != (p, q) && p >= r && q <= k || (r, k) == (p, q) && s < t
            });
            if !absorbed {
                keep.push((p, q));
            }
        }
        keep.sort_unstable();
        Ok(UNormalForm { pairs: keep })
    }

    pub fn u_to_staircase(&self, f: &UNormalForm) -> Staircase {
        let mut s = Staircase::empty(*self);
        for &(i, j) in &f.pairs {
            s = s.union(&self.embed(ChainElem::U(i, j)).expect("normal forms hold valid indices"));
        }
        s
    }

    /// The rectangles at the outer corners of the staircase.
    pub fn staircase_to_u(&self, s: &Staircase) -> UNormalForm {
        let h = &s.heights;
        let w = self.width();
        let pairs = (1..=w)
            .filter(|&x| h[x - 1] > 0 && (x == w || h[x] < h[x - 1]))
            .map(|x| (self.n + 1 - h[x - 1], x))
            .collect();
        UNormalForm { pairs }
    }

    /// The factors `v_ij` cut out by the minimal points of the complement.
    pub fn staircase_to_v(&self, s: &Staircase) -> VNormalForm {
        let h = &s.heights;
        let pairs = (1..=self.width())
            .filter(|&x| h[x - 1] < self.height() && (x == 1 || h[x - 2] > h[x - 1]))
            .map(|x| (self.n + 1 - h[x - 1], x - 1))
            .collect();
        VNormalForm { pairs }
    }

    pub fn v_to_staircase(&self, f: &VNormalForm) -> Staircase {
        let mut s = Staircase::full(*self);
        for &(i, j) in &f.pairs {
            s = s.intersection(&self.embed(ChainElem::V(i, j)).expect("normal forms hold valid indices"));
        }
        s
    }

    /// Canonical v-form of an arbitrary product of `v_ij`.
    pub fn v_product_normal_form(&self, pairs: &[(usize, usize)]) -> Result<VNormalForm> {
        for &(i, j) in pairs {
            self.check_u(i, j)?;
        }
        let mut s = Staircase::full(*self);
        for &(i, j) in pairs {
            s = s.intersection(&self.embed(ChainElem::V(i, j))?);
        }
        Ok(self.staircase_to_v(&s))
    }

    pub fn v_to_u(&self, f: &VNormalForm) -> UNormalForm {
        self.staircase_to_u(&self.v_to_staircase(f))
    }

    pub fn u_to_v(&self, f: &UNormalForm) -> VNormalForm {
        self.staircase_to_v(&self.u_to_staircase(f))
    }

    pub fn meet(&self, f1: &UNormalForm, f2: &UNormalForm) -> UNormalForm {
        self.staircase_to_u(&self.u_to_staircase(f1).intersection(&self.u_to_staircase(f2)))
    }

    pub fn join(&self, f1: &UNormalForm, f2: &UNormalForm) -> UNormalForm {
        self.staircase_to_u(&self.u_to_staircase(f1).union(&self.u_to_staircase(f2)))
    }

    fn check_index_lists(&self, is: &[usize], js: &[usize]) -> Result<()> {
        if is.len() != js.len() {
            return Err(Error::LengthMismatch(is.len(), js.len()));
        }
        if is.is_empty() {
            return Err(Error::InvalidIndices("index lists are empty".into()));
        }
        for w in is.windows(2) {
            if w[0] > w[1] {
                return Err(Error::InvalidIndices(format!("{is:?} is not non-decreasing")));
            }
        }
        for w in js.windows(2) {
            if w[0] > w[1] {
                return Err(Error::InvalidIndices(format!("{js:?} is not non-decreasing")));
            }
        }
        for (&i, &j) in is.iter().zip(js) {
            self.check_u(i, j)?;
        }
        Ok(())
    }

    /// `a_{i1} (b_{j1} + a_{i2}) ... (b_{j(k-1)} + a_{ik}) b_{jk}`, evaluated
    /// left to right on staircases.
    pub fn r_term(&self, is: &[usize], js: &[usize]) -> Result<UNormalForm> {
        self.check_index_lists(is, js)?;
        let k = is.len();
        let mut s = self.embed(ChainElem::A(is[0]))?;
        for t in 1..k {
            s = s.intersection(&self.embed(ChainElem::V(is[t], js[t - 1]))?);
        }
        s = s.intersection(&self.embed(ChainElem::B(js[k - 1]))?);
        Ok(self.staircase_to_u(&s))
    }

    /// `a_{i1} b_{j1} + ... + a_{ik} b_{jk}`.
    pub fn s_term(&self, is: &[usize], js: &[usize]) -> Result<UNormalForm> {
        self.check_index_lists(is, js)?;
        let pairs: Vec<(usize, usize)> = is.iter().copied().zip(js.iter().copied()).collect();
        self.u_sum_normal_form(&pairs)
    }

    /// Every staircase, in lexicographic order of height profiles.
    pub fn staircases(&self) -> Vec<Staircase> {
        let mut out = Vec::new();
        let mut h = Vec::with_capacity(self.width());
        self.fill(&mut h, self.height(), &mut out);
        out
    }

    fn fill(&self, h: &mut Vec<usize>, cap: usize, out: &mut Vec<Staircase>) {
        if h.len() == self.width() {
            out.push(Staircase { heights: h.clone() });
            return;
        }
        for v in 0..=cap {
            h.push(v);
            self.fill(h, v, out);
            h.pop();
        }
    }

    pub fn enumerate_lattice(&self) -> Result<ChainLattice> {
        let limit = MAX_CHAIN_LENGTH;
        if self.n > limit || self.m > limit {
            return Err(Error::guard("chain length", self.n.max(self.m), limit));
        }
        let profiles = self.staircases();
        let index: HashMap<Vec<usize>, usize> = profiles
            .iter()
            .enumerate()
            .map(|(k, s)| (s.heights.clone(), k))
            .collect();
        let labels: Vec<String> = profiles
            .iter()
            .map(|s| self.staircase_to_u(s).display(*self).to_string())
            .collect();
        let lattice = FiniteLattice::from_operations(
            labels,
            |x, y| index[&profiles[x].intersection(&profiles[y]).heights],
            |x, y| index[&profiles[x].union(&profiles[y]).heights],
        )?;
        Ok(ChainLattice {
            pair: *self,
            lattice,
            profiles,
            index,
        })
    }

    /// The step function `x -> h(x)` of a staircase.
    pub fn perversity_view(&self, s: &Staircase) -> Vec<usize> {
        s.heights.clone()
    }
}

/// A down-closed subset of the grid, by column heights.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Staircase {
    heights: Vec<usize>,
}

impl Staircase {
    pub fn empty(cp: ChainPair) -> Self {
        Staircase {
            heights: vec![0; cp.width()],
        }
    }

    pub fn full(cp: ChainPair) -> Self {
        Staircase {
            heights: vec![cp.height(); cp.width()],
        }
    }

    pub fn from_profile(cp: ChainPair, heights: Vec<usize>) -> Result<Self> {
        if heights.len() != cp.width() {
            return Err(Error::LengthMismatch(heights.len(), cp.width()));
        }
        if heights.iter().any(|&h| h > cp.height()) {
            return Err(Error::IndexOutOfRange(format!(
                "height above {} in {heights:?}",
                cp.height()
            )));
        }
        if heights.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidIndices(format!("{heights:?} is not non-increasing")));
        }
        Ok(Staircase { heights })
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    /// Membership of the cell `(x, y)`, both 1-based.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= 1 && x <= self.heights.len() && y >= 1 && y <= self.heights[x - 1]
    }

    pub fn cell_count(&self) -> usize {
        self.heights.iter().sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        Staircase {
            heights: self.heights.iter().zip(&other.heights).map(|(a, b)| *a.max(b)).collect(),
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Staircase {
            heights: self.heights.iter().zip(&other.heights).map(|(a, b)| *a.min(b)).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.heights.iter().zip(&other.heights).all(|(a, b)| a <= b)
    }
}

impl fmt::Display for Staircase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.heights.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `u_{i1 j1} + ... + u_{ik jk}` with both index sequences strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct UNormalForm {
    pairs: Vec<(usize, usize)>,
}

impl UNormalForm {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.pairs.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1)
    }

    pub fn display(&self, cp: ChainPair) -> impl fmt::Display + '_ {
        FormDisplay {
            pairs: &self.pairs,
            cp,
            sum: true,
        }
    }
}

/// `v_{i1 j1} * ... * v_{ik jk}` with both index sequences strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct VNormalForm {
    pairs: Vec<(usize, usize)>,
}

impl VNormalForm {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn display(&self, cp: ChainPair) -> impl fmt::Display + '_ {
        FormDisplay {
            pairs: &self.pairs,
            cp,
            sum: false,
        }
    }
}

struct FormDisplay<'a> {
    pairs: &'a [(usize, usize)],
    cp: ChainPair,
    sum: bool,
}

impl fmt::Display for FormDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, m) = (self.cp.n, self.cp.m);
        if self.pairs.is_empty() {
            return write!(f, "{}", if self.sum { "0" } else { "1" });
        }
        for (k, &(i, j)) in self.pairs.iter().enumerate() {
            if k > 0 {
                write!(f, "{}", if self.sum { " + " } else { "*" })?;
            }
            let a_trivial = if self.sum { i == 0 } else { i == n + 1 };
            let b_trivial = if self.sum { j == m + 1 } else { j == 0 };
            match (a_trivial, b_trivial) {
                (true, true) => write!(f, "{}", if self.sum { "1" } else { "0" })?,
                (true, false) => write!(f, "b{j}")?,
                (false, true) => write!(f, "a{i}")?,
                (false, false) if self.sum => write!(f, "u[{i},{j}]")?,
                (false, false) if self.pairs.len() == 1 => write!(f, "a{i} + b{j}")?,
                (false, false) => write!(f, "(a{i} + b{j})")?,
            }
        }
        Ok(())
    }
}

/// The full grid lattice of a chain pair.
#[derive(Clone, Debug)]
pub struct ChainLattice {
    pub pair: ChainPair,
    pub lattice: FiniteLattice,
    profiles: Vec<Staircase>,
    index: HashMap<Vec<usize>, usize>,
}

impl ChainLattice {
    pub fn profile(&self, x: usize) -> &Staircase {
        &self.profiles[x]
    }

    pub fn element_of(&self, s: &Staircase) -> usize {
        self.index[&s.heights]
    }

    pub fn element(&self, e: ChainElem) -> Result<usize> {
        Ok(self.element_of(&self.pair.embed(e)?))
    }

    pub fn u_form(&self, x: usize) -> UNormalForm {
        self.pair.staircase_to_u(&self.profiles[x])
    }
}

/// Whether `u_ij = u_{i+1,j} + u_{i,j-1}` holds in `lattice`, where `u`
/// maps index pairs to elements. Zero is never decomposable.
pub fn decomposable(
    cp: ChainPair,
    lattice: &FiniteLattice,
    u: &dyn Fn(usize, usize) -> usize,
    i: usize,
    j: usize,
) -> Result<bool> {
    cp.check_u(i, j)?;
    let x = u(i, j);
    if x == lattice.bottom() || i == cp.n + 1 || j == 0 {
        return Ok(false);
    }
    Ok(x == lattice.join(u(i + 1, j), u(i, j - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(n: usize, m: usize) -> ChainPair {
        ChainPair::new(n, m).unwrap()
    }

    #[test]
    fn embedding_of_one_by_one() {
        let c = cp(1, 1);
        let u11 = c.embed(ChainElem::U(1, 1)).unwrap();
        assert_eq!(u11.heights(), &[1, 0]);
        assert!(u11.contains(1, 1) && u11.cell_count() == 1);
        assert_eq!(c.embed(ChainElem::A(1)).unwrap().heights(), &[1, 1]);
        assert_eq!(c.embed(ChainElem::B(1)).unwrap().heights(), &[2, 0]);
        let images = [
            c.embed(ChainElem::Zero).unwrap(),
            u11,
            c.embed(ChainElem::A(1)).unwrap(),
            c.embed(ChainElem::B(1)).unwrap(),
            c.embed(ChainElem::V(1, 1)).unwrap(),
            c.embed(ChainElem::One).unwrap(),
        ];
        let distinct: std::collections::BTreeSet<_> = images.iter().collect();
        assert_eq!(distinct.len(), 6);
        assert!(c.embed(ChainElem::A(3)).is_err());
    }

    #[test]
    fn u21_is_bottom_left_cell() {
        let c = cp(2, 2);
        assert_eq!(c.embed(ChainElem::U(2, 1)).unwrap().heights(), &[1, 0, 0]);
    }

    #[test]
    fn absorption() {
        let c = cp(2, 3);
        assert_eq!(c.u_sum_normal_form(&[(1, 3), (2, 2)]).unwrap().pairs(), &[(1, 3)]);
        assert_eq!(c.u_sum_normal_form(&[(2, 2), (1, 1)]).unwrap().pairs(), &[(1, 1), (2, 2)]);
        assert!(c.u_sum_normal_form(&[]).unwrap().pairs().is_empty());
        assert!(c.u_sum_normal_form(&[(3, 2), (1, 0)]).unwrap().pairs().is_empty());
        assert_eq!(c.u_sum_normal_form(&[(1, 1), (1, 1)]).unwrap().pairs(), &[(1, 1)]);
    }

    #[test]
    fn meets_and_joins() {
        let c = cp(2, 2);
        let u = |i, j| c.u_sum_normal_form(&[(i, j)]).unwrap();
        assert_eq!(c.meet(&u(1, 1), &u(2, 2)), u(2, 1));
        let f = c.u_sum_normal_form(&[(1, 1), (2, 2)]).unwrap();
        assert_eq!(c.meet(&f, &u(1, 2)), f);
        assert_eq!(c.join(&f, &c.u_sum_normal_form(&[]).unwrap()), f);
    }

    #[test]
    fn r_equals_s_small() {
        let c = cp(2, 2);
        let r = c.r_term(&[1, 2], &[1, 2]).unwrap();
        assert_eq!(r.pairs(), &[(1, 1), (2, 2)]);
        assert_eq!(r, c.s_term(&[1, 2], &[1, 2]).unwrap());
        assert_eq!(c.r_term(&[2], &[1]).unwrap(), c.s_term(&[2], &[1]).unwrap());
        assert!(matches!(c.r_term(&[1, 2], &[1]), Err(Error::LengthMismatch(2, 1))));
        assert!(c.r_term(&[2, 1], &[1, 2]).is_err());
    }

    #[test]
    fn v_forms() {
        let c = cp(2, 2);
        let f = c.u_sum_normal_form(&[(1, 1), (2, 2)]).unwrap();
        let v = c.u_to_v(&f);
        assert_eq!(v.pairs(), &[(1, 0), (2, 1), (3, 2)]);
        assert_eq!(v.display(c).to_string(), "a1*(a2 + b1)*b2");
        assert_eq!(c.v_to_u(&v), f);
        assert_eq!(c.perversity_view(&c.u_to_staircase(&f)), vec![2, 1, 0]);
        let single = c.v_product_normal_form(&[(1, 1)]).unwrap();
        assert_eq!(c.v_to_staircase(&single).heights(), &[3, 2, 2]);
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(cp(1, 1).enumerate_lattice().unwrap().lattice.len(), 6);
        let l = cp(2, 2).enumerate_lattice().unwrap();
        assert_eq!(l.lattice.len(), 20);
        assert!(l.lattice.check_laws().distributive);
        assert!(matches!(cp(7, 1).enumerate_lattice(), Err(Error::SizeGuardExceeded { .. })));
        let top = l.lattice.top();
        assert_eq!(l.lattice.label(top), "1");
        assert_eq!(l.lattice.label(l.lattice.bottom()), "0");
    }

    #[test]
    fn proper_u_are_indecomposable() {
        let c = cp(2, 3);
        let l = c.enumerate_lattice().unwrap();
        let u = |i, j| l.element(ChainElem::U(i, j)).unwrap();
        let irreducible = l.lattice.join_irreducibles();
        for i in 0..=c.n + 1 {
            for j in 0..=c.m + 1 {
                let d = decomposable(c, &l.lattice, &u, i, j).unwrap();
                assert!(!d, "u[{i},{j}]");
                if i <= c.n && j >= 1 {
                    assert!(irreducible.contains(&u(i, j)));
                }
            }
        }
        assert!(decomposable(c, &l.lattice, &u, 4, 1).is_err());
    }
}
