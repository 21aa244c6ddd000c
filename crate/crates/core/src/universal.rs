//! Staged construction of the universal lattice with consistencies U(P)
//! generated by a poset with declared lower and upper pairs, and the
//! canonical map onto D(P).
//!
//! Each stage works on the classes of a finitely presented lattice:
//!
//! 1. saturate the consistency relations over the current classes;
//! 2. impose `(t1+t2)*t3 = t1+t2*t3` on every triple matching SC4, SC5 or
//!    SC5' (creating the terms involved);
//! 3. add every meet and join of two classes that is not yet present.
//!
//! The construction has stabilized when a stage leaves the classes, their
//! order and the relations unchanged; the classes then form a lattice.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::consistency::{ConsistencyStructure, Op, Relation};
use crate::dnf::{enumerate_d, to_dnf, CanonicalDnf};
use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::poset::Poset;
use crate::presented::{Presentation, BOTTOM, TOP};

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: usize,
    /// Classes at the start of the stage.
    pub classes: usize,
    pub lower_pairs: usize,
    pub upper_pairs: usize,
    pub derivations: usize,
    pub modular_triples: usize,
    /// Term nodes created during the stage.
    pub new_nodes: usize,
    pub changed: bool,
}

#[derive(Clone, Debug)]
pub struct StagedUniversal {
    presentation: Presentation,
    generators: Poset,
    lower: BTreeSet<(usize, usize)>,
    upper: BTreeSet<(usize, usize)>,
    pub stages: Vec<StageReport>,
    pub stabilized: bool,
    /// First stage whose classes and order equal the final ones.
    pub stable_stage: Option<usize>,
}

/// Generator poset: the elements of `p` other than its declared bounds,
/// which are identified with `0` and `1`.
fn generator_poset(p: &Poset) -> Result<(Poset, Vec<Option<usize>>)> {
    let keep: Vec<usize> = (0..p.len())
        .filter(|&x| Some(x) != p.bottom() && Some(x) != p.top())
        .collect();
    let labels: Vec<String> = keep.iter().map(|&x| p.label(x).to_string()).collect();
    let gens = Poset::from_leq(labels, |i, j| p.leq(keep[i], keep[j]))?;
    let mut node_of = vec![None; p.len()];
    for (g, &x) in keep.iter().enumerate() {
        node_of[x] = Some(g);
    }
    Ok((gens, node_of))
}

type Signature = (Vec<usize>, Vec<Vec<usize>>);

impl StagedUniversal {
    pub fn generators(&self) -> &Poset {
        &self.generators
    }

    fn signature(&self) -> Signature {
        let reps = self.presentation.reps();
        let order = reps
            .iter()
            .map(|&x| reps.iter().copied().filter(|&y| self.presentation.leq(x, y)).collect())
            .collect();
        (reps, order)
    }

    fn canonical_pairs(&self, pairs: &BTreeSet<(usize, usize)>) -> BTreeSet<(usize, usize)> {
        pairs
            .iter()
            .map(|&(x, y)| (self.presentation.rep(x), self.presentation.rep(y)))
            .filter(|(x, y)| x != y)
            .collect()
    }

    /// Current classes as a consistency structure over their order, with
    /// the meets and joins known so far.
    fn snapshot(&self) -> Result<(ConsistencyStructure, Vec<usize>)> {
        let reps = self.presentation.reps();
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let labels: Vec<String> = reps.iter().map(|&x| self.presentation.term(x).to_string()).collect();
        let carrier = Poset::from_leq(labels, |i, j| self.presentation.leq(reps[i], reps[j]))?
            .with_bounds(Some(pos[&BOTTOM]), Some(pos[&TOP]))?;
        let n = reps.len();
        let mut meet = vec![None; n * n];
        let mut join = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                meet[i * n + j] = self.presentation.lookup(Op::Meet, reps[i], reps[j]).map(|v| pos[&v]);
                join[i * n + j] = self.presentation.lookup(Op::Join, reps[i], reps[j]).map(|v| pos[&v]);
            }
        }
        Ok((ConsistencyStructure::from_parts(carrier, meet, join)?, reps))
    }

    fn run_stage(&mut self, stage: usize, max_nodes: usize) -> Result<StageReport> {
        let before_sig = self.signature();
        let before_lower = self.canonical_pairs(&self.lower);
        let before_upper = self.canonical_pairs(&self.upper);
        let nodes_before = self.presentation.len();

        let (mut cs, reps) = self.snapshot()?;
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut requests: BTreeSet<(Op, usize, usize)> = BTreeSet::new();
        for (pairs, rel) in [(&before_lower, Relation::Lower), (&before_upper, Relation::Upper)] {
            for &(x, y) in pairs {
                let (i, j) = (pos[&x], pos[&y]);
                let seeded = match rel {
                    Relation::Lower => cs.declare_lower(i, j),
                    Relation::Upper => cs.declare_upper(i, j),
                };
                if seeded.is_err() {
                    let op = if rel == Relation::Lower { Op::Meet } else { Op::Join };
                    requests.insert((op, x.min(y), x.max(y)));
                }
            }
        }
        for r in cs.saturate_lenient() {
            requests.insert((r.op, reps[r.left], reps[r.right]));
        }
        let derivations = cs.log().len();
        for rel in [Relation::Lower, Relation::Upper] {
            let store = if rel == Relation::Lower { &mut self.lower } else { &mut self.upper };
            for (i, j) in cs.pairs(rel) {
                store.insert((reps[i], reps[j]));
            }
        }

        let triples = cs.modular_triples();
        for &[t1, t2, t3] in &triples {
            let (t1, t2, t3) = (reps[t1], reps[t2], reps[t3]);
            let (s, _) = self.presentation.op(Op::Join, t1, t2);
            let (lhs, _) = self.presentation.op(Op::Meet, s, t3);
            let (p, _) = self.presentation.op(Op::Meet, t2, t3);
            let (rhs, _) = self.presentation.op(Op::Join, t1, p);
            self.presentation.add_fact(lhs, rhs);
            self.guard(max_nodes)?;
        }
        for (op, x, y) in requests {
            self.presentation.op(op, x, y);
            self.guard(max_nodes)?;
        }
        self.presentation.rekey();

        // One more layer of terms.
        let reps = self.presentation.reps();
        for (k, &x) in reps.iter().enumerate() {
            for &y in &reps[k + 1..] {
                for op in [Op::Meet, Op::Join] {
                    if self.presentation.lookup(op, self.presentation.rep(x), self.presentation.rep(y)).is_none() {
                        self.presentation.op(op, x, y);
                        self.guard(max_nodes)?;
                    }
                }
            }
        }
        self.presentation.rekey();

        let changed = self.signature() != before_sig
            || self.canonical_pairs(&self.lower) != before_lower
            || self.canonical_pairs(&self.upper) != before_upper;
        Ok(StageReport {
            stage,
            classes: before_sig.0.len(),
            lower_pairs: before_lower.len(),
            upper_pairs: before_upper.len(),
            derivations,
            modular_triples: triples.len(),
            new_nodes: self.presentation.len() - nodes_before,
            changed,
        })
    }

    fn guard(&self, max_nodes: usize) -> Result<()> {
        if self.presentation.len() > max_nodes {
            return Err(Error::guard("term nodes of the staged construction", self.presentation.len(), max_nodes));
        }
        Ok(())
    }

    /// The stabilized lattice, with its lower and upper pairs (by element
    /// index).
    pub fn lattice(&self) -> Result<UniversalLattice> {
        if !self.stabilized {
            return Err(Error::NotStabilized);
        }
        let reps = self.presentation.reps();
        let pos: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let labels: Vec<String> = reps.iter().map(|&x| self.presentation.term(x).to_string()).collect();
        let lattice = FiniteLattice::from_operations(
            labels,
            |i, j| pos[&self.presentation.lookup(Op::Meet, reps[i], reps[j]).expect("closed")],
            |i, j| pos[&self.presentation.lookup(Op::Join, reps[i], reps[j]).expect("closed")],
        )?;
        let map = |pairs: &BTreeSet<(usize, usize)>| -> Vec<(usize, usize)> {
            self.canonical_pairs(pairs)
                .into_iter()
                .map(|(x, y)| (pos[&x], pos[&y]))
                .collect()
        };
        let terms = reps.iter().map(|&x| self.presentation.term(x)).collect();
        let generator_elements = (0..self.generators.len())
            .map(|g| pos[&self.presentation.rep(self.presentation.generator_node(g))])
            .collect();
        Ok(UniversalLattice {
            lower: map(&self.lower),
            upper: map(&self.upper),
            lattice,
            terms,
            generator_elements,
        })
    }

    /// Number of classes currently present.
    pub fn class_count(&self) -> usize {
        self.presentation.reps().len()
    }
}

#[derive(Clone, Debug)]
pub struct UniversalLattice {
    pub lattice: FiniteLattice,
    pub lower: Vec<(usize, usize)>,
    pub upper: Vec<(usize, usize)>,
    /// A representative term per element.
    pub terms: Vec<crate::term::LatticeTerm>,
    pub generator_elements: Vec<usize>,
}

pub const DEFAULT_MAX_NODES: usize = 20_000;

/// Builds U(P) stage by stage. `lower` and `upper` are pairs of element
/// indices of `p`; declared bounds of `p` are identified with `0` and `1`.
pub fn build_u_staged(
    p: &Poset,
    lower: &[(usize, usize)],
    upper: &[(usize, usize)],
    max_depth: usize,
    max_nodes: usize,
) -> Result<StagedUniversal> {
    let (generators, gen_of) = generator_poset(p)?;
    let order: Vec<(usize, usize)> = (0..generators.len())
        .flat_map(|x| generators.up_set(x).ones().filter(move |&y| y != x).map(move |y| (x, y)))
        .collect();
    let presentation = Presentation::new(generators.labels().to_vec(), &order);
    let node = |x: usize| match gen_of[x] {
        Some(g) => g + 2,
        None if Some(x) == p.bottom() => BOTTOM,
        None => TOP,
    };
    let mut u = StagedUniversal {
        presentation,
        generators,
        lower: lower.iter().map(|&(x, y)| (node(x), node(y))).collect(),
        upper: upper.iter().map(|&(x, y)| (node(x), node(y))).collect(),
        stages: Vec::new(),
        stabilized: false,
        stable_stage: None,
    };
    let mut last_carrier_change = 0;
    for stage in 0..=max_depth {
        let before = u.signature();
        let report = u.run_stage(stage, max_nodes)?;
        if u.signature() != before {
            last_carrier_change = stage + 1;
        }
        let changed = report.changed;
        u.stages.push(report);
        if !changed {
            u.stabilized = true;
            u.stable_stage = Some(last_carrier_change);
            return Ok(u);
        }
    }
    Err(Error::DepthExceeded {
        depth: max_depth,
        partial: Box::new(u),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiReport {
    /// Index in D(P) of the image of each element of U(P).
    pub image: Vec<usize>,
    pub homomorphism: bool,
    pub surjective: bool,
    pub injective: bool,
    /// First pair of U(P) elements whose meet or join is not preserved.
    pub witness: Option<(usize, usize)>,
    pub d_size: usize,
}

/// The canonical map U(P) -> D(P): each element goes to the normal form of
/// its representative term.
pub fn psi(u: &StagedUniversal, max_d_elements: usize) -> Result<(PsiReport, UniversalLattice, FiniteLattice)> {
    let ul = u.lattice()?;
    let gens = u.generators();
    let (d, forms) = enumerate_d(gens, max_d_elements)?;
    let index: HashMap<&CanonicalDnf, usize> = forms.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let mut image = Vec::with_capacity(ul.lattice.len());
    for t in &ul.terms {
        image.push(index[&to_dnf(t, gens)?]);
    }
    let n = ul.lattice.len();
    let mut witness = None;
    'scan: for x in 0..n {
        for y in 0..n {
            if image[ul.lattice.meet(x, y)] != d.meet(image[x], image[y])
                || image[ul.lattice.join(x, y)] != d.join(image[x], image[y])
            {
                witness = Some((x, y));
                break 'scan;
            }
        }
    }
    let mut hit = vec![false; d.len()];
    for &i in &image {
        hit[i] = true;
    }
    let distinct: BTreeSet<usize> = image.iter().copied().collect();
    let report = PsiReport {
        homomorphism: witness.is_none(),
        surjective: hit.iter().all(|&h| h),
        injective: distinct.len() == n,
        witness,
        d_size: d.len(),
        image,
    };
    Ok((report, ul, d))
}
