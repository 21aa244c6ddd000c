//! Shared generators and brute-force oracles for integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tlat::lattice::FiniteLattice;
use tlat::poset::Poset;
use tlat::term::LatticeTerm;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// The lattice of a family of subsets of a `ground`-element set, closed
/// under intersection and containing the full set, ordered by inclusion.
pub fn moore_lattice(family: &[u32], ground: u32) -> FiniteLattice {
    let full = (1u32 << ground) - 1;
    let mut sets: BTreeSet<u32> = family.iter().map(|s| s & full).collect();
    sets.insert(full);
    loop {
        let snapshot: Vec<u32> = sets.iter().copied().collect();
        let before = sets.len();
        for &a in &snapshot {
            for &b in &snapshot {
                sets.insert(a & b);
            }
        }
        if sets.len() == before {
            break;
        }
    }
    let sets: Vec<u32> = sets.into_iter().collect();
    let labels: Vec<String> = sets.iter().map(|s| format!("s{s}")).collect();
    let poset = Poset::from_leq(labels, |x, y| sets[x] & !sets[y] == 0).unwrap();
    FiniteLattice::from_poset(poset).expect("intersection-closed families are lattices")
}

/// A random lattice with at most `max_size` elements.
pub fn random_lattice(rng: &mut ChaCha8Rng, max_size: usize) -> FiniteLattice {
    loop {
        let ground = rng.gen_range(1..=4);
        let k = rng.gen_range(0..=6);
        let family: Vec<u32> = (0..k).map(|_| rng.gen_range(0..(1u32 << ground))).collect();
        let l = moore_lattice(&family, ground);
        if l.len() <= max_size {
            return l;
        }
    }
}

/// A random poset on `n` elements named `g0, g1, ...`: each pair `i < j`
/// is related with probability `density`.
pub fn random_poset(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Poset {
    let labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let mut rel = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                rel.push((labels[i].clone(), labels[j].clone()));
            }
        }
    }
    let p = Poset::build(&labels, &rel).unwrap();
    // Shuffle labels so the order does not follow label order.
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let shuffled: Vec<String> = perm.iter().map(|&k| labels[k].clone()).collect();
    Poset::from_leq(shuffled, |x, y| p.leq(x, y)).unwrap()
}

/// Every partial order on `n` labelled elements `g0, ...`.
pub fn all_posets(n: usize) -> Vec<Poset> {
    let labels: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rel: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &p)| p)
            .collect();
        // Only transitive, antisymmetric relations; each order appears once.
        let holds = |a: usize, b: usize| a == b || rel.contains(&(a, b));
        let antisymmetric = rel.iter().all(|&(a, b)| !rel.contains(&(b, a)));
        let transitive = rel
            .iter()
            .all(|&(a, b)| (0..n).all(|c| !holds(b, c) || holds(a, c)));
        if antisymmetric && transitive && seen.insert(mask) {
            out.push(Poset::from_leq(labels.clone(), holds).unwrap());
        }
    }
    out
}

/// All terms of depth at most `depth` (leaves have depth 1) over `gens`
/// with 0 and 1, using binary operations with the left operand's index not
/// above the right's.
pub fn all_terms(gens: &[String], depth: usize) -> Vec<LatticeTerm> {
    let mut terms: Vec<LatticeTerm> = vec![LatticeTerm::Bottom, LatticeTerm::Top];
    terms.extend(gens.iter().map(|g| LatticeTerm::Gen(g.clone())));
    for _ in 1..depth {
        let prev = terms.clone();
        for i in 0..prev.len() {
            for j in i..prev.len() {
                terms.push(LatticeTerm::Meet(vec![prev[i].clone(), prev[j].clone()]));
                terms.push(LatticeTerm::Join(vec![prev[i].clone(), prev[j].clone()]));
            }
        }
        let mut seen = BTreeSet::new();
        terms.retain(|t| seen.insert(format!("{t:?}")));
    }
    terms
}

/// A random term of depth at most `depth` with 2 or 3 children per node.
pub fn random_term(rng: &mut ChaCha8Rng, gens: &[String], depth: usize) -> LatticeTerm {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..gens.len() + 2) {
            0 if rng.gen_bool(0.5) => LatticeTerm::Bottom,
            0 => LatticeTerm::Top,
            k => LatticeTerm::Gen(gens[(k - 1) % gens.len()].clone()),
        };
    }
    let arity = rng.gen_range(2..=3);
    let kids = (0..arity).map(|_| random_term(rng, gens, depth - 1)).collect();
    if rng.gen_bool(0.5) {
        LatticeTerm::Meet(kids)
    } else {
        LatticeTerm::Join(kids)
    }
}

/// Rewrites `t` by one identity of distributive lattices at a random
/// position, so the result is equal to `t`.
pub fn equal_rewrite(rng: &mut ChaCha8Rng, t: &LatticeTerm, gens: &[String]) -> LatticeTerm {
    use LatticeTerm::*;
    let descend = rng.gen_bool(0.5);
    match t {
        Meet(xs) | Join(xs) if descend => {
            let k = rng.gen_range(0..xs.len());
            let mut ys = xs.clone();
            ys[k] = equal_rewrite(rng, &xs[k], gens);
            if matches!(t, Meet(_)) {
                Meet(ys)
            } else {
                Join(ys)
            }
        }
        _ => {
            let r = random_term(rng, gens, 2);
            match (rng.gen_range(0..5), t) {
                // x = x*(x + r)
                (0, _) => Meet(vec![t.clone(), Join(vec![t.clone(), r])]),
                // x = x + x*r
                (1, _) => Join(vec![t.clone(), Meet(vec![r, t.clone()])]),
                // children commute
                (2, Meet(xs)) => Meet(xs.iter().rev().cloned().collect()),
                (2, Join(xs)) => Join(xs.iter().rev().cloned().collect()),
                // x*(y + z) = x*y + x*z on the first two children
                (3, Meet(xs)) if matches!(&xs[1], Join(_)) => {
                    let Join(ys) = &xs[1] else { unreachable!() };
                    let mut rest = xs.clone();
                    rest.remove(1);
                    let parts = ys
                        .iter()
                        .map(|y| {
                            let mut m = rest.clone();
                            m.push(y.clone());
                            Meet(m)
                        })
                        .collect();
                    Join(parts)
                }
                // x + y*z = (x + y)*(x + z) on the first two children
                (4, Join(xs)) if matches!(&xs[1], Meet(_)) => {
                    let Meet(ys) = &xs[1] else { unreachable!() };
                    let mut rest = xs.clone();
                    rest.remove(1);
                    let parts = ys
                        .iter()
                        .map(|y| {
                            let mut m = rest.clone();
                            m.push(y.clone());
                            Join(m)
                        })
                        .collect();
                    Meet(parts)
                }
                // x = x*1 = x + 0
                (_, _) if rng.gen_bool(0.5) => Meet(vec![t.clone(), Top]),
                _ => Join(vec![Bottom, t.clone()]),
            }
        }
    }
}

/// Two-valued evaluation, written independently of the library.
pub fn eval(t: &LatticeTerm, p: &Poset, v: &[bool]) -> bool {
    match t {
        LatticeTerm::Top => true,
        LatticeTerm::Bottom => false,
        LatticeTerm::Gen(g) => v[p.index_of(g).unwrap()],
        LatticeTerm::Meet(xs) => xs.iter().all(|x| eval(x, p, v)),
        LatticeTerm::Join(xs) => xs.iter().any(|x| eval(x, p, v)),
    }
}

/// Order-preserving maps to `{0, 1}`, by brute force over all masks.
pub fn monotone_maps(p: &Poset) -> Vec<Vec<bool>> {
    let n = p.len();
    (0u32..(1 << n))
        .map(|mask| (0..n).map(|i| mask & (1 << i) != 0).collect::<Vec<bool>>())
        .filter(|v| (0..n).all(|x| (0..n).all(|y| !p.leq(x, y) || !v[x] || v[y])))
        .collect()
}

/// Truth table of a term over the given valuations.
pub fn table(t: &LatticeTerm, p: &Poset, maps: &[Vec<bool>]) -> Vec<bool> {
    maps.iter().map(|v| eval(t, p, v)).collect()
}

/// Number of cells and the bit of cell `(x, y)` in a `w` by `h` grid,
/// 1-based coordinates.
pub fn cell(w: usize, x: usize, y: usize) -> u64 {
    1u64 << ((y - 1) * w + (x - 1))
}

/// The rectangle `x <= j, y <= n + 1 - i` of `u[i, j]` as a cell bitset.
pub fn rectangle(n: usize, m: usize, i: usize, j: usize) -> u64 {
    let w = m + 1;
    let mut s = 0;
    for x in 1..=j.min(w) {
        for y in 1..=(n + 1).saturating_sub(i) {
            s |= cell(w, x, y);
        }
    }
    s
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The poset `a1 > ... > an`, `b1 < ... < bm` with every `(ai, bj)` pair.
pub fn two_chains(n: usize, m: usize) -> (Poset, Vec<(usize, usize)>) {
    let mut labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    labels.extend((1..=m).map(|j| format!("b{j}")));
    let mut rel = Vec::new();
    for i in 1..n {
        rel.push((format!("a{}", i + 1), format!("a{i}")));
    }
    for j in 1..m {
        rel.push((format!("b{j}"), format!("b{}", j + 1)));
    }
    let p = Poset::build(&labels, &rel).unwrap();
    let pairs = (0..n).flat_map(|i| (0..m).map(move |j| (i, n + j))).collect();
    (p, pairs)
}
