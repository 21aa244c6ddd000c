//! Small lattices: exhaustive enumeration up to isomorphism and an
//! isomorphism finder driven by join-irreducibles.

use std::collections::BTreeSet;

use crate::lattice::FiniteLattice;

/// Every lattice with at most `max_size` elements, one per isomorphism
/// class, ordered by size and then by canonical code.
///
/// Lattices of size `n >= 2` are bounded posets whose interior is a poset on
/// `n - 2` elements; interiors are generated as naturally labelled posets
/// (each new element is maximal, its strict down-set an order ideal of what
/// came before).
pub fn lattices_up_to(max_size: usize) -> Vec<FiniteLattice> {
    assert!(max_size <= 8, "interior enumeration is exhaustive; keep max_size <= 8");
    let mut out = Vec::new();
    if max_size >= 1 {
        out.push(
            FiniteLattice::from_operations(vec!["0".into()], |_, _| 0, |_, _| 0)
                .expect("one-element lattice"),
        );
    }
    for n in 2..=max_size {
        let k = n - 2;
        let perms = permutations(k);
        let mut seen: BTreeSet<u64> = BTreeSet::new();
        for interior in natural_posets(k) {
            if let Some(l) = bounded_lattice(k, &interior) {
                let code = canonical_code(k, &interior, &perms);
                if seen.insert(code) {
                    out.push(l);
                }
            }
        }
    }
    out
}

/// Strict-order matrices `lt[i][j]` (i < j as labels) of naturally labelled
/// posets on `k` elements.
fn natural_posets(k: usize) -> Vec<Vec<Vec<bool>>> {
    let mut acc = vec![vec![]];
    for size in 0..k {
        let mut next = Vec::new();
        for p in &acc {
            for ideal in order_ideals(size, p) {
                let mut q: Vec<Vec<bool>> = p
                    .iter()
                    .map(|row: &Vec<bool>| {
                        let mut r = row.clone();
                        r.push(false);
                        r
                    })
                    .collect();
                for (i, row) in q.iter_mut().enumerate() {
                    if ideal & (1 << i) != 0 {
                        row[size] = true;
                    }
                }
                q.push(vec![false; size + 1]);
                next.push(q);
            }
        }
        acc = next;
    }
    acc
}

/// Down-closed subsets of a strict order on `size` elements, as bit masks.
fn order_ideals(size: usize, lt: &[Vec<bool>]) -> Vec<u32> {
    (0u32..(1 << size))
        .filter(|&mask| {
            (0..size).all(|j| {
                mask & (1 << j) == 0 || (0..size).all(|i| !lt[i][j] || mask & (1 << i) != 0)
            })
        })
        .collect()
}

fn bounded_lattice(k: usize, lt: &[Vec<bool>]) -> Option<FiniteLattice> {
    let n = k + 2;
    let labels: Vec<String> = (0..n)
        .map(|i| match i {
            0 => "0".to_string(),
            i if i == n - 1 => "1".to_string(),
            i => format!("e{i}"),
        })
        .collect();
    let leq = |x: usize, y: usize| {
        x == y || x == 0 || y == n - 1 || (x > 0 && y > 0 && x < n - 1 && y < n - 1 && lt[x - 1][y - 1])
    };
    let poset = crate::poset::Poset::from_leq(labels, leq).ok()?;
    crate::lattice::is_lattice(&poset)
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..k).collect();
    heap_permute(k, &mut p, &mut out);
    out
}

fn heap_permute(size: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if size <= 1 {
        out.push(p.clone());
        return;
    }
    for i in 0..size {
        heap_permute(size - 1, p, out);
        if size % 2 == 0 {
            p.swap(i, size - 1);
        } else {
            p.swap(0, size - 1);
        }
    }
}

fn canonical_code(k: usize, lt: &[Vec<bool>], perms: &[Vec<usize>]) -> u64 {
    perms
        .iter()
        .map(|perm| {
            let mut code = 0u64;
            for i in 0..k {
                for j in 0..k {
                    code <<= 1;
                    if lt[perm[i]][perm[j]] {
                        code |= 1;
                    }
                }
            }
            code
        })
        .min()
        .unwrap_or(0)
}

/// An isomorphism `a -> b` as an index map, if one exists.
pub fn find_isomorphism(a: &FiniteLattice, b: &FiniteLattice) -> Option<Vec<usize>> {
    if a.len() != b.len() {
        return None;
    }
    let ja = a.join_irreducibles();
    let jb = b.join_irreducibles();
    if ja.len() != jb.len() {
        return None;
    }
    let sig = |l: &FiniteLattice, x: usize| {
        let p = l.poset();
        (p.down_set(x).count_ones(..), p.up_set(x).count_ones(..))
    };
    let mut assignment: Vec<usize> = Vec::with_capacity(ja.len());
    let mut used = vec![false; jb.len()];
    search(a, b, &ja, &jb, &sig, &mut assignment, &mut used)
}

fn search(
    a: &FiniteLattice,
    b: &FiniteLattice,
    ja: &[usize],
    jb: &[usize],
    sig: &dyn Fn(&FiniteLattice, usize) -> (usize, usize),
    assignment: &mut Vec<usize>,
    used: &mut [bool],
) -> Option<Vec<usize>> {
    let depth = assignment.len();
    if depth == ja.len() {
        return extend(a, b, ja, jb, assignment);
    }
    let x = ja[depth];
    for (t, &y) in jb.iter().enumerate() {
        if used[t] || sig(a, x) != sig(b, y) {
            continue;
        }
        let consistent = assignment.iter().enumerate().all(|(s, &u)| {
            let (xs, ys) = (ja[s], jb[u]);
            a.leq(xs, x) == b.leq(ys, y) && a.leq(x, xs) == b.leq(y, ys)
        });
        if !consistent {
            continue;
        }
        used[t] = true;
        assignment.push(t);
        if let Some(m) = search(a, b, ja, jb, sig, assignment, used) {
            return Some(m);
        }
        assignment.pop();
        used[t] = false;
    }
    None
}

fn extend(
    a: &FiniteLattice,
    b: &FiniteLattice,
    ja: &[usize],
    jb: &[usize],
    assignment: &[usize],
) -> Option<Vec<usize>> {
    let n = a.len();
    let map: Vec<usize> = (0..n)
        .map(|x| {
            b.join_all(
                ja.iter()
                    .zip(assignment)
                    .filter(|(&j, _)| a.leq(j, x))
                    .map(|(_, &t)| jb[t]),
            )
        })
        .collect();
    let mut hit = vec![false; n];
    for &y in &map {
        if hit[y] {
            return None;
        }
        hit[y] = true;
    }
    for x in 0..n {
        for y in 0..n {
            if map[a.meet(x, y)] != b.meet(map[x], map[y]) || map[a.join(x, y)] != b.join(map[x], map[y]) {
                return None;
            }
        }
    }
    Some(map)
}
