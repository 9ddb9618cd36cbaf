//! Brute-force oracles shared by the integration tests. Everything here
//! works on plain vectors and nested loops, independent of the bitset code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use circulant::{CirculantTournament, SymbolSet, VertexPartition};

pub fn set(m: usize, xs: &[usize]) -> circulant::ResidueSet {
    circulant::ResidueSet::from_residues(m, xs.iter().copied()).unwrap()
}

pub fn elems(s: &circulant::ResidueSet) -> BTreeSet<usize> {
    s.iter().collect()
}

pub fn naive_sumset(m: usize, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x + y) % m)).collect()
}

pub fn naive_difference(m: usize, a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> BTreeSet<usize> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x + m - y) % m)).collect()
}

/// All `g` with `C + g = C`.
pub fn naive_stabilizer(m: usize, c: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..m)
        .filter(|g| c.iter().map(|x| (x + g) % m).collect::<BTreeSet<_>>() == *c)
        .collect()
}

pub fn naive_is_ap(m: usize, c: &BTreeSet<usize>) -> bool {
    if c.len() == 1 {
        return true;
    }
    c.iter().any(|&a| (1..m).any(|d| (0..c.len()).map(|i| (a + i * d) % m).collect::<BTreeSet<_>>() == *c))
}

/// Quasi-periodic with respect to some subgroup `H` of order `h > 1`:
/// the full `H`-cosets inside `C` are `C′` and the rest lies in one coset.
/// `H = Z_m` only counts when `C = Z_m`.
pub fn naive_is_quasi_periodic(m: usize, c: &BTreeSet<usize>) -> bool {
    (2..=m).filter(|h| m.is_multiple_of(*h)).any(|h| {
        let step = m / h;
        let coset = |x: usize| (0..h).map(|i| (x + i * step) % m).collect::<BTreeSet<_>>();
        let rest: BTreeSet<usize> = c.iter().copied().filter(|&x| !coset(x).is_subset(c)).collect();
        if h == m {
            return rest.is_empty();
        }
        rest.iter().map(|&x| x % step).collect::<BTreeSet<_>>().len() <= 1
    })
}

pub fn arc(j: &SymbolSet, u: usize, v: usize) -> bool {
    let m = j.order();
    j.contains((v + m - u) % m)
}

pub fn naive_c3_free(j: &SymbolSet, labels: &[usize]) -> bool {
    let m = j.order();
    for u in 0..m {
        for v in 0..m {
            for w in 0..m {
                let rainbow = labels[u] != labels[v] && labels[v] != labels[w] && labels[u] != labels[w];
                if rainbow && arc(j, u, v) && arc(j, v, w) && arc(j, w, u) {
                    return false;
                }
            }
        }
    }
    true
}

/// Kahn's algorithm on the external-arc digraph.
pub fn naive_acyclic(j: &SymbolSet, labels: &[usize]) -> bool {
    let m = j.order();
    let ext = |u: usize, v: usize| labels[u] != labels[v] && arc(j, u, v);
    let mut indeg: Vec<usize> = (0..m).map(|v| (0..m).filter(|&u| ext(u, v)).count()).collect();
    let mut queue: Vec<usize> = (0..m).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for (v, d) in indeg.iter_mut().enumerate() {
            if ext(u, v) {
                *d -= 1;
                if *d == 0 {
                    queue.push(v);
                }
            }
        }
    }
    removed == m
}

/// Every restricted growth string of length `n`.
pub fn all_label_strings(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            cur.push(c);
            rec(cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}

pub fn class_count(labels: &[usize]) -> usize {
    labels.iter().max().map_or(0, |m| m + 1)
}

pub fn singular_count(labels: &[usize]) -> usize {
    (0..class_count(labels))
        .filter(|&c| labels.iter().filter(|&&l| l == c).count() == 1)
        .count()
}

/// Zero-pruning disconnection: best class count and its partitions, in
/// label-string order.
pub fn brute_disconnection(j: &SymbolSet, acyclic: bool, strings: &[Vec<usize>]) -> (usize, Vec<Vec<usize>>) {
    let valid: Vec<&Vec<usize>> = strings
        .iter()
        .filter(|l| if acyclic { naive_acyclic(j, l) } else { naive_c3_free(j, l) })
        .collect();
    let best = valid.iter().map(|l| class_count(l)).max().unwrap();
    let optimal = valid.into_iter().filter(|l| class_count(l) == best).cloned().collect();
    (best, optimal)
}

/// The lexicographic product `C(J)[C(K)]` from its definition: vertex
/// `d + |J|·f` is copy `d`, position `f`.
pub fn naive_product_arc(outer: &SymbolSet, inner: &SymbolSet, x: usize, y: usize) -> bool {
    let a = outer.order();
    let (dx, fx) = (x % a, x / a);
    let (dy, fy) = (y % a, y / a);
    if dx != dy {
        arc(outer, dx, dy)
    } else {
        arc(inner, fx, fy)
    }
}

pub fn tournament(s: &str) -> CirculantTournament {
    CirculantTournament::new(s.parse().unwrap())
}

pub fn partition(labels: &[usize]) -> VertexPartition {
    VertexPartition::from_labels(labels).unwrap()
}
