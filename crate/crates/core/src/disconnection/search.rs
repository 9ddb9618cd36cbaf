//! Pruned enumeration of vertex partitions.
//!
//! Vertices are assigned in index order and classes are numbered by first
//! occurrence, so every partition is visited exactly once as a restricted
//! growth string. Vertex 0 therefore always sits in class 0. A partial
//! assignment is cut as soon as the assigned vertices violate the variant's
//! predicate; both predicates are monotone under extension.

use std::ops::ControlFlow;

use crate::tournament::{CirculantTournament, VertexPartition};
use crate::zmod::bits_iter;

use super::Variant;

pub(crate) struct Engine {
    variant: Variant,
    n: usize,
    out: Vec<u128>,
    inn: Vec<u128>,
    labels: Vec<u8>,
    classes: Vec<u128>,
    assigned: u128,
    pub(crate) nodes: u64,
}

impl Engine {
    pub(crate) fn new(t: &CirculantTournament, variant: Variant) -> Self {
        let n = t.order();
        Engine {
            variant,
            n,
            out: (0..n).map(|v| t.out_mask(v)).collect(),
            inn: (0..n).map(|v| t.in_mask(v)).collect(),
            labels: vec![0; n],
            classes: Vec::with_capacity(n),
            assigned: 0,
            nodes: 0,
        }
    }

    /// Can `v` join class `c` (`c == classes.len()` opens a new class)?
    /// Only structures through `v` are examined; the assigned prefix is
    /// already known to be valid.
    #[inline]
    fn admissible(&self, v: usize, c: usize) -> bool {
        let own = self.classes.get(c).copied().unwrap_or(0);
        let heads = self.out[v] & self.assigned & !own;
        let tails = self.inn[v] & self.assigned & !own;
        if heads == 0 || tails == 0 {
            return true;
        }
        match self.variant {
            Variant::TriangleFree => {
                // v → x → y → v with x, y outside c and in different classes.
                bits_iter(heads).all(|x| {
                    let x_class = self.classes[self.labels[x] as usize];
                    self.out[x] & tails & !x_class == 0
                })
            }
            Variant::Acyclic => {
                // A new external cycle leaves v into `heads`, walks external
                // arcs among assigned vertices, and re-enters v from `tails`.
                let mut reached = heads;
                let mut frontier = heads;
                while frontier != 0 {
                    if reached & tails != 0 {
                        return false;
                    }
                    let next = bits_iter(frontier).fold(0u128, |acc, u| {
                        acc | self.out[u] & self.assigned & !self.classes[self.labels[u] as usize]
                    });
                    frontier = next & !reached;
                    reached |= next;
                }
                reached & tails == 0
            }
        }
    }

    #[inline]
    fn assign(&mut self, v: usize, c: usize) {
        if c == self.classes.len() {
            self.classes.push(0);
        }
        self.classes[c] |= 1u128 << v;
        self.labels[v] = c as u8;
        self.assigned |= 1u128 << v;
    }

    #[inline]
    fn unassign(&mut self, v: usize, c: usize) {
        self.classes[c] &= !(1u128 << v);
        self.assigned &= !(1u128 << v);
        if self.classes[c] == 0 {
            debug_assert_eq!(c + 1, self.classes.len());
            self.classes.pop();
        }
    }

    /// Largest class count over all valid partitions.
    pub(crate) fn maximize(&mut self) -> usize {
        let mut best = 0;
        self.maximize_from(0, &mut best);
        best
    }

    fn maximize_from(&mut self, v: usize, best: &mut usize) {
        self.nodes += 1;
        let used = self.classes.len();
        if v == self.n {
            *best = (*best).max(used);
            return;
        }
        // Each remaining vertex opens at most one class.
        if used + (self.n - v) <= *best {
            return;
        }
        // New class first, so large partitions become incumbents early.
        for c in (0..=used).rev() {
            if self.admissible(v, c) {
                self.assign(v, c);
                self.maximize_from(v + 1, best);
                self.unassign(v, c);
            }
        }
    }

    /// Visits every valid partition with exactly `k` classes, in
    /// lexicographic order of the label string.
    pub(crate) fn for_each_with_classes<F>(&mut self, k: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&VertexPartition) -> ControlFlow<()>,
    {
        if k == 0 || k > self.n {
            return ControlFlow::Continue(());
        }
        self.enumerate_from(0, k, visit)
    }

    fn enumerate_from<F>(&mut self, v: usize, k: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&VertexPartition) -> ControlFlow<()>,
    {
        self.nodes += 1;
        let used = self.classes.len();
        if v == self.n {
            if used == k {
                return visit(&VertexPartition::from_canonical(&self.labels, &self.classes));
            }
            return ControlFlow::Continue(());
        }
        if used + (self.n - v) < k {
            return ControlFlow::Continue(());
        }
        for c in 0..=used.min(k - 1) {
            if self.admissible(v, c) {
                self.assign(v, c);
                let flow = self.enumerate_from(v + 1, k, visit);
                self.unassign(v, c);
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    /// Does some valid partition have exactly `k` classes?
    pub(crate) fn exists_with_classes(&mut self, k: usize) -> Option<VertexPartition> {
        let mut found = None;
        let _ = self.for_each_with_classes(k, &mut |p: &VertexPartition| {
            found = Some(p.clone());
            ControlFlow::Break(())
        });
        found
    }
}
