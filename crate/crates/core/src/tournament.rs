//! Circulant tournaments, their directed triangles, and vertex partitions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::zmod::{bits_iter, mask, parse_modulus_and_residues, rotate, ResidueSet, ZmodError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TournamentError {
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error("symbol set order must be odd and at least 3, got {0}")]
    BadOrder(usize),
    #[error("0 must not belong to a symbol set")]
    ContainsZero,
    #[error("symbol set mod {order} must have {expected} elements, found {found}")]
    WrongSize {
        order: usize,
        expected: usize,
        found: usize,
    },
    #[error("exactly one of {j} and {neg} must belong to the symbol set")]
    PairViolation { j: usize, neg: usize },
    #[error("multiplier {factor} is not a unit mod {order}")]
    NotAUnit { factor: usize, order: usize },
    #[error("malformed partition: {0}")]
    MalformedPartition(String),
    #[error("partition covers {found} vertices but the tournament has {expected}")]
    PartitionOrderMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, TournamentError>;

/// A dominance pattern `J ⊆ Z_{2n+1} \ {0}` holding exactly one of `j, -j`
/// for every nonzero `j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolSet {
    set: ResidueSet,
}

impl SymbolSet {
    pub fn new(set: ResidueSet) -> Result<Self> {
        let m = set.modulus();
        if m < 3 || m.is_multiple_of(2) {
            return Err(TournamentError::BadOrder(m));
        }
        if set.contains(0) {
            return Err(TournamentError::ContainsZero);
        }
        if set.len() != m / 2 {
            return Err(TournamentError::WrongSize {
                order: m,
                expected: m / 2,
                found: set.len(),
            });
        }
        for j in 1..=m / 2 {
            if set.contains(j) == set.contains(m - j) {
                return Err(TournamentError::PairViolation { j, neg: m - j });
            }
        }
        Ok(SymbolSet { set })
    }

    pub fn from_residues<I: IntoIterator<Item = usize>>(order: usize, residues: I) -> Result<Self> {
        SymbolSet::new(ResidueSet::from_residues(order, residues)?)
    }

    #[inline]
    pub(crate) fn from_valid_bits(order: usize, bits: u128) -> Self {
        let s = SymbolSet {
            set: ResidueSet::from_bits(order, bits),
        };
        debug_assert!(SymbolSet::new(s.set).is_ok());
        s
    }

    /// The cyclic tournament's symbol set `[1, n]` mod `2n+1`.
    pub fn cyclic(half_size: usize) -> Result<Self> {
        let order = 2 * half_size + 1;
        SymbolSet::new(ResidueSet::from_residues(order, 1..=half_size)?)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.set.modulus()
    }

    #[inline]
    pub fn half_size(&self) -> usize {
        self.set.modulus() / 2
    }

    #[inline]
    pub fn residues(&self) -> &ResidueSet {
        &self.set
    }

    pub fn contains(&self, residue: usize) -> bool {
        self.set.contains(residue)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.set.iter()
    }

    /// Image under the multiplier map `x ↦ a·x`.
    pub fn multiply(&self, factor: usize) -> Result<SymbolSet> {
        let order = self.order();
        if gcd(factor % order, order) != 1 {
            return Err(TournamentError::NotAUnit { factor, order });
        }
        Ok(SymbolSet {
            set: self.set.dilate(factor),
        })
    }

    /// `2n+1:j1,...,jn`.
    pub fn to_plain_string(&self) -> String {
        let members: Vec<String> = self.iter().map(|j| j.to_string()).collect();
        format!("{}:{}", self.order(), members.join(","))
    }
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.set, f)
    }
}

impl fmt::Debug for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.set, f)
    }
}

/// Accepts both `9:1,3,4,7` and `9:{1,3,4,7}`.
impl FromStr for SymbolSet {
    type Err = TournamentError;

    fn from_str(s: &str) -> Result<Self> {
        let (order, residues) = parse_modulus_and_residues(s)?;
        SymbolSet::from_residues(order, residues)
    }
}

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `2^n` symbol sets mod `2n+1`, in lexicographic order of the choice
/// vector `(c_1, …, c_n)`, where `c_j = 0` picks `j` and `c_j = 1` picks `-j`.
pub fn enumerate_symbol_sets(half_size: usize) -> SymbolSets {
    assert!(
        (1..=63).contains(&half_size),
        "half size must lie in 1..=63, got {half_size}"
    );
    SymbolSets {
        half_size,
        next: 0,
        end: 1u64 << half_size,
    }
}

#[derive(Clone, Debug)]
pub struct SymbolSets {
    half_size: usize,
    next: u64,
    end: u64,
}

impl Iterator for SymbolSets {
    type Item = SymbolSet;

    fn next(&mut self) -> Option<SymbolSet> {
        if self.next >= self.end {
            return None;
        }
        let choice = self.next;
        self.next += 1;
        let n = self.half_size;
        let order = 2 * n + 1;
        let bits = (1..=n).fold(0u128, |acc, j| {
            // c_1 is the most significant bit of the choice vector.
            let pick_negative = choice >> (n - j) & 1 == 1;
            acc | 1u128 << if pick_negative { order - j } else { j }
        });
        Some(SymbolSet::from_valid_bits(order, bits))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SymbolSets {}

/// `C_{2n+1}(J)`: vertices `Z_{2n+1}`, arc `i → j` iff `j - i ∈ J`.
///
/// Neighbourhoods are rotations of the symbol-set bit vector; no adjacency
/// matrix is stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CirculantTournament {
    symbol: SymbolSet,
    in_bits: u128,
}

impl CirculantTournament {
    pub fn new(symbol: SymbolSet) -> Self {
        CirculantTournament {
            symbol,
            in_bits: symbol.residues().negate().bits(),
        }
    }

    pub fn cyclic(half_size: usize) -> Result<Self> {
        Ok(CirculantTournament::new(SymbolSet::cyclic(half_size)?))
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.symbol.order()
    }

    #[inline]
    pub fn symbol(&self) -> &SymbolSet {
        &self.symbol
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        let n = self.order();
        self.symbol.contains((v + n - u % n) % n)
    }

    #[inline]
    pub(crate) fn out_mask(&self, v: usize) -> u128 {
        rotate(self.symbol.residues().bits(), v, self.order())
    }

    #[inline]
    pub(crate) fn in_mask(&self, v: usize) -> u128 {
        rotate(self.in_bits, v, self.order())
    }

    #[inline]
    pub(crate) fn vertex_mask(&self) -> u128 {
        mask(self.order())
    }

    pub fn out_neighbors(&self, v: usize) -> ResidueSet {
        self.symbol.residues().translate(v)
    }

    pub fn in_neighbors(&self, v: usize) -> ResidueSet {
        ResidueSet::from_bits(self.order(), self.in_mask(v))
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_mask(v).count_ones() as usize
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_mask(v).count_ones() as usize
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.order()).flat_map(move |u| bits_iter(self.out_mask(u)).map(move |v| (u, v)))
    }

    /// Every directed 3-cycle `u → v → w → u` once, with `u` the least vertex.
    pub fn directed_triangles(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let all = self.vertex_mask();
        (0..self.order()).flat_map(move |u| {
            let above = all & !mask(u + 1);
            bits_iter(self.out_mask(u) & above).flat_map(move |v| {
                bits_iter(self.out_mask(v) & self.in_mask(u) & above).map(move |w| (u, v, w))
            })
        })
    }

    /// Every arc lies on a directed triangle.
    pub fn alspach_check(&self) -> bool {
        self.arcs()
            .all(|(u, v)| self.out_mask(v) & self.in_mask(u) != 0)
    }

    fn check_partition(&self, partition: &VertexPartition) -> Result<()> {
        if partition.order() == self.order() {
            Ok(())
        } else {
            Err(TournamentError::PartitionOrderMismatch {
                expected: self.order(),
                found: partition.order(),
            })
        }
    }

    /// Out-neighbours of `v` outside its own class.
    #[inline]
    fn external_out(&self, partition: &VertexPartition, v: usize) -> u128 {
        self.out_mask(v) & !partition.class_bits(partition.class_of(v))
    }

    pub fn external_arcs(&self, partition: &VertexPartition) -> Result<Vec<(usize, usize)>> {
        self.check_partition(partition)?;
        Ok((0..self.order())
            .flat_map(|u| bits_iter(self.external_out(partition, u)).map(move |v| (u, v)))
            .collect())
    }

    /// No directed triangle meets three distinct classes.
    pub fn is_externally_c3_free(&self, partition: &VertexPartition) -> Result<bool> {
        self.check_partition(partition)?;
        let label = |v: usize| partition.class_of(v);
        Ok(self
            .directed_triangles()
            .all(|(u, v, w)| label(u) == label(v) || label(v) == label(w) || label(w) == label(u)))
    }

    /// The external arcs span an acyclic digraph.
    pub fn is_externally_acyclic(&self, partition: &VertexPartition) -> Result<bool> {
        self.check_partition(partition)?;
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.order();
        let mut color = vec![WHITE; n];
        let mut stack: Vec<(usize, u128)> = Vec::with_capacity(n);
        for root in 0..n {
            if color[root] != WHITE {
                continue;
            }
            color[root] = GRAY;
            stack.push((root, self.external_out(partition, root)));
            while let Some((v, pending)) = stack.last_mut() {
                if *pending == 0 {
                    color[*v] = BLACK;
                    stack.pop();
                    continue;
                }
                let w = pending.trailing_zeros() as usize;
                *pending &= *pending - 1;
                match color[w] {
                    GRAY => return Ok(false),
                    WHITE => {
                        color[w] = GRAY;
                        stack.push((w, self.external_out(partition, w)));
                    }
                    _ => {}
                }
            }
        }
        Ok(true)
    }
}

/// A partition of `{0, …, order-1}` into nonempty classes.
///
/// Classes are numbered by their least vertex, so `labels` is the restricted
/// growth string of the partition and equal partitions compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexPartition {
    labels: Vec<u8>,
    classes: Vec<u128>,
}

impl VertexPartition {
    /// Any labelling; classes are renumbered by first occurrence.
    pub fn from_labels(labels: &[usize]) -> Result<Self> {
        if labels.is_empty() || labels.len() > crate::zmod::MAX_MODULUS {
            return Err(TournamentError::MalformedPartition(format!(
                "order must lie in 1..={}, got {}",
                crate::zmod::MAX_MODULUS,
                labels.len()
            )));
        }
        let mut renumber: Vec<(usize, u8)> = Vec::new();
        let mut out = Vec::with_capacity(labels.len());
        let mut classes: Vec<u128> = Vec::new();
        for (v, &l) in labels.iter().enumerate() {
            let c = match renumber.iter().find(|(old, _)| *old == l) {
                Some(&(_, c)) => c,
                None => {
                    let c = renumber.len() as u8;
                    renumber.push((l, c));
                    classes.push(0);
                    c
                }
            };
            classes[c as usize] |= 1u128 << v;
            out.push(c);
        }
        Ok(VertexPartition {
            labels: out,
            classes,
        })
    }

    /// Validates disjointness, coverage and nonemptiness.
    pub fn from_classes(order: usize, classes: &[Vec<usize>]) -> Result<Self> {
        let bad = |msg: String| Err(TournamentError::MalformedPartition(msg));
        if order == 0 || order > crate::zmod::MAX_MODULUS {
            return bad(format!("order must lie in 1..={}", crate::zmod::MAX_MODULUS));
        }
        let mut labels = vec![usize::MAX; order];
        for (i, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return bad(format!("class {i} is empty"));
            }
            for &v in class {
                if v >= order {
                    return bad(format!("vertex {v} out of range for order {order}"));
                }
                if labels[v] != usize::MAX {
                    return bad(format!("vertex {v} appears in two classes"));
                }
                labels[v] = i;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return bad(format!("vertex {v} is not covered"));
        }
        VertexPartition::from_labels(&labels)
    }

    /// Labels must already be a restricted growth string.
    pub(crate) fn from_canonical(labels: &[u8], classes: &[u128]) -> Self {
        debug_assert!(labels.first() == Some(&0));
        VertexPartition {
            labels: labels.to_vec(),
            classes: classes.to_vec(),
        }
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    #[inline]
    pub fn class_of(&self, v: usize) -> usize {
        self.labels[v] as usize
    }

    #[inline]
    pub(crate) fn class_bits(&self, class: usize) -> u128 {
        self.classes[class]
    }

    pub fn class(&self, class: usize) -> ResidueSet {
        ResidueSet::from_bits(self.order(), self.classes[class])
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        self.classes.iter().map(|&c| bits_iter(c).collect()).collect()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.labels.iter().map(|&l| l as usize).collect()
    }

    /// Number of singleton classes.
    pub fn singular_count(&self) -> usize {
        self.classes.iter().filter(|c| c.count_ones() == 1).count()
    }
}

impl fmt::Display for VertexPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, class) in self.classes().iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            f.write_str("{")?;
            for (k, v) in class.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VertexPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `{0}|{1,2,4,5,7,8}|{3,6}`; the order is the number of vertices listed.
impl FromStr for VertexPartition {
    type Err = TournamentError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || TournamentError::MalformedPartition(format!("cannot parse {s:?}"));
        let mut classes = Vec::new();
        for part in s.trim().split('|') {
            let body = part
                .trim()
                .strip_prefix('{')
                .and_then(|p| p.strip_suffix('}'))
                .ok_or_else(bad)?;
            let class = body
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            classes.push(class);
        }
        let order = classes.iter().map(Vec::len).sum();
        VertexPartition::from_classes(order, &classes)
    }
}
