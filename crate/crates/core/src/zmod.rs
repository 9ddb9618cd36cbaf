//! Set algebra over the cyclic group Z_m.
//!
//! A [`ResidueSet`] is a subset of `{0, …, m-1}` stored as a single `u128`
//! bit vector (bit `r` set iff residue `r` is a member), so every set
//! operation below is a handful of word operations. Moduli up to
//! [`MAX_MODULUS`] are supported.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Largest modulus representable by a [`ResidueSet`].
pub const MAX_MODULUS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZmodError {
    #[error("modulus must lie in 1..={MAX_MODULUS}, got {0}")]
    BadModulus(usize),
    #[error("residue {residue} out of range for modulus {modulus}")]
    OutOfRange { residue: usize, modulus: usize },
    #[error("duplicate residue {0}")]
    Duplicate(usize),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),
    #[error("operation requires a nonempty set")]
    Empty,
    #[error("order {order} does not divide modulus {modulus}")]
    NotADivisor { order: usize, modulus: usize },
    #[error("cannot parse residue set from {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, ZmodError>;

#[inline]
pub(crate) fn mask(modulus: usize) -> u128 {
    if modulus >= 128 {
        u128::MAX
    } else {
        (1u128 << modulus) - 1
    }
}

/// Cyclic rotation of a bit vector: bit `r` moves to bit `(r + shift) mod m`.
#[inline]
pub(crate) fn rotate(bits: u128, shift: usize, modulus: usize) -> u128 {
    let s = shift % modulus;
    if s == 0 {
        bits
    } else {
        ((bits << s) | (bits >> (modulus - s))) & mask(modulus)
    }
}

/// Bit `r` moves to bit `(m - r) mod m`.
#[inline]
pub(crate) fn reflect(bits: u128, modulus: usize) -> u128 {
    // reverse_bits sends r to 127 - r; the shift brings it to m - 1 - r.
    let rev = bits.reverse_bits() >> (128 - modulus);
    rotate(rev, 1, modulus)
}

pub(crate) struct BitIter(u128);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            let r = self.0.trailing_zeros() as usize;
            self.0 &= self.0 - 1;
            Some(r)
        }
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

pub(crate) fn bits_iter(bits: u128) -> BitIter {
    BitIter(bits)
}

fn check_modulus(modulus: usize) -> Result<()> {
    if modulus == 0 || modulus > MAX_MODULUS {
        Err(ZmodError::BadModulus(modulus))
    } else {
        Ok(())
    }
}

/// A subset of Z_m.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: usize,
    bits: u128,
}

impl ResidueSet {
    pub fn empty(modulus: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ResidueSet { modulus, bits: 0 })
    }

    pub fn full(modulus: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ResidueSet {
            modulus,
            bits: mask(modulus),
        })
    }

    /// `{r mod m}`.
    pub fn singleton(modulus: usize, residue: usize) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(ResidueSet {
            modulus,
            bits: 1u128 << (residue % modulus),
        })
    }

    /// Builds a set from residues in `[0, m)`; repeated residues collapse.
    pub fn from_residues<I: IntoIterator<Item = usize>>(modulus: usize, residues: I) -> Result<Self> {
        check_modulus(modulus)?;
        let mut bits = 0u128;
        for r in residues {
            if r >= modulus {
                return Err(ZmodError::OutOfRange { residue: r, modulus });
            }
            bits |= 1u128 << r;
        }
        Ok(ResidueSet { modulus, bits })
    }

    /// Reduces every integer mod m first.
    pub fn from_integers<I: IntoIterator<Item = i64>>(modulus: usize, values: I) -> Result<Self> {
        check_modulus(modulus)?;
        let m = modulus as i64;
        let bits = values
            .into_iter()
            .fold(0u128, |acc, v| acc | 1u128 << v.rem_euclid(m));
        Ok(ResidueSet { modulus, bits })
    }

    #[inline]
    pub(crate) fn from_bits(modulus: usize, bits: u128) -> Self {
        debug_assert!((1..=MAX_MODULUS).contains(&modulus));
        ResidueSet {
            modulus,
            bits: bits & mask(modulus),
        }
    }

    #[inline]
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn is_full(&self) -> bool {
        self.bits == mask(self.modulus)
    }

    #[inline]
    pub fn contains(&self, residue: usize) -> bool {
        residue < self.modulus && self.bits >> residue & 1 == 1
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        bits_iter(self.bits)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        (self.bits != 0).then(|| self.bits.trailing_zeros() as usize)
    }

    fn same_modulus(&self, other: &ResidueSet) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(ZmodError::ModulusMismatch(self.modulus, other.modulus))
        }
    }

    /// `C + g`.
    #[inline]
    pub fn translate(&self, shift: usize) -> ResidueSet {
        ResidueSet {
            modulus: self.modulus,
            bits: rotate(self.bits, shift, self.modulus),
        }
    }

    /// `A + B = {a + b : a ∈ A, b ∈ B}`.
    pub fn sumset(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        // Rotate the larger operand once per member of the smaller one.
        let (base, shifts) = if self.len() >= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let bits = shifts
            .iter()
            .fold(0u128, |acc, s| acc | rotate(base.bits, s, self.modulus));
        Ok(ResidueSet::from_bits(self.modulus, bits))
    }

    /// `-A`.
    pub fn negate(&self) -> ResidueSet {
        ResidueSet {
            modulus: self.modulus,
            bits: reflect(self.bits, self.modulus),
        }
    }

    /// `cA = {c·a : a ∈ A}`.
    pub fn dilate(&self, factor: usize) -> ResidueSet {
        let m = self.modulus;
        let f = factor % m;
        let bits = self
            .iter()
            .fold(0u128, |acc, a| acc | 1u128 << ((a * f) % m));
        ResidueSet { modulus: m, bits }
    }

    /// `A - B = A + (-B)`.
    pub fn difference(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.sumset(&other.negate())
    }

    /// `Z_m \ A`.
    pub fn complement(&self) -> ResidueSet {
        ResidueSet {
            modulus: self.modulus,
            bits: !self.bits & mask(self.modulus),
        }
    }

    pub fn intersection(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        Ok(ResidueSet::from_bits(self.modulus, self.bits & other.bits))
    }

    pub fn union(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        Ok(ResidueSet::from_bits(self.modulus, self.bits | other.bits))
    }

    /// Set difference `A \ B`.
    pub fn without(&self, other: &ResidueSet) -> Result<ResidueSet> {
        self.same_modulus(other)?;
        Ok(ResidueSet::from_bits(self.modulus, self.bits & !other.bits))
    }

    pub fn is_subset(&self, other: &ResidueSet) -> Result<bool> {
        self.same_modulus(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    pub fn is_disjoint(&self, other: &ResidueSet) -> Result<bool> {
        self.same_modulus(other)?;
        Ok(self.bits & other.bits == 0)
    }

    /// The period `H(C) = {g : C + g = C}`.
    pub fn period(&self) -> Result<Subgroup> {
        if self.is_empty() {
            return Err(ZmodError::Empty);
        }
        // The stabilizer is cyclic, generated by its least positive element,
        // which necessarily divides m.
        let m = self.modulus;
        let generator = (1..m)
            .filter(|g| m.is_multiple_of(*g))
            .find(|&g| self.translate(g) == *self)
            .unwrap_or(m);
        Ok(Subgroup {
            modulus: m,
            order: m / generator,
        })
    }

    pub fn is_aperiodic(&self) -> Result<bool> {
        Ok(self.period()?.is_trivial())
    }

    pub fn is_periodic(&self) -> Result<bool> {
        Ok(!self.is_aperiodic()?)
    }

    /// First quasi-periodic decomposition found when scanning nontrivial
    /// subgroups by decreasing order.
    pub fn quasi_periodic_witness(&self) -> Result<Option<QuasiPeriodicWitness>> {
        if self.is_empty() {
            return Err(ZmodError::Empty);
        }
        Ok(subgroups(self.modulus)
            .into_iter()
            .rev()
            .find_map(|h| self.witness_for(h)))
    }

    /// Every subgroup that witnesses quasi-periodicity, by decreasing order.
    pub fn quasi_periodic_witnesses(&self) -> Result<Vec<QuasiPeriodicWitness>> {
        if self.is_empty() {
            return Err(ZmodError::Empty);
        }
        Ok(subgroups(self.modulus)
            .into_iter()
            .rev()
            .filter_map(|h| self.witness_for(h))
            .collect())
    }

    pub fn is_quasi_periodic(&self) -> Result<bool> {
        Ok(self.quasi_periodic_witness()?.is_some())
    }

    /// Tests one subgroup. C′ collects every H-coset lying inside C; the
    /// rest must sit strictly inside a single coset. With H = Z_m the
    /// second clause would hold for every proper subset, so the whole group
    /// is only accepted when C itself is Z_m.
    fn witness_for(&self, subgroup: Subgroup) -> Option<QuasiPeriodicWitness> {
        if subgroup.is_trivial() {
            return None;
        }
        let m = self.modulus;
        let h_bits = subgroup.members().bits;
        let periodic_bits = (0..subgroup.index())
            .map(|r| rotate(h_bits, r, m))
            .filter(|coset| coset & !self.bits == 0)
            .fold(0u128, |acc, coset| acc | coset);
        let residual_bits = self.bits & !periodic_bits;
        let periodic_part = ResidueSet::from_bits(m, periodic_bits);
        let residual_part = ResidueSet::from_bits(m, residual_bits);
        if residual_bits == 0 {
            if subgroup.order < m || self.is_full() {
                return Some(QuasiPeriodicWitness {
                    subgroup,
                    periodic_part,
                    residual_part,
                    residual_coset_rep: None,
                });
            }
            return None;
        }
        if subgroup.order == m {
            return None;
        }
        let c = residual_part.min()?;
        let coset = rotate(h_bits, c, m);
        // Cosets fully inside C went to C′, so containment is automatically proper.
        (residual_bits & !coset == 0).then_some(QuasiPeriodicWitness {
            subgroup,
            periodic_part,
            residual_part,
            residual_coset_rep: Some(c),
        })
    }

    /// Some `(a, d)` with `A = {a + i·d : 0 ≤ i < |A|}`, taking the smallest
    /// such `d ≠ 0`. Singletons report `(a, 1)`.
    pub fn arithmetic_progression(&self) -> Result<Option<(usize, usize)>> {
        let k = self.len();
        match k {
            0 => return Err(ZmodError::Empty),
            1 => return Ok(Some((self.min().unwrap_or(0), 1))),
            _ => {}
        }
        let m = self.modulus;
        for d in 1..m {
            for a in self.iter() {
                let mut bits = 0u128;
                let mut x = a;
                for _ in 0..k {
                    bits |= 1u128 << x;
                    x = (x + d) % m;
                }
                if bits == self.bits {
                    return Ok(Some((a, d)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_arithmetic_progression(&self) -> Result<bool> {
        Ok(self.arithmetic_progression()?.is_some())
    }

    /// Lexicographic comparison of the ascending member lists.
    pub fn lex_cmp(&self, other: &ResidueSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{{", self.modulus)?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the comma-separated residue list of `m:{r1,r2,...}` or
/// `m:r1,r2,...`, rejecting duplicates and out-of-range values.
pub(crate) fn parse_modulus_and_residues(s: &str) -> Result<(usize, Vec<usize>)> {
    let bad = || ZmodError::Parse(s.to_string());
    let (m, body) = s.trim().split_once(':').ok_or_else(bad)?;
    let modulus: usize = m.trim().parse().map_err(|_| bad())?;
    check_modulus(modulus)?;
    let body = body.trim();
    let body = match body.strip_prefix('{') {
        Some(rest) => rest.strip_suffix('}').ok_or_else(bad)?,
        None => body,
    };
    let mut residues = Vec::new();
    let mut seen = 0u128;
    for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let r: usize = tok.parse().map_err(|_| bad())?;
        if r >= modulus {
            return Err(ZmodError::OutOfRange { residue: r, modulus });
        }
        if seen >> r & 1 == 1 {
            return Err(ZmodError::Duplicate(r));
        }
        seen |= 1u128 << r;
        residues.push(r);
    }
    Ok((modulus, residues))
}

impl FromStr for ResidueSet {
    type Err = ZmodError;

    fn from_str(s: &str) -> Result<Self> {
        let (modulus, residues) = parse_modulus_and_residues(s)?;
        ResidueSet::from_residues(modulus, residues)
    }
}

/// The subgroup of Z_m of a given order `d | m`: `{0, m/d, 2m/d, …}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    modulus: usize,
    order: usize,
}

impl Subgroup {
    pub fn new(modulus: usize, order: usize) -> Result<Self> {
        check_modulus(modulus)?;
        if order == 0 || !modulus.is_multiple_of(order) {
            return Err(ZmodError::NotADivisor { order, modulus });
        }
        Ok(Subgroup { modulus, order })
    }

    pub fn trivial(modulus: usize) -> Result<Self> {
        Subgroup::new(modulus, 1)
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of cosets, which is also the least positive member.
    pub fn index(&self) -> usize {
        self.modulus / self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn contains(&self, residue: usize) -> bool {
        residue < self.modulus && residue.is_multiple_of(self.index())
    }

    pub fn members(&self) -> ResidueSet {
        let step = self.index();
        let bits = (0..self.order).fold(0u128, |acc, i| acc | 1u128 << (i * step));
        ResidueSet::from_bits(self.modulus, bits)
    }

    /// `c + H`.
    pub fn coset(&self, c: usize) -> ResidueSet {
        self.members().translate(c)
    }

    /// All cosets, indexed by representatives `0..index`.
    pub fn cosets(&self) -> impl Iterator<Item = ResidueSet> + '_ {
        (0..self.index()).map(move |r| self.coset(r))
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.members(), f)
    }
}

/// All subgroups of Z_m, one per divisor, by ascending order.
pub fn subgroups(modulus: usize) -> Vec<Subgroup> {
    (1..=modulus)
        .filter(|d| modulus.is_multiple_of(*d))
        .map(|order| Subgroup { modulus, order })
        .collect()
}

/// `C = C′ ∪ C″` with C′ a union of H-cosets and C″ strictly inside one coset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiPeriodicWitness {
    pub subgroup: Subgroup,
    pub periodic_part: ResidueSet,
    pub residual_part: ResidueSet,
    /// Least element of C″ when C″ is nonempty.
    pub residual_coset_rep: Option<usize>,
}

impl QuasiPeriodicWitness {
    /// Checks the three defining conditions from scratch.
    pub fn is_valid_for(&self, set: &ResidueSet) -> bool {
        let h = self.subgroup.members();
        let Ok(sum) = self.periodic_part.sumset(&h) else {
            return false;
        };
        let periodic_ok = self.periodic_part.is_empty() || sum == self.periodic_part;
        let split_ok = self.periodic_part.bits & self.residual_part.bits == 0
            && (self.periodic_part.bits | self.residual_part.bits) == set.bits;
        let residual_ok = match self.residual_coset_rep {
            None => self.residual_part.is_empty(),
            Some(c) => {
                let coset = self.subgroup.coset(c);
                self.residual_part.contains(c)
                    && self.residual_part.bits & !coset.bits == 0
                    && self.residual_part != coset
            }
        };
        !self.subgroup.is_trivial() && periodic_ok && split_ok && residual_ok
    }
}

/// Outcome of checking Kneser's inequalities on one pair `(A, B)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KneserRecord {
    pub sum_size: usize,
    pub period_order: usize,
    pub a_plus_h: usize,
    pub b_plus_h: usize,
    /// `|A+B| ≥ |A+H| + |B+H| − |H| ≥ |A| + |B| − |H|`.
    pub bound_holds: bool,
    /// `|A+B| ≤ |A| + |B| − 2` implies `A+B` periodic.
    pub periodicity_clause_holds: bool,
}

pub fn kneser_check(a: &ResidueSet, b: &ResidueSet) -> Result<KneserRecord> {
    if a.is_empty() || b.is_empty() {
        return Err(ZmodError::Empty);
    }
    let sum = a.sumset(b)?;
    let h = sum.period()?;
    let hm = h.members();
    let a_plus_h = a.sumset(&hm)?.len();
    let b_plus_h = b.sumset(&hm)?.len();
    let (s, ho) = (sum.len() as i64, h.order() as i64);
    let middle = a_plus_h as i64 + b_plus_h as i64 - ho;
    let bound_holds = s >= middle && middle >= a.len() as i64 + b.len() as i64 - ho;
    let small = s <= a.len() as i64 + b.len() as i64 - 2;
    Ok(KneserRecord {
        sum_size: sum.len(),
        period_order: h.order(),
        a_plus_h,
        b_plus_h,
        bound_holds,
        periodicity_clause_holds: !small || !h.is_trivial(),
    })
}
