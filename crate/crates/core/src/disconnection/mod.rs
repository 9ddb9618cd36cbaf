//! Exact acyclic disconnection ω and C3-free disconnection ω₃.
//!
//! ω₃(T) is the largest number of classes in a partition of V(T) in which
//! no directed triangle meets three classes; ω(T) is the largest number of
//! classes such that the arcs between classes form an acyclic digraph.

mod search;

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::time::Instant;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::tournament::{CirculantTournament, SymbolSet, TournamentError, VertexPartition};
use crate::zmod::{ResidueSet, ZmodError};

use search::Engine;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("order {order} exceeds the configured {what} bound {bound} (raise it and acknowledge slow searches)")]
    OrderAboveBound {
        order: usize,
        bound: usize,
        what: &'static str,
    },
    #[error("{what} bound {bound} exceeds the default {default}; set allow_slow to acknowledge")]
    SlowNotAcknowledged {
        what: &'static str,
        bound: usize,
        default: usize,
    },
    #[error("lemma identities need a 3-class partition, got {0} classes")]
    NotThreeClasses(usize),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
}

pub type Result<T> = std::result::Result<T, SearchError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// ω: external arcs acyclic.
    Acyclic,
    /// ω₃: no rainbow directed triangle.
    TriangleFree,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Acyclic => "acyclic",
            Variant::TriangleFree => "triangle_free",
        }
    }

    /// The variant's predicate, evaluated from scratch.
    pub fn holds(self, t: &CirculantTournament, partition: &VertexPartition) -> Result<bool> {
        Ok(match self {
            Variant::Acyclic => t.is_externally_acyclic(partition)?,
            Variant::TriangleFree => t.is_externally_c3_free(partition)?,
        })
    }
}

/// Order bounds for the exact searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    /// ω₃ value plus optimal-partition report.
    pub omega3_max_order: usize,
    /// ω value plus optimal-partition report.
    pub omega_max_order: usize,
    /// Full enumeration of optimal partitions and keenness.
    pub enumeration_max_order: usize,
    /// Decision search for ω₃ = 2.
    pub tight_max_order: usize,
    /// Optimal partitions kept in a report; counts stay exact beyond it.
    pub max_stored_partitions: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            omega3_max_order: 13,
            omega_max_order: 13,
            enumeration_max_order: 13,
            tight_max_order: 21,
            max_stored_partitions: 10_000,
        }
    }
}

impl SearchLimits {
    /// Rejects bounds above the defaults unless `allow_slow` is set.
    pub fn validate(&self, allow_slow: bool) -> Result<()> {
        if allow_slow {
            return Ok(());
        }
        let d = SearchLimits::default();
        for (what, bound, default) in [
            ("omega3", self.omega3_max_order, d.omega3_max_order),
            ("omega", self.omega_max_order, d.omega_max_order),
            ("enumeration", self.enumeration_max_order, d.enumeration_max_order),
            ("tight", self.tight_max_order, d.tight_max_order),
        ] {
            if bound > default {
                return Err(SearchError::SlowNotAcknowledged {
                    what,
                    bound,
                    default,
                });
            }
        }
        Ok(())
    }

    /// Every order bound raised to at least `order`.
    pub fn covering(order: usize) -> Self {
        let d = SearchLimits::default();
        SearchLimits {
            omega3_max_order: d.omega3_max_order.max(order),
            omega_max_order: d.omega_max_order.max(order),
            enumeration_max_order: d.enumeration_max_order.max(order),
            tight_max_order: d.tight_max_order.max(order),
            ..d
        }
    }

    fn value_bound(&self, variant: Variant) -> (usize, &'static str) {
        match variant {
            Variant::Acyclic => (self.omega_max_order, "omega"),
            Variant::TriangleFree => (self.omega3_max_order, "omega3"),
        }
    }
}

fn check_bound(order: usize, bound: usize, what: &'static str) -> Result<()> {
    if order > bound {
        Err(SearchError::OrderAboveBound { order, bound, what })
    } else {
        Ok(())
    }
}

fn partitions_as_text<S: Serializer>(parts: &[VertexPartition], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(parts.iter().map(|p| p.to_string()))
}

fn symbol_as_text<S: Serializer>(symbol: &SymbolSet, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(symbol)
}

/// Value of ω or ω₃ with its optimal partitions.
#[derive(Clone, Debug, Serialize)]
pub struct DisconnectionReport {
    pub variant: Variant,
    #[serde(serialize_with = "symbol_as_text")]
    pub symbol: SymbolSet,
    pub value: usize,
    pub partition_count: u64,
    /// Canonically ordered; holds at most `max_stored_partitions`.
    #[serde(serialize_with = "partitions_as_text")]
    pub optimal_partitions: Vec<VertexPartition>,
    pub truncated: bool,
    /// Number of singleton classes ↦ number of optimal partitions.
    pub singular_histogram: BTreeMap<usize, u64>,
    pub elapsed_seconds: f64,
    /// Search-tree nodes, value search plus enumeration.
    pub nodes: u64,
}

impl DisconnectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Exact ω or ω₃ by branch and bound.
pub fn value(t: &CirculantTournament, variant: Variant, limits: &SearchLimits) -> Result<(usize, u64)> {
    let (bound, what) = limits.value_bound(variant);
    check_bound(t.order(), bound, what)?;
    let mut engine = Engine::new(t, variant);
    let v = engine.maximize();
    Ok((v, engine.nodes))
}

/// Value plus the enumeration of optimal partitions.
pub fn disconnection(t: &CirculantTournament, variant: Variant, limits: &SearchLimits) -> Result<DisconnectionReport> {
    let start = Instant::now();
    let (value, value_nodes) = value(t, variant, limits)?;
    let mut engine = Engine::new(t, variant);
    let mut partitions = Vec::new();
    let mut count = 0u64;
    let mut histogram = BTreeMap::new();
    let cap = limits.max_stored_partitions;
    let _ = engine.for_each_with_classes(value, &mut |p: &VertexPartition| {
        count += 1;
        *histogram.entry(p.singular_count()).or_insert(0) += 1;
        if partitions.len() < cap {
            partitions.push(p.clone());
        }
        ControlFlow::Continue(())
    });
    Ok(DisconnectionReport {
        variant,
        symbol: *t.symbol(),
        value,
        partition_count: count,
        truncated: count > partitions.len() as u64,
        optimal_partitions: partitions,
        singular_histogram: histogram,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        nodes: value_nodes + engine.nodes,
    })
}

pub fn omega3(t: &CirculantTournament, limits: &SearchLimits) -> Result<DisconnectionReport> {
    disconnection(t, Variant::TriangleFree, limits)
}

pub fn omega(t: &CirculantTournament, limits: &SearchLimits) -> Result<DisconnectionReport> {
    disconnection(t, Variant::Acyclic, limits)
}

/// Some externally C3-free partition with exactly three classes, if any.
/// Merging classes keeps a partition C3-free, so none exists iff ω₃ = 2.
pub fn three_class_witness(t: &CirculantTournament, limits: &SearchLimits) -> Result<Option<VertexPartition>> {
    check_bound(t.order(), limits.tight_max_order, "tight")?;
    let mut engine = Engine::new(t, Variant::TriangleFree);
    Ok(engine.exists_with_classes(3))
}

/// `ω₃(T) = 2`.
pub fn is_tight(t: &CirculantTournament, limits: &SearchLimits) -> Result<bool> {
    Ok(three_class_witness(t, limits)?.is_none())
}

/// Every optimal partition, canonically ordered.
pub fn enumerate_optimal_partitions(
    t: &CirculantTournament,
    variant: Variant,
    limits: &SearchLimits,
) -> Result<Vec<VertexPartition>> {
    let mut out = Vec::new();
    for_each_optimal_partition(t, variant, limits, |p| out.push(p.clone()))?;
    Ok(out)
}

/// Streams the optimal partitions; returns the optimal value.
pub fn for_each_optimal_partition<F>(
    t: &CirculantTournament,
    variant: Variant,
    limits: &SearchLimits,
    mut visit: F,
) -> Result<usize>
where
    F: FnMut(&VertexPartition),
{
    check_bound(t.order(), limits.enumeration_max_order, "enumeration")?;
    let (value, _) = value(t, variant, &SearchLimits::covering(t.order()))?;
    let mut engine = Engine::new(t, variant);
    let _ = engine.for_each_with_classes(value, &mut |p: &VertexPartition| {
        visit(p);
        ControlFlow::Continue(())
    });
    Ok(value)
}

#[derive(Clone, Debug, Serialize)]
pub struct KeennessReport {
    pub variant: Variant,
    pub value: usize,
    pub optimal_count: u64,
    pub singular_histogram: BTreeMap<usize, u64>,
    /// Some optimal partition has exactly one singleton class.
    pub has_optimal_with_one_singular: bool,
    /// A valid partition (any class count) with two or more singleton
    /// classes, if one exists.
    #[serde(serialize_with = "optional_partition_as_text")]
    pub two_singular_witness: Option<VertexPartition>,
    /// Every optimal partition has exactly one singleton class.
    pub every_optimal_has_one_singular: bool,
}

fn optional_partition_as_text<S: Serializer>(
    p: &Option<VertexPartition>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match p {
        Some(p) => s.collect_str(p),
        None => s.serialize_none(),
    }
}

impl KeennessReport {
    /// Keen: an optimal partition with exactly one singleton class exists
    /// and no valid partition has more than one.
    pub fn is_keen(&self) -> bool {
        self.has_optimal_with_one_singular && self.two_singular_witness.is_none()
    }
}

/// Full keenness analysis for one variant.
///
/// Merging classes never breaks either predicate, so a valid partition
/// with singleton classes `{u}` and `{v}` exists iff `{u}|{v}|rest` is
/// valid; those `C(n,2)` partitions are checked directly.
pub fn keenness_check(t: &CirculantTournament, variant: Variant, limits: &SearchLimits) -> Result<KeennessReport> {
    let mut histogram = BTreeMap::new();
    let mut count = 0u64;
    let value = for_each_optimal_partition(t, variant, limits, |p| {
        count += 1;
        *histogram.entry(p.singular_count()).or_insert(0u64) += 1;
    })?;
    let n = t.order();
    let mut two_singular_witness = None;
    'outer: for u in 0..n {
        for v in u + 1..n {
            let labels: Vec<usize> = (0..n)
                .map(|x| if x == u { 0 } else if x == v { 1 } else { 2 })
                .collect();
            let p = VertexPartition::from_labels(&labels)?;
            if variant.holds(t, &p)? {
                two_singular_witness = Some(p);
                break 'outer;
            }
        }
    }
    Ok(KeennessReport {
        variant,
        value,
        optimal_count: count,
        has_optimal_with_one_singular: histogram.get(&1).copied().unwrap_or(0) > 0,
        every_optimal_has_one_singular: count > 0 && histogram.get(&1).copied().unwrap_or(0) == count,
        singular_histogram: histogram,
        two_singular_witness,
    })
}

/// Truth values of the three additive identities for `π = A|B|C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaIdentities {
    /// `(((((A+J)∩B)+J)∩C)+J)∩A = ∅`.
    pub abcj: bool,
    /// `(C∩(A−J))−J = (C−J)∩(A−J−J)`.
    pub aux: bool,
    /// `(A+J)∩B∩(C−J) ⊆ complement(A−J−J)`.
    pub ajj: bool,
    /// `(C∩(A−J))−J ⊆ (C−J)∩(A−J−J)`, the half of `aux` that always holds.
    pub aux_inclusion: bool,
}

/// Evaluates the identities with `A`, `B`, `C` the classes of `π` in
/// canonical order.
pub fn lemma_identity_check(symbol: &SymbolSet, partition: &VertexPartition) -> Result<LemmaIdentities> {
    if partition.class_count() != 3 {
        return Err(SearchError::NotThreeClasses(partition.class_count()));
    }
    if partition.order() != symbol.order() {
        return Err(TournamentError::PartitionOrderMismatch {
            expected: symbol.order(),
            found: partition.order(),
        }
        .into());
    }
    lemma_identities(symbol, &partition.class(0), &partition.class(1), &partition.class(2))
}

/// As [`lemma_identity_check`] with the roles of the classes given explicitly.
pub fn lemma_identities(
    symbol: &SymbolSet,
    a: &ResidueSet,
    b: &ResidueSet,
    c: &ResidueSet,
) -> Result<LemmaIdentities> {
    let j = symbol.residues();
    let all = a.union(b)?.union(c)?;
    if a.is_empty() || b.is_empty() || c.is_empty() || !all.is_full() || a.len() + b.len() + c.len() != all.len() {
        return Err(TournamentError::MalformedPartition(format!("{a} | {b} | {c} is not a 3-class partition")).into());
    }
    let chain = a.sumset(j)?.intersection(b)?;
    let chain = chain.sumset(j)?.intersection(c)?;
    let chain = chain.sumset(j)?.intersection(a)?;
    let a_minus_j = a.difference(j)?;
    let a_minus_jj = a_minus_j.difference(j)?;
    let lhs = c.intersection(&a_minus_j)?.difference(j)?;
    let rhs = c.difference(j)?.intersection(&a_minus_jj)?;
    let triple = a.sumset(j)?.intersection(b)?.intersection(&c.difference(j)?)?;
    Ok(LemmaIdentities {
        abcj: chain.is_empty(),
        aux: lhs == rhs,
        ajj: triple.is_subset(&a_minus_jj.complement())?,
        aux_inclusion: lhs.is_subset(&rhs)?,
    })
}
