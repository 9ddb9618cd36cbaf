//! Lexicographic composition of circulant tournaments and its inverse.
//!
//! `C_{2m+1}(J)[C_{2n+1}(K)]` is circulant of order `(2m+1)(2n+1)` with
//! symbol set `L = (2m+1)K ∪ (J + (2m+1)[1, 2n+1])`. The copies of the inner
//! factor sit on the cosets of `H = (2m+1)Z`, which is how [`decompose`]
//! recovers `J` and `K` from a quasi-periodic witness of `L`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::tournament::{CirculantTournament, SymbolSet, TournamentError};
use crate::zmod::{bits_iter, ResidueSet, Subgroup, ZmodError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompositionError {
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error("order {product} is not {outer} x {inner}")]
    IncompatibleModuli {
        outer: usize,
        inner: usize,
        product: usize,
    },
    #[error("quasi-periodic witness of {symbol} has residual part outside its subgroup")]
    ResidualOutsideSubgroup { symbol: String },
    #[error("inconsistent decomposition of {symbol}: {detail}")]
    Inconsistent { symbol: String, detail: String },
    #[error("cannot parse factorization from {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CompositionError>;

/// Symbol set of `C(J)[C(K)]`.
pub fn compose(outer: &SymbolSet, inner: &SymbolSet) -> Result<SymbolSet> {
    let a = outer.order();
    let b = inner.order();
    let order = a * b;
    let lifted = outer
        .iter()
        .flat_map(|j| (0..b).map(move |i| j + a * i))
        .chain(inner.iter().map(|k| a * k));
    let set = ResidueSet::from_residues(order, lifted)?;
    debug_assert_eq!(set.len(), outer.half_size() * b + inner.half_size());
    Ok(SymbolSet::new(set)?)
}

/// Compares `C(L)` with the lexicographic product `C(J)[C(K)]` arc by arc.
///
/// Product vertex `(d, f)` (base vertex `d` of the outer factor, position `f`
/// inside its copy of the inner factor) is sent to `d + (2m+1)·f`, so each
/// copy occupies one residue class mod `2m+1`.
pub fn verify_composition(outer: &SymbolSet, inner: &SymbolSet, product: &SymbolSet) -> Result<bool> {
    let a = outer.order();
    let b = inner.order();
    if product.order() != a * b {
        return Err(CompositionError::IncompatibleModuli {
            outer: a,
            inner: b,
            product: product.order(),
        });
    }
    let d_outer = CirculantTournament::new(*outer);
    let f_inner = CirculantTournament::new(*inner);
    let t = CirculantTournament::new(*product);
    let label = |d: usize, f: usize| d + a * f;
    for d in 0..a {
        for f in 0..b {
            for d2 in 0..a {
                for f2 in 0..b {
                    let product_arc = if d != d2 {
                        d_outer.has_arc(d, d2)
                    } else {
                        f != f2 && f_inner.has_arc(f, f2)
                    };
                    if product_arc != t.has_arc(label(d, f), label(d2, f2)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub outer: SymbolSet,
    pub inner: SymbolSet,
    /// The subgroup whose cosets carry the copies of the inner factor.
    pub subgroup: Subgroup,
}

/// Splits `L` along its quasi-periodic witness with the largest subgroup.
/// `None` when `L` is not quasi-periodic.
pub fn decompose(symbol: &SymbolSet) -> Result<Option<Decomposition>> {
    let set = symbol.residues();
    let Some(witness) = set.quasi_periodic_witness()? else {
        return Ok(None);
    };
    let inconsistent = |detail: String| CompositionError::Inconsistent {
        symbol: symbol.to_string(),
        detail,
    };
    let h = witness.subgroup;
    if h.order() == symbol.order() {
        return Err(inconsistent("witness subgroup is the whole group".into()));
    }
    if !witness.residual_part.iter().all(|c| h.contains(c)) {
        return Err(CompositionError::ResidualOutsideSubgroup {
            symbol: symbol.to_string(),
        });
    }
    let outer_order = h.index();
    let inner_order = h.order();
    let outer = ResidueSet::from_residues(
        outer_order,
        witness.periodic_part.iter().map(|x| x % outer_order),
    )?;
    let inner = ResidueSet::from_residues(
        inner_order,
        witness.residual_part.iter().map(|c| c / outer_order),
    )?;
    let outer = SymbolSet::new(outer).map_err(|e| inconsistent(format!("outer factor: {e}")))?;
    let inner = SymbolSet::new(inner).map_err(|e| inconsistent(format!("inner factor: {e}")))?;
    if compose(&outer, &inner)? != *symbol {
        return Err(inconsistent(format!("{outer} and {inner} do not recompose")));
    }
    Ok(Some(Decomposition {
        outer,
        inner,
        subgroup: h,
    }))
}

/// Nested simple factors `T_1[T_2[⋯[T_k]⋯]]` of a circulant tournament.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorizationTree {
    Leaf(SymbolSet),
    Node {
        symbol: SymbolSet,
        outer: Box<FactorizationTree>,
        inner: Box<FactorizationTree>,
    },
}

impl FactorizationTree {
    pub fn symbol(&self) -> &SymbolSet {
        match self {
            FactorizationTree::Leaf(s) => s,
            FactorizationTree::Node { symbol, .. } => symbol,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, FactorizationTree::Leaf(_))
    }

    /// Simple factors, outermost first.
    pub fn leaves(&self) -> Vec<SymbolSet> {
        match self {
            FactorizationTree::Leaf(s) => vec![*s],
            FactorizationTree::Node { outer, inner, .. } => {
                let mut v = outer.leaves();
                v.extend(inner.leaves());
                v
            }
        }
    }

    /// Composes the children back up the tree.
    pub fn recompose(&self) -> Result<SymbolSet> {
        match self {
            FactorizationTree::Leaf(s) => Ok(*s),
            FactorizationTree::Node { outer, inner, .. } => {
                compose(&outer.recompose()?, &inner.recompose()?)
            }
        }
    }

    /// Leaves are simple, every node recomposes from its children, and the
    /// leaf orders multiply to the root order.
    pub fn is_consistent(&self) -> Result<bool> {
        let ok = match self {
            FactorizationTree::Leaf(s) => decompose(s)?.is_none(),
            FactorizationTree::Node {
                symbol,
                outer,
                inner,
            } => {
                compose(outer.symbol(), inner.symbol())? == *symbol
                    && outer.is_consistent()?
                    && inner.is_consistent()?
            }
        };
        let product: usize = self.leaves().iter().map(SymbolSet::order).product();
        Ok(ok && product == self.symbol().order())
    }
}

/// `(9:{1,3,4,7} (3:{1}) (3:{1}))`; a leaf is printed without children.
impl fmt::Display for FactorizationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorizationTree::Leaf(s) => write!(f, "({s})"),
            FactorizationTree::Node {
                symbol,
                outer,
                inner,
            } => write!(f, "({symbol} {outer} {inner})"),
        }
    }
}

impl FromStr for FactorizationTree {
    type Err = CompositionError;

    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let tree = parse_tree(&mut rest, s)?;
        if !rest.trim().is_empty() {
            return Err(CompositionError::Parse(s.to_string()));
        }
        Ok(tree)
    }
}

fn parse_tree(rest: &mut &str, whole: &str) -> Result<FactorizationTree> {
    let bad = || CompositionError::Parse(whole.to_string());
    *rest = rest.trim_start().strip_prefix('(').ok_or_else(bad)?;
    let end = rest.find('}').ok_or_else(bad)?;
    let symbol: SymbolSet = rest[..=end].parse()?;
    *rest = rest[end + 1..].trim_start();
    if let Some(after) = rest.strip_prefix(')') {
        *rest = after;
        return Ok(FactorizationTree::Leaf(symbol));
    }
    let outer = parse_tree(rest, whole)?;
    let inner = parse_tree(rest, whole)?;
    *rest = rest.trim_start().strip_prefix(')').ok_or_else(bad)?;
    Ok(FactorizationTree::Node {
        symbol,
        outer: Box::new(outer),
        inner: Box::new(inner),
    })
}

/// Recursive decomposition down to simple factors.
pub fn factorize(symbol: &SymbolSet) -> Result<FactorizationTree> {
    Ok(match decompose(symbol)? {
        None => FactorizationTree::Leaf(*symbol),
        Some(d) => FactorizationTree::Node {
            symbol: *symbol,
            outer: Box::new(factorize(&d.outer)?),
            inner: Box::new(factorize(&d.inner)?),
        },
    })
}

/// True iff the symbol set admits no quasi-periodic witness.
///
/// A witness that fails to decompose into two symbol sets recomposing to
/// `L` is reported as [`CompositionError::Inconsistent`] or
/// [`CompositionError::ResidualOutsideSubgroup`].
pub fn is_simple(symbol: &SymbolSet) -> Result<bool> {
    Ok(decompose(symbol)?.is_none())
}

/// Every vertex outside `candidate` dominates all of it or none of it.
pub fn is_module(t: &CirculantTournament, candidate: &ResidueSet) -> bool {
    let m = candidate.bits();
    let outside = t.vertex_mask() & !m;
    bits_iter(outside).all(|v| {
        let hit = t.out_mask(v) & m;
        hit == 0 || hit == m
    })
}

/// Largest order for which [`find_module`] scans all vertex subsets.
pub const EXHAUSTIVE_MODULE_ORDER: usize = 15;

/// A nontrivial module (`2 ≤ |M| ≤ order-1`), if any.
///
/// Orders up to [`EXHAUSTIVE_MODULE_ORDER`] are scanned subset by subset;
/// larger orders use [`find_module_by_closure`].
pub fn find_module(t: &CirculantTournament) -> Option<ResidueSet> {
    if t.order() <= EXHAUSTIVE_MODULE_ORDER {
        find_module_exhaustive(t)
    } else {
        find_module_by_closure(t)
    }
}

/// The module with the smallest bit pattern among all nontrivial modules.
pub fn find_module_exhaustive(t: &CirculantTournament) -> Option<ResidueSet> {
    let n = t.order();
    assert!(n <= 30, "exhaustive module scan is limited to order 30");
    let all = (1u128 << n) - 1;
    (1..all)
        .filter(|m: &u128| m.count_ones() >= 2)
        .map(|m| ResidueSet::from_bits(n, m))
        .find(|cand| is_module(t, cand))
}

/// Grows `{0, v}` by adding splitting vertices until it is a module; the
/// result is the least module containing both. Rotations are automorphisms,
/// so a nontrivial module exists iff some such closure is proper.
pub fn find_module_by_closure(t: &CirculantTournament) -> Option<ResidueSet> {
    let n = t.order();
    let all = t.vertex_mask();
    (1..n)
        .map(|v| {
            let mut m: u128 = 1 | 1u128 << v;
            loop {
                let splitters = bits_iter(all & !m)
                    .filter(|&x| {
                        let hit = t.out_mask(x) & m;
                        hit != 0 && hit != m
                    })
                    .fold(0u128, |acc, x| acc | 1u128 << x);
                if splitters == 0 {
                    break m;
                }
                m |= splitters;
            }
        })
        .find(|&m| m != all)
        .map(|m| ResidueSet::from_bits(n, m))
}
