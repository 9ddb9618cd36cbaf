//! Per-order census of circulant tournaments and the verification suites.

mod cache;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::composition::{factorize, find_module, CompositionError};
use crate::config::DEFAULT_SEED;
use crate::disconnection::{self, keenness_check, SearchError, SearchLimits, Variant};
use crate::tournament::{enumerate_symbol_sets, gcd, CirculantTournament, SymbolSet, TournamentError};
use crate::zmod::{ZmodError, MAX_MODULUS};

pub use cache::{Cache, CACHE_VERSION};
pub use verify::{run_suite, CheckOutcome, Suite, VerifyParams, VerifyReport};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("invalid order {0}: expected an odd integer in 3..={max}", max = MAX_MODULUS - 1)]
    InvalidOrder(usize),
    #[error("row invariant `{invariant}` violated: {row}")]
    Invariant { invariant: &'static str, row: Box<CensusRow> },
    #[error("cached row differs from a fresh computation: cached {cached}, fresh {fresh}")]
    CacheIncoherent { cached: Box<CensusRow>, fresh: Box<CensusRow> },
    #[error("cache {path}: {detail}")]
    Cache { path: String, detail: String },
    #[error("unknown suite `{0}` (expected char, final, keen, compose_roundtrip, lemmas, kneser or alspach)")]
    UnknownSuite(String),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Composition(#[from] CompositionError),
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CensusError {
    /// A mathematical violation rather than a usage or environment problem.
    pub fn is_violation(&self) -> bool {
        matches!(self, CensusError::Invariant { .. } | CensusError::CacheIncoherent { .. })
    }
}

pub type Result<T> = std::result::Result<T, CensusError>;

/// One symbol set's classification. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub order: usize,
    pub symbol: String,
    pub is_ap: bool,
    pub is_quasi_periodic: bool,
    pub is_aperiodic: bool,
    pub is_simple: bool,
    pub sumset_size: usize,
    pub is_tight: bool,
    /// Exact within the ω₃ bound; above it known only when tight.
    pub omega3: Option<usize>,
    pub omega: Option<usize>,
    pub keen_w3: Option<bool>,
    pub keen_w: Option<bool>,
    pub factorization: String,
    pub module_found: bool,
    /// Multiplier orbit size, with deduplication only.
    pub orbit_size: Option<usize>,
    pub elapsed_ms: Option<f64>,
}

impl std::fmt::Display for CensusRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| std::fmt::Error)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Clone, Debug)]
pub struct CensusOptions {
    pub omega: bool,
    pub keen: bool,
    pub dedup: bool,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
    pub cache: Option<PathBuf>,
    pub use_cache: bool,
    /// Record per-row wall time. Off by default so reports are reproducible.
    pub timings: bool,
    pub limits: SearchLimits,
    /// Selects the cached rows that are recomputed.
    pub seed: u64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            omega: false,
            keen: false,
            dedup: false,
            jobs: None,
            cache: None,
            use_cache: true,
            timings: false,
            limits: SearchLimits::default(),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Census {
    pub rows: Vec<CensusRow>,
    pub cache_hits: usize,
    pub cache_entries_written: usize,
    pub spot_checked: usize,
    /// Rows where `is_simple` and `module_found` are not opposite. Module
    /// search is an oracle, so these are reported rather than rejected.
    pub module_disagreements: Vec<String>,
}

/// Cached rows recomputed per run.
pub const SPOT_CHECKS: usize = 5;

pub fn check_order(order: usize) -> Result<()> {
    if order < 3 || order.is_multiple_of(2) || order >= MAX_MODULUS {
        return Err(CensusError::InvalidOrder(order));
    }
    Ok(())
}

/// Distinct images of `symbol` under `x ↦ a·x`, `gcd(a, order) = 1`, in
/// lexicographic order.
pub fn multiplier_orbit(symbol: &SymbolSet) -> Vec<SymbolSet> {
    let m = symbol.order();
    let mut orbit: Vec<SymbolSet> = (1..m)
        .filter(|&a| gcd(a, m) == 1)
        .map(|a| symbol.multiply(a).expect("unit multiplier"))
        .collect();
    orbit.sort_by(|a, b| a.residues().lex_cmp(b.residues()));
    orbit.dedup();
    orbit
}

/// Checks the row invariants; returns the name of the first violated one.
pub fn check_row(row: &CensusRow) -> std::result::Result<(), &'static str> {
    let half = (row.order - 1) / 2;
    if row.sumset_size + 1 < 2 * half || row.sumset_size > 2 * half {
        return Err("2|J|-1 <= |J+J| <= 2|J|");
    }
    if row.is_simple != row.is_tight {
        return Err("is_simple == is_tight");
    }
    if row.is_simple == row.is_quasi_periodic {
        return Err("is_simple == !is_quasi_periodic");
    }
    if let Some(w3) = row.omega3 {
        if (w3 == 2) != row.is_simple {
            return Err("is_simple == (omega3 == 2)");
        }
    }
    if let (Some(w3), Some(w)) = (row.omega3, row.omega) {
        if w != w3 {
            return Err("omega == omega3");
        }
    }
    Ok(())
}

struct RowCache<'a> {
    order: usize,
    symbol: &'a str,
    snapshot: Option<&'a Cache>,
    fresh: Vec<(String, Value)>,
    hits: usize,
}

impl RowCache<'_> {
    fn get_or<T, F>(&mut self, column: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let key = Cache::key(self.order, self.symbol, column);
        if let Some(v) = self.snapshot.and_then(|c| c.get(&key)) {
            self.hits += 1;
            return Ok(v);
        }
        let v = compute()?;
        if self.snapshot.is_some() {
            self.fresh.push((key, serde_json::to_value(&v)?));
        }
        Ok(v)
    }
}

/// A computed row, the cache entries it produced, and its cache hit count.
type ComputedRow = (CensusRow, Vec<(String, Value)>, usize);

fn compute_row(
    symbol: &SymbolSet,
    orbit_size: Option<usize>,
    options: &CensusOptions,
    snapshot: Option<&Cache>,
) -> Result<ComputedRow> {
    let start = Instant::now();
    let text = symbol.to_string();
    let order = symbol.order();
    let limits = &options.limits;
    let j = symbol.residues();
    let t = CirculantTournament::new(*symbol);
    let mut cache = RowCache {
        order,
        symbol: &text,
        snapshot,
        fresh: Vec::new(),
        hits: 0,
    };

    let tree = factorize(symbol)?;
    let is_tight: bool = cache.get_or("tight", || Ok(disconnection::is_tight(&t, limits)?))?;
    let omega3 = if order <= limits.omega3_max_order {
        Some(cache.get_or("omega3", || {
            Ok(disconnection::value(&t, Variant::TriangleFree, limits)?.0)
        })?)
    } else if is_tight {
        Some(2)
    } else {
        None
    };
    let omega = if options.omega {
        Some(cache.get_or("omega", || Ok(disconnection::value(&t, Variant::Acyclic, limits)?.0))?)
    } else {
        None
    };
    let (keen_w3, keen_w) = if options.keen {
        let w3 = cache.get_or("keen_w3", || {
            Ok(keenness_check(&t, Variant::TriangleFree, limits)?.is_keen())
        })?;
        let w = cache.get_or("keen_w", || Ok(keenness_check(&t, Variant::Acyclic, limits)?.is_keen()))?;
        (Some(w3), Some(w))
    } else {
        (None, None)
    };
    let module_found = cache.get_or("module_found", || Ok(find_module(&t).is_some()))?;

    let row = CensusRow {
        order,
        symbol: text.clone(),
        is_ap: j.is_arithmetic_progression()?,
        is_quasi_periodic: j.is_quasi_periodic()?,
        is_aperiodic: j.is_aperiodic()?,
        is_simple: tree.is_leaf(),
        sumset_size: j.sumset(j)?.len(),
        is_tight,
        omega3,
        omega,
        keen_w3,
        keen_w,
        factorization: tree.to_string(),
        module_found,
        orbit_size,
        elapsed_ms: options.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    let hits = cache.hits;
    Ok((row, cache.fresh, hits))
}

/// The symbol sets a census visits, with orbit sizes under deduplication.
pub fn census_symbols(order: usize, dedup: bool) -> Result<Vec<(SymbolSet, Option<usize>)>> {
    check_order(order)?;
    let all = enumerate_symbol_sets((order - 1) / 2);
    if !dedup {
        return Ok(all.map(|s| (s, None)).collect());
    }
    Ok(all
        .filter_map(|s| {
            let orbit = multiplier_orbit(&s);
            (orbit[0] == s).then_some((s, Some(orbit.len())))
        })
        .collect())
}

fn check_bounds(order: usize, options: &CensusOptions) -> Result<()> {
    let l = &options.limits;
    let mut required = vec![(l.tight_max_order, "tight")];
    if options.omega {
        required.push((l.omega_max_order, "omega"));
    }
    if options.keen {
        required.push((l.enumeration_max_order, "enumeration"));
    }
    for (bound, what) in required {
        if order > bound {
            return Err(SearchError::OrderAboveBound { order, bound, what }.into());
        }
    }
    Ok(())
}

pub(crate) fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CensusError::Pool(e.to_string()))
}

/// One row per symbol set of the given order, in enumeration order.
pub fn run_census(order: usize, options: &CensusOptions) -> Result<Census> {
    check_order(order)?;
    check_bounds(order, options)?;
    let symbols = census_symbols(order, options.dedup)?;

    let mut cache = match (&options.cache, options.use_cache) {
        (Some(path), true) => Some(Cache::open(path)?),
        _ => None,
    };
    let snapshot = cache.as_ref();
    let pool = thread_pool(options.jobs)?;
    let computed: Vec<_> = pool.install(|| {
        symbols
            .par_iter()
            .map(|(s, orbit)| compute_row(s, *orbit, options, snapshot))
            .collect::<Result<_>>()
    })?;

    let mut rows = Vec::with_capacity(computed.len());
    let mut fresh = Vec::new();
    let mut cached_rows = Vec::new();
    let mut cache_hits = 0;
    for (i, (row, entries, hits)) in computed.into_iter().enumerate() {
        if let Err(invariant) = check_row(&row) {
            return Err(CensusError::Invariant {
                invariant,
                row: Box::new(row),
            });
        }
        if hits > 0 {
            cached_rows.push(i);
        }
        cache_hits += hits;
        fresh.extend(entries);
        rows.push(row);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let sample: Vec<usize> = cached_rows.choose_multiple(&mut rng, SPOT_CHECKS).copied().collect();
    for &i in &sample {
        let (s, orbit) = &symbols[i];
        let (mut recomputed, _, _) = compute_row(s, *orbit, options, None)?;
        recomputed.elapsed_ms = rows[i].elapsed_ms;
        if recomputed != rows[i] {
            return Err(CensusError::CacheIncoherent {
                cached: Box::new(rows[i].clone()),
                fresh: Box::new(recomputed),
            });
        }
    }

    let cache_entries_written = fresh.len();
    if let Some(cache) = cache.as_mut() {
        if !fresh.is_empty() {
            cache.extend(fresh);
            cache.save()?;
        }
    }
    let module_disagreements = rows
        .iter()
        .filter(|r| r.is_simple == r.module_found)
        .map(|r| r.symbol.clone())
        .collect();
    Ok(Census {
        rows,
        cache_hits,
        cache_entries_written,
        spot_checked: sample.len(),
        module_disagreements,
    })
}

pub fn write_csv<W: Write>(rows: &[CensusRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(rows: &[CensusRow], mut out: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_rows<W: Write>(rows: &[CensusRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Jsonl => write_jsonl(rows, out),
    }
}
