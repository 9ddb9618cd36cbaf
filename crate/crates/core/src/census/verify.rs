//! Verification suites. Each suite runs a fixed list of named checks over
//! exhaustive or seeded-random inputs and reports case counts plus the first
//! counterexample of every failing check.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_order, thread_pool, CensusError, Result};
use crate::composition::{compose, decompose, factorize, is_simple, verify_composition};
use crate::config::{DEFAULT_SEED, DEFAULT_TRIALS};
use crate::disconnection::{
    self, keenness_check, lemma_identities, three_class_witness, SearchLimits, Variant,
};
use crate::tournament::{enumerate_symbol_sets, CirculantTournament, SymbolSet, VertexPartition};
use crate::zmod::{kneser_check, ResidueSet, MAX_MODULUS};

/// Moduli up to this are checked over all pairs of subsets; larger ones are sampled.
pub const EXHAUSTIVE_PAIR_MODULUS: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Char,
    Final,
    Keen,
    ComposeRoundtrip,
    Lemmas,
    Kneser,
    Alspach,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Char,
        Suite::Final,
        Suite::Keen,
        Suite::ComposeRoundtrip,
        Suite::Lemmas,
        Suite::Kneser,
        Suite::Alspach,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Char => "char",
            Suite::Final => "final",
            Suite::Keen => "keen",
            Suite::ComposeRoundtrip => "compose_roundtrip",
            Suite::Lemmas => "lemmas",
            Suite::Kneser => "kneser",
            Suite::Alspach => "alspach",
        }
    }

    /// Tournament orders, or factor orders for `compose_roundtrip`, or
    /// moduli for `lemmas`.
    pub fn default_orders(self) -> Vec<usize> {
        match self {
            Suite::Char => vec![7, 9, 11, 13, 15],
            Suite::Final | Suite::Keen => vec![7, 9, 11, 13],
            Suite::ComposeRoundtrip => vec![3, 5, 7],
            Suite::Lemmas => vec![9, 11, 13],
            Suite::Kneser => (3..=25).step_by(2).collect(),
            Suite::Alspach => (3..=15).step_by(2).collect(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CensusError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| CensusError::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyParams {
    /// Overrides [`Suite::default_orders`].
    pub orders: Option<Vec<usize>>,
    /// Moduli for the sumset-pair checks of `kneser`; default `2..=13`.
    pub moduli: Option<Vec<usize>>,
    /// Random cases per modulus for sampled checks.
    pub trials: usize,
    pub seed: u64,
    pub limits: SearchLimits,
    pub jobs: Option<usize>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            orders: None,
            moduli: None,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            limits: SearchLimits::default(),
            jobs: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: u64,
    pub violations: u64,
    pub counterexample: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            cases: 0,
            violations: 0,
            counterexample: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }

    fn merge(&mut self, other: CheckOutcome) {
        self.cases += other.cases;
        self.violations += other.violations;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs `f` on every item in parallel and merges the per-item outcomes in
/// item order, so the reported counterexample is deterministic.
fn run_checks<T, F>(pool: &rayon::ThreadPool, names: &[&'static str], items: &[T], f: F) -> Result<Vec<CheckOutcome>>
where
    T: Sync,
    F: Fn(&T, &mut [CheckOutcome]) -> Result<()> + Sync,
{
    let fresh = || names.iter().map(|&n| CheckOutcome::new(n)).collect::<Vec<_>>();
    let partials: Vec<Vec<CheckOutcome>> = pool.install(|| {
        items
            .par_iter()
            .map(|item| {
                let mut out = fresh();
                f(item, &mut out)?;
                Ok(out)
            })
            .collect::<Result<_>>()
    })?;
    let mut total = fresh();
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            t.merge(p);
        }
    }
    Ok(total)
}

fn symbols_of(orders: &[usize]) -> Result<Vec<SymbolSet>> {
    let mut out = Vec::new();
    for &order in orders {
        check_order(order)?;
        out.extend(enumerate_symbol_sets((order - 1) / 2));
    }
    Ok(out)
}

pub fn run_suite(suite: Suite, params: &VerifyParams) -> Result<VerifyReport> {
    let orders = params.orders.clone().unwrap_or_else(|| suite.default_orders());
    let pool = thread_pool(params.jobs)?;
    let checks = match suite {
        Suite::Char => verify_char(&pool, &orders, &params.limits)?,
        Suite::Final => verify_final(&pool, &orders, &params.limits)?,
        Suite::Keen => verify_keen(&pool, &orders, &params.limits)?,
        Suite::ComposeRoundtrip => verify_compose_roundtrip(&pool, &orders)?,
        Suite::Lemmas => verify_lemmas(&pool, &orders, params)?,
        Suite::Kneser => {
            let moduli = params.moduli.clone().unwrap_or_else(|| (2..=13).collect());
            verify_kneser(&pool, &orders, &moduli, params)?
        }
        Suite::Alspach => verify_alspach(&pool, &orders)?,
    };
    Ok(VerifyReport {
        suite: suite.name(),
        passed: checks.iter().all(CheckOutcome::passed),
        checks,
    })
}

fn verify_char(pool: &rayon::ThreadPool, orders: &[usize], limits: &SearchLimits) -> Result<Vec<CheckOutcome>> {
    let symbols = symbols_of(orders)?;
    run_checks(
        pool,
        &["tight_iff_simple", "simple_iff_aperiodic", "tight_iff_omega3_is_2"],
        &symbols,
        |s, out| {
            let t = CirculantTournament::new(*s);
            let tight = disconnection::is_tight(&t, limits)?;
            let simple = is_simple(s)?;
            let aperiodic = s.residues().is_aperiodic()?;
            out[0].record(tight == simple, || format!("{s}: tight={tight} simple={simple}"));
            out[1].record(simple == aperiodic, || format!("{s}: simple={simple} aperiodic={aperiodic}"));
            if s.order() <= limits.omega3_max_order {
                let (w3, _) = disconnection::value(&t, Variant::TriangleFree, limits)?;
                out[2].record(tight == (w3 == 2), || format!("{s}: tight={tight} omega3={w3}"));
            }
            Ok(())
        },
    )
}

fn verify_final(pool: &rayon::ThreadPool, orders: &[usize], limits: &SearchLimits) -> Result<Vec<CheckOutcome>> {
    let symbols = symbols_of(orders)?;
    run_checks(pool, &["omega_eq_omega3", "two_le_omega_le_omega3"], &symbols, |s, out| {
        let t = CirculantTournament::new(*s);
        let (w3, _) = disconnection::value(&t, Variant::TriangleFree, limits)?;
        let (w, _) = disconnection::value(&t, Variant::Acyclic, limits)?;
        out[0].record(w == w3, || format!("{s}: omega={w} omega3={w3}"));
        out[1].record(2 <= w && w <= w3, || format!("{s}: omega={w} omega3={w3}"));
        Ok(())
    })
}

fn verify_keen(pool: &rayon::ThreadPool, orders: &[usize], limits: &SearchLimits) -> Result<Vec<CheckOutcome>> {
    let symbols = symbols_of(orders)?;
    run_checks(
        pool,
        &[
            "keen_w3",
            "keen_w",
            "c3_free_at_most_one_singular",
            "every_optimal_one_singular_w3",
            "every_optimal_one_singular_w",
        ],
        &symbols,
        |s, out| {
            let t = CirculantTournament::new(*s);
            let w3 = keenness_check(&t, Variant::TriangleFree, limits)?;
            let w = keenness_check(&t, Variant::Acyclic, limits)?;
            let hist = |r: &disconnection::KeennessReport| format!("{s}: singular histogram {:?}", r.singular_histogram);
            out[0].record(w3.is_keen(), || hist(&w3));
            out[1].record(w.is_keen(), || hist(&w));
            out[2].record(w3.two_singular_witness.is_none(), || {
                format!("{s}: {}", w3.two_singular_witness.as_ref().unwrap())
            });
            out[3].record(w3.every_optimal_has_one_singular, || hist(&w3));
            out[4].record(w.every_optimal_has_one_singular, || hist(&w));
            Ok(())
        },
    )
}

fn verify_compose_roundtrip(pool: &rayon::ThreadPool, factor_orders: &[usize]) -> Result<Vec<CheckOutcome>> {
    let mut pairs = Vec::new();
    for &p in factor_orders {
        for &q in factor_orders {
            check_order(p)?;
            check_order(q)?;
            if p * q >= MAX_MODULUS {
                continue;
            }
            for j in enumerate_symbol_sets((p - 1) / 2) {
                for k in enumerate_symbol_sets((q - 1) / 2) {
                    pairs.push((j, k));
                }
            }
        }
    }
    run_checks(
        pool,
        &[
            "decompose_succeeds",
            "recomposes_to_product",
            "arc_sets_match",
            "product_is_quasi_periodic",
            "factorization_consistent",
        ],
        &pairs,
        |(j, k), out| {
            let l = compose(j, k)?;
            let d = decompose(&l)?;
            out[0].record(d.is_some(), || format!("{j} x {k} = {l}: no decomposition"));
            if let Some(d) = d {
                let back = compose(&d.outer, &d.inner)?;
                out[1].record(back == l, || format!("{j} x {k} = {l}: recomposed {back}"));
            }
            out[2].record(verify_composition(j, k, &l)?, || format!("{j} x {k} = {l}"));
            out[3].record(l.residues().is_quasi_periodic()?, || format!("{j} x {k} = {l}"));
            let tree = factorize(&l)?;
            out[4].record(tree.is_consistent()? && tree.recompose()? == l, || format!("{l}: {tree}"));
            Ok(())
        },
    )
}

/// A symbol set and a 3-labeling of Z_m using every label.
fn random_case(rng: &mut ChaCha8Rng, m: usize) -> Result<(SymbolSet, Vec<usize>)> {
    let half = (m - 1) / 2;
    let symbol = SymbolSet::from_residues(m, (1..=half).map(|j| if rng.gen() { j } else { m - j }))?;
    loop {
        let labels: Vec<usize> = (0..m).map(|_| rng.gen_range(0..3)).collect();
        if (0..3).all(|c| labels.contains(&c)) {
            return Ok((symbol, labels));
        }
    }
}

fn role_classes(m: usize, labels: &[usize]) -> Result<[ResidueSet; 3]> {
    let class = |c: usize| ResidueSet::from_residues(m, (0..m).filter(|&v| labels[v] == c));
    Ok([class(0)?, class(1)?, class(2)?])
}

fn verify_lemmas(pool: &rayon::ThreadPool, moduli: &[usize], params: &VerifyParams) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut cases = Vec::new();
    for &m in moduli {
        check_order(m)?;
        for _ in 0..params.trials {
            cases.push(random_case(&mut rng, m)?);
        }
    }
    // Three-class partitions found by the tightness search, under every
    // assignment of the roles A, B, C.
    let witnesses: Vec<(SymbolSet, Vec<usize>)> = {
        let symbols = symbols_of(moduli)?;
        let found: Vec<_> = pool.install(|| {
            symbols
                .par_iter()
                .map(|s| Ok((*s, three_class_witness(&CirculantTournament::new(*s), &params.limits)?)))
                .collect::<Result<Vec<_>>>()
        })?;
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        found
            .into_iter()
            .filter_map(|(s, w)| w.map(|w| (s, w)))
            .flat_map(|(s, w)| perms.map(|p| (s, w.labels().iter().map(|&c| p[c]).collect())))
            .collect()
    };
    cases.extend(witnesses);

    let describe = |s: &SymbolSet, abc: &[ResidueSet; 3]| format!("J={s} A={} B={} C={}", abc[0], abc[1], abc[2]);
    run_checks(
        pool,
        &["aux_identity", "abcj_iff_ajj", "abcj_when_c3_free", "aux_inclusion"],
        &cases,
        |(s, labels), out| {
            let abc = role_classes(s.order(), labels)?;
            let r = lemma_identities(s, &abc[0], &abc[1], &abc[2])?;
            out[0].record(r.aux, || describe(s, &abc));
            out[1].record(r.abcj == r.ajj, || describe(s, &abc));
            let t = CirculantTournament::new(*s);
            if t.is_externally_c3_free(&VertexPartition::from_labels(labels)?)? {
                out[2].record(r.abcj, || describe(s, &abc));
            }
            out[3].record(r.aux_inclusion, || describe(s, &abc));
            Ok(())
        },
    )
}

fn subsets(m: usize) -> impl Iterator<Item = ResidueSet> {
    (1u128..(1u128 << m)).map(move |bits| ResidueSet::from_residues(m, (0..m).filter(|&i| bits >> i & 1 == 1)).unwrap())
}

fn random_subset(rng: &mut ChaCha8Rng, m: usize) -> ResidueSet {
    let size = rng.gen_range(2..m);
    let picked = rand::seq::index::sample(rng, m, size);
    ResidueSet::from_residues(m, picked).expect("distinct residues")
}

fn verify_kneser(
    pool: &rayon::ThreadPool,
    orders: &[usize],
    moduli: &[usize],
    params: &VerifyParams,
) -> Result<Vec<CheckOutcome>> {
    let mut out = run_checks(
        pool,
        &["symbol_sumset_bounds", "non_ap_critical_iff_quasi_periodic"],
        &symbols_of(orders)?,
        |s, out| {
            let j = s.residues();
            let k = j.len();
            let size = j.sumset(j)?.len();
            out[0].record(2 * k - 1 <= size && size <= 2 * k, || format!("{s}: |J+J|={size}"));
            if !j.is_arithmetic_progression()? {
                let qp = j.is_quasi_periodic()?;
                out[1].record((size == 2 * k - 1) == qp, || format!("{s}: |J+J|={size} quasi_periodic={qp}"));
            }
            Ok(())
        },
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut firsts: Vec<(usize, Vec<ResidueSet>)> = Vec::new();
    let mut sampled: Vec<(ResidueSet, ResidueSet)> = Vec::new();
    for &m in moduli {
        if !(2..=MAX_MODULUS).contains(&m) {
            return Err(crate::zmod::ZmodError::BadModulus(m).into());
        }
        if m <= EXHAUSTIVE_PAIR_MODULUS {
            firsts.push((m, subsets(m).collect()));
        } else if m > 2 {
            for _ in 0..params.trials {
                sampled.push((random_subset(&mut rng, m), random_subset(&mut rng, m)));
            }
        }
    }
    let names = ["kneser_bound", "kneser_periodicity_clause", "kemperman_dichotomy"];
    let check_pair = |a: &ResidueSet, b: &ResidueSet, out: &mut [CheckOutcome]| -> Result<()> {
        let r = kneser_check(a, b)?;
        out[0].record(r.bound_holds, || format!("A={a} B={b}"));
        out[1].record(r.periodicity_clause_holds, || format!("A={a} B={b}"));
        if a.len() >= 2 && b.len() >= 2 && r.sum_size + 1 == a.len() + b.len() {
            let sum = a.sumset(b)?;
            let ok = sum.is_arithmetic_progression()? || sum.is_quasi_periodic()?;
            out[2].record(ok, || format!("A={a} B={b} A+B={sum}"));
        }
        Ok(())
    };
    let exhaustive: Vec<(&Vec<ResidueSet>, &ResidueSet)> =
        firsts.iter().flat_map(|(_, all)| all.iter().map(move |a| (all, a))).collect();
    let pairs_exhaustive = run_checks(pool, &names, &exhaustive, |(all, a), out| {
        all.iter().try_for_each(|b| check_pair(a, b, out))
    })?;
    let pairs_sampled = run_checks(pool, &names, &sampled, |(a, b), out| check_pair(a, b, out))?;
    for (mut e, s) in pairs_exhaustive.into_iter().zip(pairs_sampled) {
        e.merge(s);
        out.push(e);
    }
    Ok(out)
}

fn verify_alspach(pool: &rayon::ThreadPool, orders: &[usize]) -> Result<Vec<CheckOutcome>> {
    run_checks(pool, &["every_arc_in_triangle"], &symbols_of(orders)?, |s, out| {
        out[0].record(CirculantTournament::new(*s).alspach_check(), || s.to_string());
        Ok(())
    })
}
