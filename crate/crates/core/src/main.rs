use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use circulant::census::{self, CensusError, CensusOptions, OutputFormat, Suite, VerifyParams};
use circulant::composition::{compose, factorize};
use circulant::config::Config;
use circulant::disconnection::{self, SearchLimits};
use circulant::{CirculantTournament, SymbolSet};

#[derive(Parser)]
#[command(name = "circulant", version, about = "Circulant tournament census and verification")]
struct Cli {
    /// Key-value configuration file with search bounds, seed and trials.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Acknowledge that raised search bounds may be slow.
    #[arg(long, global = true)]
    allow_slow: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every symbol set of one order.
    Census {
        #[arg(long)]
        order: usize,
        /// Compute the acyclic disconnection.
        #[arg(long)]
        omega: bool,
        /// Check keenness for both variants.
        #[arg(long)]
        keen: bool,
        /// Keep one symbol set per multiplier orbit.
        #[arg(long)]
        dedup: bool,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        no_cache: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Add per-row wall time (output is then no longer reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run a verification suite.
    Verify {
        /// char, final, keen, compose_roundtrip, lemmas, kneser or alspach.
        suite: String,
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
        /// Moduli for the sumset-pair checks of the kneser suite.
        #[arg(long, value_delimiter = ',')]
        moduli: Option<Vec<usize>>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the factorization tree of a symbol set.
    Factorize { symbol: String },
    /// Exact C3-free disconnection with optimal partitions, as JSON.
    Omega3 { symbol: String },
    /// Exact acyclic disconnection with optimal partitions, as JSON.
    Omega { symbol: String },
    /// Whether the C3-free disconnection is 2.
    Tight { symbol: String },
    /// Lexicographic composition of two symbol sets.
    Compose { outer: String, inner: String },
}

fn parse_symbol(text: &str) -> Result<SymbolSet> {
    text.parse().with_context(|| format!("invalid symbol set `{text}`"))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    config.allow_slow |= cli.allow_slow;
    let limits: SearchLimits = config.limits()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();

    match cli.command {
        Command::Census {
            order,
            omega,
            keen,
            dedup,
            jobs,
            cache,
            no_cache,
            format,
            timings,
        } => {
            let options = CensusOptions {
                omega,
                keen,
                dedup,
                jobs: jobs.or(config.jobs),
                cache,
                use_cache: !no_cache,
                timings,
                limits,
                seed: config.seed,
            };
            let result = census::run_census(order, &options)?;
            let format = match format {
                Format::Csv => OutputFormat::Csv,
                Format::Jsonl => OutputFormat::Jsonl,
            };
            census::write_rows(&result.rows, format, &mut out)?;
            for symbol in &result.module_disagreements {
                eprintln!("warning: {symbol}: simplicity and module search disagree");
            }
            eprintln!(
                "order {order}: {} rows, {} cache hits, {} entries written, {} spot-checked",
                result.rows.len(),
                result.cache_hits,
                result.cache_entries_written,
                result.spot_checked
            );
        }
        Command::Verify {
            suite,
            orders,
            moduli,
            trials,
            seed,
            jobs,
        } => {
            let suite: Suite = suite.parse()?;
            let params = VerifyParams {
                orders,
                moduli,
                trials: trials.unwrap_or(config.trials),
                seed: seed.unwrap_or(config.seed),
                limits,
                jobs: jobs.or(config.jobs),
            };
            let report = census::run_suite(suite, &params)?;
            for check in &report.checks {
                let status = if check.passed() { "PASS" } else { "FAIL" };
                eprintln!("{status} {suite}/{} cases={} violations={}", check.name, check.cases, check.violations);
            }
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Factorize { symbol } => {
            writeln!(out, "{}", factorize(&parse_symbol(&symbol)?)?)?;
        }
        Command::Omega3 { symbol } => {
            let t = CirculantTournament::new(parse_symbol(&symbol)?);
            writeln!(out, "{}", disconnection::omega3(&t, &limits)?.to_json())?;
        }
        Command::Omega { symbol } => {
            let t = CirculantTournament::new(parse_symbol(&symbol)?);
            writeln!(out, "{}", disconnection::omega(&t, &limits)?.to_json())?;
        }
        Command::Tight { symbol } => {
            let t = CirculantTournament::new(parse_symbol(&symbol)?);
            writeln!(out, "{}", disconnection::is_tight(&t, &limits)?)?;
        }
        Command::Compose { outer, inner } => {
            writeln!(out, "{}", compose(&parse_symbol(&outer)?, &parse_symbol(&inner)?)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let violation = e.downcast_ref::<CensusError>().is_some_and(CensusError::is_violation);
            ExitCode::from(if violation { 1 } else { 2 })
        }
    }
}
