//! `singmod`: batch front end for the verification suites.
//!
//! Exit status 0 when every assertion holds, 1 when one fails or a
//! computation errors (a failure record is still written), 2 on usage errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{OutputFormat, RunConfig};
use output::Report;
use singmod::modpoly::Cache;
use singmod::DiscriminantPair;

#[derive(Parser)]
#[command(name = "singmod", version, about = "Verification suites for CM isogeny primes and the identities around them")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Certificate cache directory (overrides SINGMOD_CACHE_DIR and the config).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Restrict the run to one discriminant pair instead of the configured list.
#[derive(Args, Clone, Copy)]
struct PairArgs {
    #[arg(long, allow_negative_numbers = true, requires = "d2")]
    d1: Option<i64>,
    #[arg(long, allow_negative_numbers = true, requires = "d1")]
    d2: Option<i64>,
}

#[derive(Subcommand)]
enum Command {
    /// The primes p <= Dm²/4, p ∤ m, dividing φ_m(j1, j2).
    PiSet {
        #[command(flatten)]
        pair: PairArgs,
        /// Single degree; defaults to 1..=m_max.
        #[arg(long)]
        m: Option<u64>,
    },
    /// Exact valuation ledger: predicted against observed ord_p φ_m(j1, j2).
    GzLedger {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        mmax: Option<u64>,
    },
    /// Numeric Green-function identity for k = 3, 5, 7.
    GkzVerify {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [3, 5, 7])]
        k: Vec<u32>,
        #[arg(long, default_value_t = 5)]
        mmax: u64,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Local matching identity, abstractly for o <= omax and on every trace-m element.
    EstCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 40)]
        omax: u32,
        #[arg(long)]
        mmax: Option<u64>,
    },
    /// Petersson-norm inequality audit for a corpus form.
    PeterssonAudit {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        weight: u32,
        #[arg(long = "Y", value_delimiter = ',', default_values_t = [0.5, 0.1, 0.05])]
        y: Vec<f64>,
    },
    /// Minimal isogeny degree between the supersingular reductions mod p.
    MinDegree {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        p: u64,
    },
    /// Minimal degrees against the bound ⌊p^{2/3}/2 + 1/4⌋ for all good supersingular p <= pmax.
    ElkiesAudit {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        pmax: Option<u64>,
    },
    /// The two counting functions of the small-degree / many-primes dichotomy.
    Dichotomy {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        eta: f64,
        #[arg(long = "C")]
        c: f64,
    },
    /// Coefficient sums are supported exactly on π(m).
    BoundLedger {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        mmax: Option<u64>,
    },
    /// Table of nonzero coefficients c_k(m; p^{2r+1}).
    Coefficients {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        m: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 3, 5, 7])]
        k: Vec<u32>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::PiSet { .. } => "pi-set",
            Command::GzLedger { .. } => "gz-ledger",
            Command::GkzVerify { .. } => "gkz-verify",
            Command::EstCheck { .. } => "est-check",
            Command::PeterssonAudit { .. } => "petersson-audit",
            Command::MinDegree { .. } => "min-degree",
            Command::ElkiesAudit { .. } => "elkies-audit",
            Command::Dichotomy { .. } => "dichotomy",
            Command::BoundLedger { .. } => "bound-ledger",
            Command::Coefficients { .. } => "coefficients",
        }
    }
}

fn pairs(cfg: &[DiscriminantPair], pair: PairArgs) -> anyhow::Result<Vec<DiscriminantPair>> {
    Ok(match (pair.d1, pair.d2) {
        (Some(a), Some(b)) => vec![DiscriminantPair::new(a, b)?],
        _ => cfg.to_vec(),
    })
}

fn run(cli: Cli, report: &mut Report) -> anyhow::Result<OutputFormat> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let configured = cfg.validate()?;
    let format = cli.format.unwrap_or(cfg.output_format);
    if let Some(n) = cli.jobs.or(cfg.parallelism) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cache_dir = cfg.resolve_cache_dir(cli.cache_dir);
    let cache = cache_dir.as_deref().map(Cache::open).transpose()?;
    let cache = cache.as_ref();
    match cli.command {
        Command::PiSet { pair, m } => {
            let ms: Vec<u64> = match m {
                Some(m) => vec![m],
                None => (1..=cfg.m_max).collect(),
            };
            commands::pi_set(report, &pairs(&configured, pair)?, &ms, cache)?
        }
        Command::GzLedger { pair, mmax } => {
            commands::gz_ledger(report, &pairs(&configured, pair)?, mmax.unwrap_or(cfg.m_max), cache)?
        }
        Command::GkzVerify { pair, k, mmax, tol } => {
            let tol = tol.unwrap_or(cfg.tolerance("gkz", 1e-6));
            anyhow::ensure!(tol > 0.0, "tolerance must be positive");
            commands::gkz(report, &pairs(&configured, pair)?, &k, mmax, tol)?
        }
        Command::EstCheck { pair, omax, mmax } => {
            commands::est_check(report, &pairs(&configured, pair)?, omax, mmax.unwrap_or(cfg.m_max))?
        }
        Command::PeterssonAudit { level, weight, y } => {
            commands::petersson_audit(report, level, weight, &y, cfg.tolerance("petersson", 1e-8))?
        }
        Command::MinDegree { pair, p } => commands::min_degree(report, &pairs(&configured, pair)?, p, cache)?,
        Command::ElkiesAudit { pair, pmax } => {
            commands::elkies(report, &pairs(&configured, pair)?, pmax.unwrap_or(cfg.p_max), cache)?
        }
        Command::Dichotomy { pair, x, delta, eta, c } => {
            commands::dichotomy(report, &pairs(&configured, pair)?, (x, delta, eta, c), cache)?
        }
        Command::BoundLedger { pair, mmax } => {
            commands::bound_ledger(report, &pairs(&configured, pair)?, mmax.unwrap_or(cfg.m_max), cache)?
        }
        Command::Coefficients { pair, m, k } => commands::coefficients(report, &pairs(&configured, pair)?, m, &k)?,
    }
    if let Some(dir) = &cache_dir {
        commands::reverify_cache(report, dir)?;
    }
    Ok(format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fallback = cli.format.unwrap_or_default();
    let mut report = Report::new(cli.command.name());
    let format = match run(cli, &mut report) {
        Ok(f) => f,
        Err(e) => {
            report.fail(json!({"error": e.to_string()}));
            fallback
        }
    };
    let stdout = std::io::stdout();
    if let Err(e) = report.write(format, &mut stdout.lock()) {
        eprintln!("singmod: could not write report: {e}");
        return ExitCode::FAILURE;
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
