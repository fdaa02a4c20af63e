//! `verify` — numerical verification harness for the polycone library.
//!
//! Exit codes: 0 all checks passed (or were skipped), 1 at least one
//! check failed (the witness is serialized in the JSON report), 2 usage
//! or I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use polycone_cli::config::{FieldChoice, Suite, SuiteConfig};
use polycone_cli::report::Status;
use polycone_cli::suites::run_config;

#[derive(Parser)]
#[command(
    name = "verify",
    version,
    about = "Runs randomized and exact verification suites for the \
             degree-(2n-1) polynomial model: invariant pairings, cone \
             geometry, flat-connection transport, developing maps, and \
             root-locus avoidance."
)]
struct Cli {
    /// Suite to run.
    #[arg(value_enum)]
    suite: Suite,

    /// Half-rank parameter; polynomials have degree 2n-1 (1 to 50).
    #[arg(long, default_value_t = 2)]
    n: usize,

    /// Coefficient field for sampled checks.
    #[arg(long, value_enum, default_value_t = FieldChoice::Both)]
    field: FieldChoice,

    /// Samples per randomized check; 0 skips sampling but keeps the
    /// deterministic checks.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,

    /// RNG seed; defaults to $VERIFY_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,

    /// Chordal tolerance for root clustering (defaults scale with n).
    #[arg(long)]
    tol_cluster: Option<f64>,

    /// Chordal tolerance for real-line proximity (defaults scale with n).
    #[arg(long)]
    tol_real: Option<f64>,

    /// Write the JSON report to this file instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Write sampled root data as CSV (roots or all suites only);
    /// complex values occupy re/im column pairs.
    #[arg(long)]
    dump_csv: Option<PathBuf>,

    /// Worker threads for the sample loops (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn resolve_seed(cli_seed: Option<u64>) -> Result<u64, String> {
    if let Some(s) = cli_seed {
        return Ok(s);
    }
    match std::env::var("VERIFY_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|_| format!("could not parse VERIFY_SEED={text:?} as an unsigned integer")),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(format!("could not read VERIFY_SEED: {e}")),
    }
}

fn run() -> Result<bool, String> {
    let cli = Cli::parse();

    if cli.n == 0 || cli.n > 50 {
        return Err(format!("--n must lie in 1..=50, got {}", cli.n));
    }
    for (flag, value) in [("--tol-cluster", cli.tol_cluster), ("--tol-real", cli.tol_real)] {
        if let Some(t) = value {
            if !(t > 0.0) || !t.is_finite() {
                return Err(format!("{flag} must be a positive finite number, got {t}"));
            }
        }
    }
    if cli.dump_csv.is_some() && !matches!(cli.suite, Suite::Roots | Suite::All) {
        return Err("--dump-csv applies only to the roots suite (or all)".into());
    }
    if cli.threads == Some(0) {
        return Err("--threads must be positive".into());
    }
    let seed = resolve_seed(cli.seed)?;

    let cfg = SuiteConfig {
        suite: cli.suite,
        n: cli.n,
        field: cli.field,
        samples: cli.samples,
        seed,
        tol_cluster: cli.tol_cluster,
        tol_real: cli.tol_real,
        threads: cli.threads,
    };

    let want_csv = cli.dump_csv.is_some();
    let (report, csv) = match cli.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| format!("could not build a {t}-thread pool: {e}"))?;
            pool.install(|| run_config(&cfg, want_csv))
        }
        None => run_config(&cfg, want_csv),
    };

    if let (Some(path), Some(table)) = (cli.dump_csv.as_ref(), csv.as_ref()) {
        table
            .write_to(path)
            .map_err(|e| format!("could not write {}: {e}", path.display()))?;
    }

    for check in &report.checks {
        let status = match check.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skip => "skip",
        };
        match check.worst_value {
            Some(v) => eprintln!(
                "[{status}] {name}  worst {v:.3e}  ({ms} ms)",
                name = check.name,
                ms = check.elapsed_ms
            ),
            None => eprintln!(
                "[{status}] {name}  ({ms} ms)",
                name = check.name,
                ms = check.elapsed_ms
            ),
        }
    }
    let failed = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Fail)
        .count();
    let skipped = report
        .checks
        .iter()
        .filter(|c| c.status == Status::Skip)
        .count();
    eprintln!(
        "suite {}: {}/{} checks passed, {} skipped, seed {}",
        report.suite,
        report.checks.len() - failed - skipped,
        report.checks.len(),
        skipped,
        report.seed
    );

    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| format!("could not serialize the report: {e}"))?;
    match cli.report.as_ref() {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| format!("could not write {}: {e}", path.display()))?,
        None => println!("{json}"),
    }

    Ok(report.pass)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("verify: {msg}");
            eprintln!("run `verify --help` for usage");
            ExitCode::from(2)
        }
    }
}
