use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spgamma::suite::{emit_report, parse_range, run_suite, Format, Suite, SuiteConfig};

/// Run a seeded property suite and report per-cell results.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Args {
    /// bruhat, orbit, measure, torus, weyl, cutoff or all
    suite: String,
    /// Range of r: `A`, `A..B` or `A..=B`, inclusive.
    #[arg(long, default_value = "1..3")]
    r: String,
    #[arg(long, default_value = "0..2")]
    m: String,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// Entries are drawn from `[-bound, bound]`.
    #[arg(long, default_value_t = spgamma::sample::DEFAULT_BOUND)]
    bound: i64,
    #[arg(long, default_value_t = 3)]
    prime: u64,
    #[arg(long, default_value_t = 1)]
    kappa: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    d: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    g: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weyl suite only: all shapes with r + m <= n.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn config(a: &Args) -> spgamma::Result<(SuiteConfig, Format)> {
    let cfg = SuiteConfig {
        suite: a.suite.parse::<Suite>()?,
        r: parse_range(&a.r)?,
        m: parse_range(&a.m)?,
        samples: a.samples,
        bound: a.bound,
        prime: a.prime,
        kappa: a.kappa,
        d: a.d,
        g: a.g,
        seed: a.seed,
        n: a.n,
        inject_fault: a.inject_fault,
    };
    Ok((cfg, a.format.parse()?))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let run = config(&args).and_then(|(cfg, format)| {
        let report = run_suite(&cfg)?;
        emit_report(&report, format, args.out.as_deref())?;
        Ok(report.exit_code())
    });
    match run {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("verify: {e}");
            ExitCode::from(3)
        }
    }
}
