mod commands;
mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Scope, StatsSource};
use output::Report;
use qrp_core::verify::{Fault, Suite};
use qrp_core::{ClassFilter, CurveSpec, FieldDegree, PatternWord};

/// Quadratic residue patterns, curve traces, surface and graph counts over prime fields.
#[derive(Parser)]
#[command(name = "qrp", version)]
struct Cli {
    /// Worker threads; defaults to the available hardware threads.
    #[arg(long, global = true, env = "QRP_THREADS", value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Inclusive prime range, as LO..HI.
    #[arg(long, value_parser = parse_range)]
    range: Option<(u64, u64)>,

    /// Residue class of p mod 4: all, 1 or 3.
    #[arg(long, default_value = "all")]
    class: ClassFilter,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Allow ranges beyond the documented caps.
    #[arg(long)]
    force: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Scan counts of R/N words against the character-sum formula.
    Patterns {
        #[command(flatten)]
        common: Common,
        /// Word to count, e.g. RRN; repeatable. Defaults to every word of --length.
        #[arg(long)]
        word: Vec<PatternWord>,
        #[arg(long, default_value_t = 2)]
        length: usize,
    },
    /// Frobenius traces of y^2 = f(x).
    Curves {
        #[command(flatten)]
        common: Common,
        /// E0..E4, x3-x, or T followed by shift digits (T124).
        #[arg(long, default_value = "E0")]
        curve: String,
        /// Extension degree of the field: 1 or 2.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        field: u32,
    },
    /// Jacobsthal sums J and the partner b with J^2 + b^2 = 4p.
    Jacobsthal {
        #[command(flatten)]
        common: Common,
    },
    /// Point counts of the K3 surface and its auxiliary varieties.
    Surface {
        #[command(flatten)]
        common: Common,
    },
    /// Residue-graph class counts on 4-subsets (p = 1 mod 4).
    Graphs {
        #[command(flatten)]
        common: Common,
    },
    /// Histograms and KS distances of normalized traces or the R^4 statistic.
    Stats {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "r4")]
        curve: Option<String>,
        /// Use the normalized n_p(RRRR) statistic instead of curve traces.
        #[arg(long)]
        r4: bool,
        /// semicircle, arcsine, lambda-cm, dirac0, mu1 or mu3.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..=10_000))]
        bins: u32,
    },
    /// Run identity suites and report counterexamples.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run; repeatable. Defaults to all of them.
        #[arg(long)]
        suite: Vec<Suite>,
        #[arg(long, hide = true)]
        fault_inject: Option<Fault>,
    },
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: u64 = lo
        .trim()
        .parse()
        .map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u64 = hi
        .trim()
        .parse()
        .map_err(|e| format!("bad upper bound: {e}"))?;
    if lo < 3 {
        return Err("lower bound must be at least 3".into());
    }
    if hi < lo {
        return Err("upper bound must not be below the lower bound".into());
    }
    Ok((lo, hi))
}

fn scope(common: &Common, default: (u64, u64)) -> Scope {
    Scope {
        range: common.range.unwrap_or(default),
        class: common.class,
        force: common.force,
    }
}

fn curve(label: &str) -> Result<CurveSpec, CliError> {
    CurveSpec::from_label(label).map_err(|e| CliError::Usage(e.to_string()))
}

fn run(command: &Command) -> Result<(Report, &Common), CliError> {
    Ok(match command {
        Command::Patterns {
            common,
            word,
            length,
        } => (
            commands::patterns(&scope(common, (5, 100)), word, *length)?,
            common,
        ),
        Command::Curves {
            common,
            curve: label,
            field,
        } => {
            let ext =
                FieldDegree::from_degree(*field).map_err(|e| CliError::Usage(e.to_string()))?;
            (
                commands::curves(&scope(common, (3, 1000)), &curve(label)?, ext)?,
                common,
            )
        }
        Command::Jacobsthal { common } => (
            commands::jacobsthal_pairs(&scope(common, (5, 1000)))?,
            common,
        ),
        Command::Surface { common } => (commands::surface(&scope(common, (5, 100)))?, common),
        Command::Graphs { common } => (commands::graphs(&scope(common, (13, 200)))?, common),
        Command::Stats {
            common,
            curve: label,
            r4,
            reference,
            bins,
        } => {
            let source = if *r4 {
                StatsSource::R4
            } else {
                StatsSource::Curve(curve(label.as_deref().unwrap_or("E0"))?)
            };
            let s = scope(common, (3, 100_000));
            (
                commands::stats(&s, &source, reference.as_deref(), *bins as usize)?,
                common,
            )
        }
        Command::Verify {
            common,
            suite,
            fault_inject,
        } => (
            commands::verify(suite, common.range, common.force, *fault_inject)?,
            common,
        ),
    })
}

fn emit(report: &Report, common: &Common) -> std::io::Result<()> {
    let body = match common.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.to_json(),
    };
    match &common.out {
        Some(path) => fs::write(path, body),
        None => std::io::stdout().lock().write_all(body.as_bytes()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let (report, common) = match run(&cli.command) {
        Ok(r) => r,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Core(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = emit(&report, common) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    if report.failures.is_empty() {
        return ExitCode::SUCCESS;
    }
    let mut err = std::io::stderr().lock();
    for f in &report.failures {
        let _ = writeln!(
            err,
            "{}",
            serde_json::to_string(f).expect("failure serializes")
        );
    }
    ExitCode::from(1)
}
