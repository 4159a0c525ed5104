//! `ordlab`: command-line front end. Human summaries go to standard output,
//! JSON reports to `--report` (or standard output with `--json`).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

#[derive(Parser, Debug)]
#[command(
    name = "ordlab",
    version,
    about = "Left-orders, cone search and slope detection for groups with peripheral tori"
)]
pub struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Worker threads; outputs do not depend on it.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Omit the `generated_at` field so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a presentation and show the recognised family.
    Parse { file: PathBuf },
    /// Sizes (and optionally elements) of Cayley balls.
    Ball {
        file: PathBuf,
        #[arg(long, short)]
        radius: usize,
        #[arg(long)]
        list: bool,
    },
    /// Enumerate positive-cone snapshots on a ball.
    ConeSearch {
        file: PathBuf,
        #[arg(long, short)]
        radius: usize,
        /// Peripheral line constraint `T:<slope>[:<side>]`.
        #[arg(long)]
        line: Vec<String>,
        /// Sign constraint `<word>:+` or `<word>:-`.
        #[arg(long)]
        sign: Vec<String>,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
        #[arg(long, default_value_t = 2_000_000)]
        node_cap: usize,
        /// Write the refutation certificate here when the search is unsatisfiable.
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// The line orders of ℤ² for a slope.
    ClassifyZ2 {
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long, short, default_value_t = 1)]
        radius: usize,
    },
    /// Slope estimate of an order on a peripheral torus.
    Slope {
        file: PathBuf,
        #[arg(long)]
        order: String,
        #[arg(long, default_value = "T")]
        peripheral: String,
        #[arg(long, short, default_value_t = 4)]
        radius: usize,
    },
    /// Weak, regular or strong detection of a slope.
    Detect {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        slope: String,
        #[arg(long, value_enum, default_value_t = Level::Weak)]
        level: Level,
        #[arg(long)]
        order: Option<String>,
        /// Epimorphism for strong detection; `ab` is the canonical map to ℤ.
        #[arg(long)]
        epi: Option<String>,
        #[arg(long, default_value = "T")]
        peripheral: String,
        #[arg(long, short, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 3)]
        r_conj: usize,
        /// Also search for a radius-`r` exclusion certificate.
        #[arg(long)]
        exclude: bool,
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
        /// Slope-circle plot.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Cofinality of an element, or boundary cofinality of a peripheral torus.
    Cofinal {
        file: PathBuf,
        #[arg(long)]
        order: String,
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        boundary: bool,
        #[arg(long, default_value = "T")]
        peripheral: String,
        #[arg(long, short, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        n_max: Option<i64>,
        /// Cross-check against the fixed points of a dynamic realisation.
        #[arg(long)]
        realise: bool,
    },
    /// Piecewise-linear dynamic realisation on a window.
    Dynreal {
        file: PathBuf,
        #[arg(long)]
        order: String,
        #[arg(long, short, default_value_t = 3)]
        radius: usize,
        /// Elements whose fixed points are reported.
        #[arg(long)]
        element: Vec<String>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Gluing coherence over a gluing graph.
    Glue {
        file: PathBuf,
        /// Slopes per torus, e.g. `l,l` or `0/1,1/0`.
        #[arg(long, allow_hyphen_values = true)]
        assign: String,
        #[arg(long, short, default_value_t = 3)]
        radius: usize,
        #[arg(long, default_value_t = 3)]
        r_conj: usize,
        /// Also run the restriction compatibility check on each edge at this radius.
        #[arg(long)]
        compat: Option<usize>,
    },
    /// Search for a certificate that no left-order exists.
    CertifyNonorderable {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_radius: usize,
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Weak,
    Regular,
    Strong,
}

/// Exit codes: one per error class.
mod exit {
    pub const SYNTAX: u8 = 3;
    pub const IO: u8 = 4;
    pub const RESOURCE: u8 = 5;
    pub const INVALID: u8 = 6;
    pub const OTHER: u8 = 1;
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<ordlab::Error>() {
        return match e {
            ordlab::Error::Syntax { .. }
            | ordlab::Error::UndeclaredGenerator(_)
            | ordlab::Error::DuplicateGenerator(_) => exit::SYNTAX,
            ordlab::Error::ResourceLimit(_) => exit::RESOURCE,
            ordlab::Error::Invalid(_) | ordlab::Error::Unsupported(_) => exit::INVALID,
            _ => exit::OTHER,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return exit::IO;
    }
    exit::OTHER
}

fn emit(global: &Global, command: &str, outcome: Outcome) -> anyhow::Result<()> {
    let mut report = outcome.report;
    report["command"] = command.into();
    if !global.no_timestamp {
        report["generated_at"] = chrono::Utc::now().to_rfc3339().into();
    }
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(path) = &global.report {
        std::fs::write(path, &text)?;
    }
    for (path, contents) in &outcome.files {
        std::fs::write(path, contents)?;
    }
    if global.json {
        print!("{text}");
    } else {
        print!("{}", outcome.summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.global.jobs as usize;
    // the global pool only serves the per-conjugate sweeps; searches size their own
    let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    let name = commands::name(&cli.command);
    let result = commands::run(&cli.command, jobs).and_then(|o| emit(&cli.global, name, o));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
