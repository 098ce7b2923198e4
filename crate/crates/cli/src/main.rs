use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use belltest::workbench::{
    parse_class_arg, parse_pairs_arg, parse_slack_arg, run, ExitStatus, Failure, Format, Mode, RunConfig,
};
use clap::{Parser, Subcommand, ValueEnum};

/// Local hidden-variable tests and Bell-inequality enumeration for
/// two-party detector experiments.
///
/// Exit codes: 0 success (local in test mode), 1 nonlocal, 2 input error,
/// 3 capacity exceeded, 4 verification failure.
#[derive(Parser)]
#[command(name = "belltest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the distinct deterministic vertices of a selection.
    Vertices(Common),
    /// Convert the vertices to equalities and facet inequalities, verified.
    Facets(Common),
    /// Decide whether measured data admits a local model.
    Test(Common),
}

#[derive(clap::Args)]
struct Common {
    /// Experiment class as A,B,I: detectors per party and settings.
    #[arg(long)]
    class: Option<String>,
    /// Setting pairs as a:b,... (default: all pairs).
    #[arg(long)]
    pairs: Option<String>,
    /// Data file (JSON) for test mode.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Componentwise tolerance on the reproduced table, e.g. 1/100.
    #[arg(long, default_value = "0")]
    slack: String,
    /// Largest strategy space to enumerate.
    #[arg(long)]
    cap: Option<u64>,
    /// Memory budget for facet enumeration, in bytes.
    #[arg(long)]
    mem_cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

fn config(mode: Mode, args: Common) -> Result<RunConfig, Failure> {
    let mut c = RunConfig::new(mode);
    c.class = args.class.as_deref().map(parse_class_arg).transpose()?;
    c.pairs = args.pairs.as_deref().map(parse_pairs_arg).transpose()?;
    c.data = args.data;
    c.slack = parse_slack_arg(&args.slack)?;
    if let Some(cap) = args.cap {
        c.cap = cap;
    }
    if let Some(m) = args.mem_cap {
        c.memory_cap = m;
    }
    c.format = match args.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    c.out = args.out;
    Ok(c)
}

fn execute(cli: Cli) -> Result<ExitStatus, Failure> {
    let (mode, args) = match cli.command {
        Command::Vertices(a) => (Mode::Vertices, a),
        Command::Facets(a) => (Mode::Facets, a),
        Command::Test(a) => (Mode::Test, a),
    };
    let config = config(mode, args)?;
    let outcome = run(&config)?;
    match &config.out {
        Some(path) => fs::write(path, &outcome.artifact)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.artifact.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::input(format!("cannot write output: {e}")))?;
        }
    }
    eprintln!("{}", outcome.summary);
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let status = match execute(Cli::parse()) {
        Ok(s) => s,
        Err(f) => {
            eprintln!("error: {f}");
            f.status
        }
    };
    ExitCode::from(status.code() as u8)
}
