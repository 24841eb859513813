use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bmetric::commands::{write_records_csv, write_verification_csv};
use bmetric::{cmd_describe, cmd_sweep, cmd_verify, parse_config, CliError, OutputFormat};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bmetric",
    version,
    about = "Describe, verify and sweep almost contact B-metric constructions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-point structure, class and curvature report.
    Describe(CommonArgs),
    /// Check every closed-form identity; exit 1 if any gating check fails.
    Verify(CommonArgs),
    /// Curvature scalars along a grid in t (needs a `sweep` block).
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

enum Outcome {
    Pass,
    Fail,
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: serde::Serialize>(value: &T, mut w: Box<dyn Write>) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(command: Command) -> Result<Outcome, CliError> {
    let (args, default_format) = match &command {
        Command::Describe(a) | Command::Verify(a) => (a, Format::Json),
        Command::Sweep(a) => (a, Format::Csv),
    };
    let text = std::fs::read_to_string(&args.config).map_err(|source| CliError::Read {
        path: args.config.display().to_string(),
        source,
    })?;
    let config = parse_config(&text)?;
    let format = args
        .format
        .or(config.output.map(Format::from))
        .unwrap_or(default_format);
    // validate the grid before creating the output file
    if let Command::Sweep(_) = command {
        config.sweep_points()?;
    }
    let out = open_output(&args.out)?;

    match command {
        Command::Describe(_) => {
            let report = cmd_describe(&config);
            match format {
                Format::Json => write_json(&report, out)?,
                Format::Csv => write_records_csv(&report.points, out)?,
            }
            Ok(Outcome::Pass)
        }
        Command::Verify(_) => {
            let (report, ok) = cmd_verify(&config)?;
            match format {
                Format::Json => write_json(&report, out)?,
                Format::Csv => write_verification_csv(&report, out)?,
            }
            if ok {
                Ok(Outcome::Pass)
            } else {
                eprintln!("verification failed: {}", report.failures().join(", "));
                Ok(Outcome::Fail)
            }
        }
        Command::Sweep(_) => {
            let rows = cmd_sweep(&config)?;
            match format {
                Format::Json => write_json(&rows, out)?,
                Format::Csv => write_records_csv(&rows, out)?,
            }
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
