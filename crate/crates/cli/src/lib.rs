//! The `regseq` command line: argument parsing, configuration, and rendering of
//! library results as JSON lines, CSV, or plain text.

pub mod args;
pub mod commands;
pub mod config;
pub mod failure;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, OutputFormat};
use commands::Outcome;
use config::{RunConfig, CONFIG_ENV};
use failure::{Failure, EXIT_OK, EXIT_USAGE};

fn render(outcome: &Outcome, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        OutputFormat::Json => {
            for record in &outcome.records {
                writeln!(out, "{record}")?;
            }
        }
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
            for r in &outcome.csv {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        OutputFormat::Human => writeln!(out, "{}", outcome.human)?,
    }
    Ok(())
}

/// Runs the command line `argv` (program name first) with the config file taken
/// from `REGSEQ_CONFIG`, returning the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let path = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
    run_with_config(argv, path, out, err)
}

/// As [`run`], with an explicit config file path.
pub fn run_with_config<I, T>(argv: I, config: Option<PathBuf>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    let f = Failure::usage(e.kind().to_string());
                    let _ = writeln!(out, "{}", f.record());
                    EXIT_USAGE
                }
            };
        }
    };
    let cfg = match RunConfig::load(config.as_deref(), &cli.common) {
        Ok(cfg) => cfg,
        Err(msg) => return fail(Failure::usage(msg), OutputFormat::Json, out, err),
    };
    match commands::execute(&cli.command, &cfg, err) {
        Ok(outcome) => {
            if !outcome.timings.is_empty() {
                let _ = writeln!(err, "{}", json!({ "timings": outcome.timings }));
            }
            if let Err(e) = render(&outcome, cfg.output, out) {
                let _ = writeln!(err, "regseq: cannot write output: {e}");
                return EXIT_USAGE;
            }
            outcome.exit
        }
        Err(f) => fail(f, cfg.output, out, err),
    }
}

fn fail(f: Failure, format: OutputFormat, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "regseq: {}: {}", f.class.name(), f.message);
    if format == OutputFormat::Json {
        let _ = writeln!(out, "{}", f.record());
    }
    f.class.exit_code()
}
