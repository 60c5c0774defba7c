//! The `kgddi` command line: graph statistics, KGE training, evaluation and
//! export, and relation-classification training, evaluation and prediction.
//!
//! Exit codes: 0 on success (including `--help`), 1 for usage and validation
//! errors, 2 for I/O errors.

mod args;
mod commands;
pub mod config;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

/// Maps an error chain to an exit code: I/O failures anywhere in the chain
/// give [`EXIT_IO`], everything else [`EXIT_INVALID`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<kgddi_core::Error>() {
            return if e.is_io() { EXIT_IO } else { EXIT_INVALID };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return EXIT_IO;
        }
    }
    EXIT_INVALID
}

fn init_logging() {
    let env = env_logger::Env::default().default_filter_or("info");
    let _ = env_logger::Builder::from_env(env)
        .format_timestamp(None)
        .format_target(false)
        .try_init();
}

pub fn dispatch(command: &Command) -> anyhow::Result<()> {
    log::info!("{} resolved configuration: {command:?}", command.name());
    match command {
        Command::KgStats(a) => commands::kg_stats(a),
        Command::KgeTrain(a) => commands::kge_train(a),
        Command::KgeEval(a) => commands::kge_eval(a),
        Command::KgeExport(a) => commands::kge_export(a),
        Command::RcTrain(a) => commands::rc_train(a),
        Command::RcEval(a) => commands::rc_eval(a),
        Command::RcPredict(a) => commands::rc_predict(a),
    }
}

/// Runs one invocation and returns its exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    init_logging();
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return exit_code(&e);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
