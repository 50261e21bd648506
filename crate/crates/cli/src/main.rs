mod args;
mod commands;
mod settings;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use nea_core::Error;

use args::{Cli, Command};

/// 1 for usage and configuration, 2 for data, 3 for numerical failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 1,
        Error::Numerical(_) => 3,
        _ => 2,
    }
}

fn run(cli: &Cli) -> nea_core::Result<()> {
    let mut cfg = settings::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let cfg = &mut cfg;
    match &cli.command {
        Command::Ingest(a) => commands::ingest_cmd(cfg, a),
        Command::TrainLda(a) => commands::train_topic_cmd(cfg, a, "lda"),
        Command::TrainAtm(a) => commands::train_topic_cmd(cfg, a, "atm"),
        Command::TrainMmsgtm(a) => commands::train_topic_cmd(cfg, a, "mmsgtm"),
        Command::TrainNea(a) => commands::train_nea_cmd(cfg, a),
        Command::TrainSg(a) => commands::train_sg_cmd(cfg, a),
        Command::Smooth(a) => commands::smooth_cmd(cfg, a),
        Command::DocVectors(a) => commands::doc_vectors_cmd(cfg, a),
        Command::Coherence(a) => commands::coherence_cmd(cfg, a),
        Command::AuthorRank(a) => commands::author_rank_cmd(cfg, a),
        Command::Classify(a) => commands::classify_cmd(cfg, a),
        Command::Sweep(a) => commands::sweep_cmd(cfg, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", cli.command.stage());
            ExitCode::from(exit_code(&e))
        }
    }
}
