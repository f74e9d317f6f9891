//! `lerw <subcommand> [--config file] [--key value]...`
//!
//! Writes the CSV table to `--output` (or stdout) and the JSON summary to
//! `--summary`, next to the CSV with a `.json` extension, or to stderr.
//! Exit codes: 0 success, 2 bad configuration, 3 infeasible schedule, 1 other.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};
use lerw_core::experiment::{parse_config, run_experiment, RunResult, Subcommand, KEYS};
use lerw_core::Error;

fn cli() -> Command {
    let subcommands: Vec<&'static str> = Subcommand::ALL.iter().map(|s| s.name()).collect();
    let mut cmd = Command::new("lerw")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Seeded loop-erased random walk and Rayleigh process experiments")
        .arg(
            Arg::new("subcommand")
                .value_parser(subcommands)
                .help("Pipeline to run; may instead be given in the config file"),
        )
        .arg(Arg::new("config").long("config").value_name("FILE").help("File of key=value lines"));
    for &key in KEYS.iter().filter(|&&k| k != "subcommand") {
        cmd = cmd.arg(Arg::new(key).long(key).value_name("VALUE").action(ArgAction::Set));
    }
    cmd
}

fn run() -> Result<(), Error> {
    let matches = cli().get_matches();
    let text = match matches.get_one::<String>("config") {
        Some(path) => fs::read_to_string(path)?,
        None => String::new(),
    };
    let mut flags: Vec<(String, String)> = Vec::new();
    for &key in KEYS {
        if let Some(v) = matches.get_one::<String>(key) {
            flags.push((key.to_string(), v.clone()));
        }
    }
    let cfg = parse_config(&text, &flags)?;
    let result = run_experiment(&cfg)?;
    eprintln!("lerw: {} finished in {:.3} s", cfg.subcommand, result.wall_clock.as_secs_f64());
    emit(&result, cfg.output.as_ref(), cfg.summary.as_ref())
}

fn emit(result: &RunResult, output: Option<&PathBuf>, summary: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => result.write_csv(path)?,
        None => print!("{}", result.to_csv()?),
    }
    match (summary, output) {
        (Some(path), _) => result.write_summary(path)?,
        (None, Some(csv)) => result.write_summary(&csv.with_extension("json"))?,
        (None, None) => eprint!("{}", result.summary_json()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lerw: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
