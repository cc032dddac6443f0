mod args;
mod commands;
mod report;
mod source;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};

const EXIT_RUNTIME: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Bad input or parameters, as opposed to a failure while computing.
#[derive(Debug)]
pub struct UsageError(String);

impl UsageError {
    pub fn msg(m: impl Into<String>) -> Self {
        Self(m.into())
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

impl From<specsketch::Error> for UsageError {
    fn from(e: specsketch::Error) -> Self {
        Self(e.to_string())
    }
}

fn is_usage(e: &anyhow::Error) -> bool {
    use specsketch::Error as E;
    e.chain().any(|c| {
        c.is::<UsageError>()
            || c.downcast_ref::<E>().is_some_and(|e| {
                matches!(
                    e,
                    E::InvalidParameter(_)
                        | E::DimensionMismatch { .. }
                        | E::InvalidGraph(_)
                        | E::IsolatedVertex(_)
                        | E::NegativeWeight { .. }
                        | E::Parse { .. }
                        | E::CutoffOutOfRange { .. }
                        | E::OracleCap { .. }
                )
            })
    })
}

fn fail(kind: &str, message: String, causes: Vec<String>, code: u8) -> ExitCode {
    let body = json!({ "error": { "kind": kind, "message": message, "causes": causes } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string(), Vec::new(), EXIT_USAGE),
    };

    if let Some(threads) = cli.threads {
        if threads == 0 {
            return fail("usage", "--threads must be at least 1".into(), Vec::new(), EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            return fail("runtime", e.to_string(), Vec::new(), EXIT_RUNTIME);
        }
    }
    // dense factorizations run sequentially so that outputs do not depend on scheduling
    faer::set_global_parallelism(faer::Par::Seq);

    let seed_given = cli.command.seed();
    let seed = seed_given.unwrap_or(0);
    if seed_given.is_none() && cli.command.uses_seed() && !matches!(cli.command, Command::Bench(_)) {
        log::warn!("no --seed given; using 0");
    }
    let config = json!({
        "command": cli.command.name(),
        "args": &cli.command,
        "seed": seed,
        "seed_defaulted": seed_given.is_none(),
        "threads": cli.threads,
    });

    match commands::run(&cli.command, seed, config) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let causes = e.chain().skip(1).map(ToString::to_string).collect();
            if is_usage(&e) {
                fail("usage", e.to_string(), causes, EXIT_USAGE)
            } else {
                fail("runtime", e.to_string(), causes, EXIT_RUNTIME)
            }
        }
    }
}
