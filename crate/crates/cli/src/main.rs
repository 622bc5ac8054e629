mod args;
mod commands;
mod error;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Context, Outcome};
use error::CliError;

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("OU_DESIGN_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("OU_DESIGN_THREADS must be a count, got {value:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::validation(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Option<CliError>, CliError> {
    configure_threads()?;
    let ctx = Context {
        common: &cli.common,
        invocation: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
    };
    let Outcome { emission, after } = match &cli.command {
        Command::Fim(a) => commands::fim(&ctx, a)?,
        Command::Optimize(a) => commands::optimize(&ctx, a)?,
        Command::Surface(a) => commands::surface(&ctx, a)?,
        Command::Simulate(a) => commands::simulate(&ctx, a)?,
    };
    let text = emission.render(cli.common.format);
    match &cli.common.output {
        Some(path) => output::write_atomic(path, &text)?,
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(format!("stdout: {e}")))?,
    }
    Ok(after)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::validation(first).to_json_line());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(e) => {
            eprintln!("{}", e.to_json_line());
            ExitCode::from(e.code)
        }
    }
}
