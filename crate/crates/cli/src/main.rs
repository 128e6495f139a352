mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn run(cli: &Cli) -> anyhow::Result<()> {
    let (text, out) = match &cli.command {
        Command::Train(a) => (commands::train(a)?, &a.output.out),
        Command::Report(a) => (commands::report(a)?, &a.output.out),
        Command::Cv(a) => (commands::cv(a)?, &a.output.out),
        Command::Compare(a) => (commands::compare(a)?, &a.output.out),
        Command::Oracle(a) => (commands::oracle(a)?, &a.run.output.out),
    };
    if let Some(path) = out {
        output::write_atomic(path, &text)?;
    }
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // One line, so scripts can grep for the reason.
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
