use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stpconv_cli::job::reference_cases;
use stpconv_cli::{reference_report, run, CliError, JobSpec};

#[derive(Debug, Parser)]
#[command(
    name = "stpconv",
    version,
    about = "Padding-free and classical convolution of masked grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one convolution job.
    Run(JobSpec),
    /// Recompute the built-in reference cases and report deviations.
    PaperExamples,
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(job) => {
            if let Some(text) = run(&job)? {
                std::io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    })?;
            }
            Ok(())
        }
        Command::PaperExamples => {
            let reports = reference_cases()?;
            let (text, failed) = reference_report(&reports);
            print!("{text}");
            if failed > 0 {
                return Err(CliError::ReferenceMismatch {
                    failed,
                    total: reports.len(),
                });
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let e = CliError::Usage(
                msg.lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .to_string(),
            );
            eprintln!("{e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
