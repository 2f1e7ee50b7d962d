use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hhfactor_cli::commands::{
    self, ApplyArgs, BenchArgs, BoundArgs, DecomposeArgs, RecoverArgs, SweepArgs, SynthArgs,
};
use hhfactor_cli::{Outcome, Result};

#[derive(Parser, Debug)]
#[command(
    name = "hhfactor",
    version,
    about = "Householder factorization toolkit"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random product of reflectors.
    Synth(SynthArgs),
    /// Greedily factor an orthogonal matrix.
    Decompose(DecomposeArgs),
    /// Print the truncation error bound for a range of m.
    Bound(BoundArgs),
    /// Apply a factored product to the columns of a matrix.
    Apply(ApplyArgs),
    /// Recover a reflector and binary coefficients from data.
    Recover(RecoverArgs),
    /// Time factored against dense application.
    Bench(BenchArgs),
    /// Decompose a grid of generated instances in parallel.
    Sweep(SweepArgs),
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Synth(a) => commands::synth(a, cli.seed),
        Command::Decompose(a) => commands::decompose(a),
        Command::Bound(a) => commands::bound(a),
        Command::Apply(a) => commands::apply(a),
        Command::Recover(a) => commands::recover_cmd(a),
        Command::Bench(a) => commands::bench(a, cli.seed),
        Command::Sweep(a) => commands::sweep(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            match cli.format {
                Format::Text => println!("{}", outcome.report),
                Format::Json => match serde_json::to_string_pretty(&outcome.report) {
                    Ok(s) => println!("{s}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(hhfactor_cli::exit::INVALID_INPUT);
                    }
                },
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
