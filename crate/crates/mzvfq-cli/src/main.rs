mod commands;
mod error;
mod golden;
mod suites;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{
    CoproductArgs, Outcome, PolylogArgs, RelationArgs, SpecialArgs, TmoduleArgs, TriplesArgs, ZetaArgs,
};
use crate::error::{CliError, CliResult};
use crate::suites::VerifyArgs;

/// Carlitz multiple zeta values, star polylogarithms and t-module logarithms over F_q[θ].
#[derive(Debug, Parser)]
#[command(name = "mzvfq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// D_i, L_i, Γ_n or the Anderson–Thakur polynomial H_n.
    Special(SpecialArgs),
    /// Li_s(u) or Li*_s(u) at the infinite place or at a finite place v.
    Polylog(PolylogArgs),
    /// The triples (b, s, u) expressing Γ_s ζ_A(s) through star polylogarithms.
    Triples(TriplesArgs),
    /// G_{s,u} for a given point, or the coproduct G_s when no point is given.
    Tmodule(TmoduleArgs),
    /// The coproduct G_s, its special point and the logarithmic vector Z_s.
    Coproduct(CoproductArgs),
    /// ζ_A(s) at the infinite place or ζ_A(s)_v at a finite place.
    Zeta(ZetaArgs),
    /// Checks a k-linear relation among MZVs at ∞ and at v, or searches for one.
    Relation(RelationArgs),
    /// Runs a verification suite and reports per-check residuals.
    Verify(VerifyArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("MZVFQ_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("MZVFQ_THREADS must be a positive integer, found {raw:?}")))?;
    if threads == 0 {
        return Err(CliError::Usage("MZVFQ_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn run(command: Command) -> CliResult<Outcome> {
    configure_threads()?;
    match command {
        Command::Special(args) => commands::special(&args),
        Command::Polylog(args) => commands::polylog(&args),
        Command::Triples(args) => commands::triples(&args),
        Command::Tmodule(args) => commands::tmodule(&args),
        Command::Coproduct(args) => commands::coproduct(&args),
        Command::Zeta(args) => commands::zeta(&args),
        Command::Relation(args) => commands::relation(&args),
        Command::Verify(args) => suites::verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(outcome) => {
            // A closed pipe downstream is not a failure of the computation.
            let _ = writeln!(std::io::stdout().lock(), "{}", outcome.render());
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
