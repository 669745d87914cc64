//! `gta`: compile MITL formulae, check satisfiability, model check, simulate
//! and draw zone graphs.

mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit codes: 0 empty language (UNSAT, property holds), 1 non-empty
/// (SAT, counterexample), 2 inconclusive, 3 usage or input error.
#[derive(Parser)]
#[command(name = "gta", version, about = "MITL to generalized timed automata, with zone-based liveness checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct SearchOpts {
    /// Maximum number of zone-graph nodes.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Skip the strong non-Zeno transformation.
    #[arg(long)]
    pub no_nonzeno: bool,
    /// Worker threads for successor computation (0: all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Write the zone graph in DOT format.
    #[arg(long, value_name = "FILE")]
    pub dot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a formula to a transducer and automaton and report sizes.
    Compile {
        /// Formula text; read from stdin when absent or `-`.
        formula: Option<String>,
        /// Write the transducer as JSON.
        #[arg(long, value_name = "FILE")]
        gtt: Option<PathBuf>,
        /// Write the automaton as JSON.
        #[arg(long, value_name = "FILE")]
        gta: Option<PathBuf>,
        /// Write the automaton in DOT format.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Decide satisfiability of a formula.
    CheckSat {
        formula: Option<String>,
        #[command(flatten)]
        search: SearchOpts,
        /// Write the validated lasso witness as JSON.
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
    },
    /// Check that every accepting run of a system automaton satisfies a formula.
    ModelCheck {
        /// System automaton (GTA or GTT JSON); letters are its channels.
        system: PathBuf,
        formula: Option<String>,
        #[command(flatten)]
        search: SearchOpts,
        /// Write the counterexample as JSON.
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
    },
    /// Run an automaton over a finite timed word.
    Simulate {
        /// Automaton (GTA or GTT JSON).
        automaton: PathBuf,
        /// Timed word JSON: a list of events, or a lasso object.
        word: PathBuf,
        /// Step choices JSON; when absent, a run is searched for.
        #[arg(long, value_name = "FILE")]
        choices: Option<PathBuf>,
        /// Cycle repetitions when the word is a lasso.
        #[arg(long, default_value_t = 1)]
        unroll: usize,
        /// Index into the automaton's initial list.
        #[arg(long, default_value_t = 0)]
        initial: usize,
        /// Start valuation, e.g. `x=-1,y=0`; unlisted future clocks take
        /// the release value, history clocks 0.
        #[arg(long, default_value = "")]
        v0: String,
        /// Value given to released future clocks without an explicit choice.
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        release: String,
        /// Seed for the transition order of the run search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the zone graph of an automaton.
    Zonegraph {
        /// Automaton (GTA or GTT JSON).
        automaton: PathBuf,
        #[command(flatten)]
        search: SearchOpts,
    },
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, e.g. by `head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let res = match cli.command {
        Command::Compile { formula, gtt, gta, dot } => commands::compile(formula.as_deref(), gtt, gta, dot),
        Command::CheckSat { formula, search, witness } => commands::check_sat(formula.as_deref(), &search, witness),
        Command::ModelCheck { system, formula, search, witness } => {
            commands::model_check(&system, formula.as_deref(), &search, witness)
        }
        Command::Simulate { automaton, word, choices, unroll, initial, v0, release, seed } => {
            commands::simulate(&commands::SimulateJob { automaton, word, choices, unroll, initial, v0, release, seed })
        }
        Command::Zonegraph { automaton, search } => commands::zonegraph(&automaton, &search),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
