//! `cerny-lab`: command-line access to the exact synchronizing-automata
//! toolkit.
//!
//! Exit codes: 0 on success, 1 when the answer is negative (no reset word,
//! a conjecture violated, a bound exceeded), 2 on usage or input errors.

mod commands;
mod input;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cerny-lab", version, about = "Exact analysis of synchronizing automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// An automaton file, `-` for stdin, or a builtin: `cerny:N`, `tr:N`,
/// `random:N:M:SEED`.
type Input = String;

#[derive(Subcommand)]
enum Command {
    /// Parse an automaton and report its basic properties.
    Validate {
        input: Input,
        #[arg(long)]
        json: bool,
    },
    /// Print a generated automaton in the text format.
    Gen {
        #[arg(value_enum)]
        family: Family,
        n: usize,
        /// Number of letters (random family only).
        m: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Shortest reset word (lexicographically first among the shortest).
    ResetWord {
        input: Input,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Triple rendezvous time with a witness word.
    Trt {
        input: Input,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Shortest word merging `ell` states.
    TEll {
        input: Input,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// The reachable column matrix A(t).
    Columns {
        input: Input,
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value_t = ColumnFormat::Matrix)]
        format: ColumnFormat,
        #[arg(long)]
        json: bool,
    },
    /// The synchronizing probability function k(0..=t_max).
    Spf {
        input: Input,
        #[arg(long)]
        t_max: usize,
        /// Write CSV to a file, or `-` for stdout.
        #[arg(long)]
        csv: Option<String>,
        /// Also compute the dimension of Player One's optimal set.
        #[arg(long)]
        dim_q: bool,
        #[arg(long)]
        json: bool,
    },
    /// Optimal strategies, critical columns and canonical support at `t`.
    Strategies {
        input: Input,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        json: bool,
    },
    /// Closed-form bounds on T_3, optionally against measured values.
    Bounds {
        input: Input,
        #[arg(long)]
        measure: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check the SPF and T_3 conjectures.
    CheckConjectures {
        input: Input,
        #[arg(long)]
        t_max: usize,
        #[arg(long)]
        json: bool,
    },
    /// Play the game by simulation.
    GameSim {
        input: Input,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        rounds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `optimal`, `uniform`, or a JSON file with `p` and `q`.
        #[arg(long, default_value = "optimal")]
        strategy: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Cerny,
    Tr,
    Random,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColumnFormat {
    Matrix,
    Csv,
}

/// Failures that end the run with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// Exit status of a completed command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Negative,
}

fn configure_threads() {
    if let Some(n) = std::env::var("CERNY_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn run(cli: Cli) -> Result<Verdict, UsageError> {
    use commands as c;
    match cli.command {
        Command::Validate { input, json } => c::validate(&input, json),
        Command::Gen { family, n, m, seed } => c::gen(family, n, m, seed),
        Command::ResetWord { input, cap, json } => c::reset_word(&input, cap, json),
        Command::Trt { input, cap, json } => c::t_ell(&input, 3, cap, json, "trt"),
        Command::TEll { input, ell, cap, json } => c::t_ell(&input, ell, cap, json, "t-ell"),
        Command::Columns { input, t, format, json } => c::columns(&input, t, format == ColumnFormat::Csv, json),
        Command::Spf {
            input,
            t_max,
            csv,
            dim_q,
            json,
        } => c::spf(&input, t_max, csv.map(PathBuf::from), dim_q, json),
        Command::Strategies { input, t, json } => c::strategies(&input, t, json),
        Command::Bounds { input, measure, json } => c::bounds(&input, measure, json),
        Command::CheckConjectures { input, t_max, json } => c::check_conjectures(&input, t_max, json),
        Command::GameSim {
            input,
            t,
            rounds,
            seed,
            strategy,
            json,
        } => c::game_sim(&input, t, rounds, seed, &strategy, json),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Ok) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
