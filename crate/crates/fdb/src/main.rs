use std::io::{self, BufWriter, Write};
use std::process::exit;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use fdb::cli::{self, CliError, DeriveArgs, Kind, Limits, Method};

const AFTER_HELP: &str = "\
Expression grammar (--f, --g):
  expr   := term ((\"+\" | \"-\") term)*
  term   := factor ((\"*\" | \"/\") factor)*
  factor := \"-\" factor | base (\"^\" int)?
  base   := number | \"x\" | name \"(\" expr \")\" | \"(\" expr \")\"
  name   := exp | ln | sin | cos
  number := integer or integer\"/\"integer (a rational literal; no floats)

Unary minus binds looser than \"^\" (-x^2 is -(x^2)); \"^\" is
non-associative and takes an integer literal, possibly negated. An integer
immediately followed by \"/\" and a digit is one rational literal (7/2),
while spaced division (7 / 2) is the operator; both evaluate identically.
exp/ln/sin/cos need --kind float.

Environment: FDB_MAX_ENUM and FDB_MAX_ORDER mirror --max-enum/--max-order
(flags win). Exit codes: 0 success, 1 input error, 2 resource cap,
3 consistency failure.";

#[derive(Parser)]
#[command(
    name = "fdb",
    version,
    about = "Arbitrary-order derivatives of f(g(x)): set-partition sum, closed form, and a series oracle",
    after_help = AFTER_HELP
)]
struct Cli {
    /// Emit exactly one JSON object on stdout instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Cap on set-partition enumeration (default 14; env FDB_MAX_ENUM)
    #[arg(long, global = true, value_name = "N")]
    max_enum: Option<usize>,

    /// Cap on derivative order and profile enumeration (default 30; env FDB_MAX_ORDER)
    #[arg(long, global = true, value_name = "N")]
    max_order: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List all set partitions of {1, ..., n} with a Bell-number cross-check
    Partitions { n: usize },
    /// List the block profiles of n with exact partition counts
    Profiles { n: usize },
    /// Compute the order-n derivative of f(g(x)) at a point
    Derive {
        /// Outer function, e.g. "x^2" or "exp(x)"
        #[arg(long)]
        f: String,
        /// Inner function, e.g. "x+1" or "sin(x)"
        #[arg(long)]
        g: String,
        /// Evaluation point (exact kind: "p/q"; float kind: any decimal)
        #[arg(long)]
        at: String,
        /// Derivative order
        #[arg(long)]
        n: usize,
        /// Which evaluation route(s) to run
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
        /// Scalar field to compute in
        #[arg(long, value_enum, default_value = "exact")]
        kind: Kind,
    },
    /// Run the bijection-coverage, count-identity and evaluator-equivalence suites
    Check {
        /// Check levels/orders strictly below (coverage, counts) or up to (equivalence) this bound
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Random sequence pairs per order in the equivalence suite
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// RNG seed; identical seeds give identical runs
        #[arg(long, default_value_t = 0x0fdb)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Time the three evaluation routes on fixed seeded rational inputs
    Bench {
        /// Derivative order to bench
        #[arg(long)]
        n: usize,
        /// Timed repetitions per method
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), CliError> {
    let limits = Limits::resolve(cli.max_enum, cli.max_order)?;
    match cli.command {
        Command::Partitions { n } => cli::cmd_partitions(n, cli.json, limits, out),
        Command::Profiles { n } => cli::cmd_profiles(n, cli.json, limits, out),
        Command::Derive {
            f,
            g,
            at,
            n,
            method,
            kind,
        } => cli::cmd_derive(
            &DeriveArgs {
                f: &f,
                g: &g,
                at: &at,
                n,
                method,
                kind,
            },
            cli.json,
            limits,
            out,
        ),
        Command::Check {
            n_max,
            trials,
            seed,
            inject_fault,
        } => cli::cmd_check(n_max, trials, seed, inject_fault, cli.json, out),
        Command::Bench { n, reps } => cli::cmd_bench(n, reps, cli.json, limits, out),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                exit(0);
            }
            // Usage errors are input errors; clap's default exit code of 2
            // would collide with the resource-cap code.
            eprint!("{e}");
            exit(1);
        }
    };
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    if let Err(e) = out.flush() {
        eprintln!("error: {e}");
        exit(1);
    }
    if let Err(e) = result {
        eprintln!("error: {e}");
        exit(e.exit_code());
    }
}
