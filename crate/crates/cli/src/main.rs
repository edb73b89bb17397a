use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "supamal", version, about = "Finite ordered structures with added operations")]
struct Cli {
    /// Worker threads for parallel searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for sampled output; never affects verdicts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a structure file and test the extension condition of its partial operations.
    Check { file: PathBuf },
    /// Dedekind-MacNeille completion, or the Birkhoff embedding of a distributive lattice.
    Complete {
        file: PathBuf,
        #[arg(long)]
        birkhoff: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend the partial operations of a file to total operations.
    Extend {
        file: PathBuf,
        /// Property to use instead of the declared ones, e.g. B3 or C1:n=2,i=1,j=1.
        #[arg(long)]
        property: Option<String>,
        /// Only extend this operation.
        #[arg(long)]
        op: Option<String>,
        /// Extend each operation separately, ignoring declared comparabilities.
        #[arg(long)]
        naive: bool,
        /// Largest (A1e, A2e) or smallest (A1c, A2c) extension.
        #[arg(long)]
        extremal: bool,
        /// Extend inside the MacNeille completion of the structure.
        #[arg(long)]
        complete: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Superamalgamate A and B over C; writes D.json and interpolants.json.
    Amalgamate {
        a: PathBuf,
        b: PathBuf,
        c: PathBuf,
        #[arg(long)]
        kind: String,
        /// Keep and extend the added operations.
        #[arg(long)]
        expanded: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// The free join-semilattice with a closure operation on n generators.
    Free {
        #[arg(long)]
        gens: usize,
        #[arg(long, default_value_t = supamal_core::freealg::DEFAULT_GENERATOR_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Word problem for join-semilattices with a closure operation K.
    Eq {
        left: String,
        right: String,
        /// Largest model searched for a separating countermodel.
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stages of a Fraisse chain; writes stage_<i>.json and queue.txt.
    Fraisse {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        property: Vec<String>,
        /// Names of the added operations, in the order of --property (default K, K2, ...).
        #[arg(long)]
        op: Vec<String>,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 2)]
        cap: usize,
        /// Structure generated by the empty set, needed for bounded kinds.
        #[arg(long)]
        root: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Decide whether a universal sentence follows from a theory with added operations.
    Decide {
        #[arg(long)]
        theory: String,
        /// `name:property`, repeatable.
        #[arg(long)]
        ops: Vec<String>,
        sentence: String,
        /// Use exhaustive search over models of at most this size instead.
        #[arg(long)]
        brute: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List structures of a kind and size up to isomorphism.
    Enumerate {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        size: usize,
        /// Print only this many, chosen with --seed.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is built once");
    }
    match commands::run(cli.command, cli.seed) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
