use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use output::Format;

#[derive(Parser)]
#[command(
    name = "zerosum",
    version,
    about = "Weighted zero-sum combinatorics over finite abelian groups"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Group as cyclic factors, e.g. `C3^2xC9`.
    #[arg(long, global = true)]
    group: Option<String>,
    /// `unit`, `pm1`, `full`, or an explicit set such as `{1,2}`.
    #[arg(long, global = true, default_value = "pm1")]
    weights: String,
    /// Sequence literal, e.g. `(1,0)*2,(0,1)`.
    #[arg(long, global = true)]
    seq: Option<String>,
    /// Cap on search nodes and on sequences enumerated.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Result catalog to consult and update.
    #[arg(long, global = true, env = "ZEROSUM_CATALOG")]
    catalog: Option<PathBuf>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant factors and basic data of a group.
    Group {
        /// List every element with its order.
        #[arg(long)]
        enumerate: bool,
    },
    /// Weighted zero-sum counts N_{A,g}(S) for every g.
    Count,
    /// Weighted Davenport constant by exhaustive search.
    Davenport {
        /// Also check that every sequence of length D has a zero-sum subsequence.
        #[arg(long)]
        verify: bool,
    },
    /// Longest zero-sum-free sequences.
    Zsf {
        #[arg(long, default_value_t = 32)]
        limit: usize,
    },
    /// Enumerate extremal sequences, or analyze the one given by --seq.
    Extremal {
        #[arg(long)]
        min_length: Option<usize>,
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Basis-plus-disjoint-supports decomposition over C_p^r.
    StructureCheck {
        #[arg(long)]
        max_length: Option<usize>,
    },
    /// Run a named verification suite, or `all`.
    Verify {
        suite: String,
        /// Write weight-set identity findings here.
        #[arg(long)]
        findings: Option<PathBuf>,
    },
    /// Inspect or prune the result catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Clone, Copy)]
enum CatalogAction {
    Show,
    /// Drop entries whose search did not finish.
    Prune,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    let format = if cli.global.json {
        Format::Json
    } else if cli.global.csv {
        Format::Csv
    } else {
        Format::Text
    };
    match commands::run(&cli.global, &cli.command) {
        Ok((out, status)) => {
            print!("{}", out.render(format));
            ExitCode::from(status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::error_code(&e))
        }
    }
}
