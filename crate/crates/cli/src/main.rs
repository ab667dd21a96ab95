mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nonrep::solver::VertexOrder;

/// Non-repetitive graph colouring experiments.
///
/// Exit status: 0 success (valid, SAT), 1 falsified (witness found, UNSAT),
/// 2 input error, 3 budget exhausted. Set NONREP_LOG=debug for progress.
#[derive(Debug, Parser)]
#[command(name = "nonrep", version)]
struct Cli {
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Worker threads; more than one turns on the parallel search.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify a colouring, printing VALID or a repetitive path.
    Check {
        graph: PathBuf,
        colouring: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// Search for a non-repetitive colouring with a given number of colours.
    Solve {
        graph: PathBuf,
        #[arg(long, short = 'k')]
        colours: usize,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, value_enum, default_value_t = Order::Connected)]
        order: Order,
        /// Write the colouring here on SAT.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Smallest number of colours admitting a non-repetitive colouring.
    ThueNumber {
        graph: PathBuf,
        /// Give up above this many colours.
        #[arg(long = "colours", short = 'k', default_value_t = 8)]
        max_colours: usize,
        #[command(flatten)]
        budget: Budget,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Non-repetitive face colouring of an outerplanar map.
    Faces {
        /// Embedding file (or a graph file carrying one).
        #[arg(required_unless_present = "random")]
        embedding: Option<PathBuf>,
        /// Use a random outerplanar map on this many polygon vertices.
        #[arg(long, conflicts_with = "embedding")]
        random: Option<usize>,
        /// Probability of keeping each chord of the random triangulation.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Emit a named graph: theorem2, theorem3, path-N, fan-N.
    Gadget {
        name: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Decide a gadget's colourability by profile composition.
    Certify {
        #[arg(value_parser = ["theorem2", "theorem3"])]
        gadget: String,
        #[arg(long, short = 'k')]
        colours: usize,
        #[command(flatten)]
        budget: Budget,
        /// Skip the failed-state memo.
        #[arg(long)]
        no_dedup: bool,
        /// Also run the flat solver and compare verdicts.
        #[arg(long)]
        cross_check: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Square-free word utilities.
    #[command(subcommand)]
    Words(WordsCommand),
}

#[derive(Debug, Subcommand)]
enum WordsCommand {
    /// Prefix of the ternary Thue word.
    Thue { length: usize },
    /// Leftmost shortest square in a word such as 0102 or "0 1 0 2".
    Square { word: String },
}

#[derive(Debug, Clone, Copy, Args)]
struct Budget {
    /// Stop after this many search nodes.
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Order {
    Connected,
    ForestBfs,
    Natural,
}

impl From<Order> for VertexOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Connected => VertexOrder::Connected,
            Order::ForestBfs => VertexOrder::ForestBfs,
            Order::Natural => VertexOrder::Natural,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Falsified = 1,
    InputError = 2,
    Budget = 3,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("NONREP_LOG", "warn")).init();
    let cli = Cli::parse();
    let ctx = commands::Context { format: cli.format, parallel: cli.jobs > 1 };
    if cli.jobs > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Check { graph, colouring, budget } => commands::check(&ctx, &graph, &colouring, budget.budget),
        Command::Solve { graph, colours, budget, order, output } => {
            commands::solve(&ctx, &graph, colours, budget.budget, order.into(), output.as_deref())
        }
        Command::ThueNumber { graph, max_colours, budget, output } => {
            commands::thue_number(&ctx, &graph, max_colours, budget.budget, output.as_deref())
        }
        Command::Faces { embedding, random, density, seed, output } => {
            let source = match (embedding, random) {
                (Some(path), _) => commands::MapSource::File(path),
                (None, Some(n)) => commands::MapSource::Random { n, density, seed },
                (None, None) => unreachable!("clap requires one of them"),
            };
            commands::faces(&ctx, source, output.as_deref())
        }
        Command::Gadget { name, output } => commands::gadget(&ctx, &name, output.as_deref()),
        Command::Certify { gadget, colours, budget, no_dedup, cross_check, output } => {
            commands::certify(&ctx, &gadget, colours, budget.budget, !no_dedup, cross_check, output.as_deref())
        }
        Command::Words(WordsCommand::Thue { length }) => commands::words_thue(&ctx, length),
        Command::Words(WordsCommand::Square { word }) => commands::words_square(&ctx, &word),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(Status::InputError as u8)
        }
    }
}
