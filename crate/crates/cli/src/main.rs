use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "entropchain", version, about = "Proof-of-work chain with entropy-scored image nonces")]
struct Cli {
    /// Output style. `records` prints one JSON object per command on stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Text,
    Records,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NonceMode {
    Random,
    Image,
}

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    /// Chain file, one tab-separated record per block.
    #[arg(long, env = "ENTROPCHAIN_CHAIN", default_value = "chain.tsv")]
    pub chain: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct PolicyArgs {
    /// Number of leading '0' characters required in the encoded hash.
    #[arg(long, default_value_t = 3)]
    pub difficulty: u32,

    #[arg(long, value_enum, default_value_t = NonceMode::Random)]
    pub mode: NonceMode,

    /// Minimum complexity score (exclusive) for image nonces.
    #[arg(long, env = "ENTROPCHAIN_THRESHOLD", default_value_t = 500)]
    pub threshold: u64,
}

#[derive(Args, Debug, Clone)]
pub struct GrowthArgs {
    #[arg(long, default_value_t = 19_200)]
    pub image_bytes: u64,

    #[arg(long, default_value_t = 800)]
    pub max_data_bytes: u64,

    #[arg(long, default_value_t = 10.0)]
    pub interval_minutes: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extend the chain by `--count` blocks, creating a genesis block if needed.
    Mine {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        /// Directory of candidate nonce images (image mode).
        #[arg(long)]
        image_dir: Option<PathBuf>,
        /// Data text for new blocks. Defaults to "block<height>".
        #[arg(long)]
        data: Option<String>,
        #[arg(long, default_value_t = 10)]
        count: u64,
        /// Worker threads. Defaults to the machine's parallelism.
        #[arg(long)]
        workers: Option<usize>,
        /// Seconds between progress lines.
        #[arg(long, default_value_t = 1.0)]
        progress_interval: f64,
        /// Print whole nonces instead of a shortened prefix.
        #[arg(long)]
        full_nonce: bool,
    },
    /// Check every block: hash, work, links, heights and the nonce policy.
    Validate {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Print the complexity score of an image after resizing to 80x80.
    Score {
        image: PathBuf,
        /// Write luma, first- and second-degree entropy maps as PNGs here.
        #[arg(long)]
        export_maps: Option<PathBuf>,
    },
    /// Classify one image as INTERESTING or NONINTERESTING.
    Classify {
        image: PathBuf,
        #[arg(long, env = "ENTROPCHAIN_THRESHOLD", default_value_t = 500)]
        threshold: u64,
        #[arg(long, default_value_t = entropchain_core::eval::DEFAULT_TOP_THRESHOLD)]
        top: u64,
    },
    /// Evaluate the classifier on `<root>/interesting` and `<root>/uninteresting`.
    Eval {
        #[arg(long)]
        root: PathBuf,
        #[arg(long, env = "ENTROPCHAIN_THRESHOLD", default_value_t = 500)]
        threshold: u64,
        #[arg(long, default_value_t = entropchain_core::eval::DEFAULT_TOP_THRESHOLD)]
        top: u64,
    },
    /// Worst-case storage growth.
    Growth {
        #[command(flatten)]
        growth: GrowthArgs,
    },
    /// Height, stored bytes and projected growth of a chain file.
    Info {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        growth: GrowthArgs,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.output;
    match cli.command {
        Command::Mine {
            chain,
            policy,
            image_dir,
            data,
            count,
            workers,
            progress_interval,
            full_nonce,
        } => commands::mine(
            out,
            &commands::MineConfig {
                chain: chain.chain,
                policy,
                image_dir,
                data,
                count,
                workers,
                progress_interval,
                full_nonce,
            },
        ),
        Command::Validate { chain, policy } => commands::validate(out, &chain.chain, &policy),
        Command::Score { image, export_maps } => commands::score(out, &image, export_maps.as_deref()),
        Command::Classify { image, threshold, top } => commands::classify(out, &image, threshold, top),
        Command::Eval { root, threshold, top } => commands::eval(out, &root, threshold, top),
        Command::Growth { growth } => commands::growth(out, &growth),
        Command::Info { chain, growth } => commands::info(out, &chain.chain, &growth),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = cli.output;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if out == OutputMode::Records {
                println!("{}", e.record());
            }
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
