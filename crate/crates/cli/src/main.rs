//! Command-line interface for generating synthetic captions and running
//! the fidelity/utility evaluation pipeline.

mod commands;
mod config;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use synthcap::dataset::Strategy;
use synthcap::network::{ExportFormat, GraphKind};

use commands::{usage, CliError, CmdStatus};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "synthcap",
    about = "Generate synthetic social-media captions and evaluate their fidelity and utility",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Base,
    FixedExamples,
    RandomExamples,
    Imitation,
}

impl From<StrategyArg> for Strategy {
    fn from(value: StrategyArg) -> Strategy {
        match value {
            StrategyArg::Base => Strategy::Base,
            StrategyArg::FixedExamples => Strategy::FixedExamples,
            StrategyArg::RandomExamples => Strategy::RandomExamples,
            StrategyArg::Imitation => Strategy::Imitation,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProviderArg {
    Remote,
    Offline,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphKindArg {
    Ht,
    Ut,
    Hu,
}

impl From<GraphKindArg> for GraphKind {
    fn from(value: GraphKindArg) -> GraphKind {
        match value {
            GraphKindArg::Ht => GraphKind::HT,
            GraphKindArg::Ut => GraphKind::UT,
            GraphKindArg::Hu => GraphKind::HU,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Graphml,
    Dot,
    EdgelistCsv,
}

impl From<FormatArg> for ExportFormat {
    fn from(value: FormatArg) -> ExportFormat {
        match value {
            FormatArg::Graphml => ExportFormat::Graphml,
            FormatArg::Dot => ExportFormat::Dot,
            FormatArg::EdgelistCsv => ExportFormat::EdgelistCsv,
        }
    }
}

/// Options shared by every config-driven subcommand.
#[derive(Debug, clap::Args)]
struct ConfigOpts {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the embedding provider kind.
    #[arg(long, value_enum)]
    provider: Option<ProviderArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic captions via the configured chat endpoint.
    Generate {
        #[command(flatten)]
        opts: ConfigOpts,
        /// Restrict generation to one strategy (default: all four).
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Overrides the configured sampling temperature.
        #[arg(long)]
        temperature: Option<f64>,
    },
    /// Run the temperature sweep experiment with the base prompt.
    Sweep {
        #[command(flatten)]
        opts: ConfigOpts,
    },
    /// Compare synthetic datasets against the real corpus.
    Fidelity {
        #[command(flatten)]
        opts: ConfigOpts,
    },
    /// Sponsored-content classification experiments.
    Utility {
        #[command(flatten)]
        opts: ConfigOpts,
    },
    /// Export a co-occurrence graph built from a dataset.
    ExportGraph {
        /// JSONL dataset to build the graph from.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        kind: GraphKindArg,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render the markdown tables from a JSON report bundle.
    Report {
        /// report.json produced by fidelity/utility/sweep.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Markdown output path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(opts: &ConfigOpts) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&opts.config).map_err(usage)?;
    if let Some(seed) = opts.seed {
        config.seed = Some(seed);
    }
    if let Some(out) = &opts.out {
        config.out = Some(out.clone());
    }
    match opts.provider {
        Some(ProviderArg::Offline) => {
            config.embedding =
                Some(synthcap::embedding::EmbeddingProvider::Offline(match config.embedding {
                    Some(synthcap::embedding::EmbeddingProvider::Offline(p)) => p,
                    _ => synthcap::embedding::OfflineProvider::default(),
                }));
        }
        Some(ProviderArg::Remote)
            if !matches!(
                config.embedding,
                Some(synthcap::embedding::EmbeddingProvider::Remote(_))
            ) =>
        {
            return Err(usage(
                "--provider remote requires a remote embedding section in the config",
            ));
        }
        Some(ProviderArg::Remote) | None => {}
    }
    Ok(config)
}

fn dispatch(command: Command) -> Result<CmdStatus, CliError> {
    match command {
        Command::Generate { opts, strategy, temperature } => {
            let config = load_config(&opts)?;
            commands::generate::run(&config, strategy.map(Into::into), temperature)
        }
        Command::Sweep { opts } => {
            let config = load_config(&opts)?;
            commands::sweep::run(&config)
        }
        Command::Fidelity { opts } => {
            let config = load_config(&opts)?;
            commands::fidelity::run(&config)
        }
        Command::Utility { opts } => {
            let config = load_config(&opts)?;
            commands::utility::run(&config)
        }
        Command::ExportGraph { data, kind, format, out } => {
            commands::export_graph::run(&data, kind.into(), format.into(), &out)
        }
        Command::Report { input, out } => commands::render::run(&input, &out),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are not usage errors.
            if e.use_stderr() {
                eprint!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    match dispatch(cli.command) {
        Ok(status) => std::process::exit(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code);
        }
    }
}
