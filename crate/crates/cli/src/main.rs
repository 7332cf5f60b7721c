use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use soaccept::config::{Overrides, RunConfig};
use soaccept::manifest::Stage;
use soaccept::rank::{rank, ModelKind, RankInput};
use soaccept::stages;
use soaccept_core::resample::SamplerKind;
use soaccept_core::{Error, Result};

/// Answer-acceptability pipeline over Stack Exchange data dumps.
#[derive(Debug, Parser)]
#[command(name = "soaccept", version)]
struct Cli {
    /// Run configuration (JSON). Omitted settings take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Working directory; overrides paths.workdir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override one setting, e.g. `--set search.n_iterations=20`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SamplerArgs {
    /// Train with this sampler only.
    #[arg(long)]
    sampler: Option<SamplerKind>,
    /// Neighbors for SMOTE and ADASYN.
    #[arg(long)]
    k: Option<usize>,
    /// Minority/majority ratio after oversampling.
    #[arg(long)]
    ratio: Option<f64>,
    /// ADASYN balance level.
    #[arg(long)]
    beta: Option<f64>,
}

impl SamplerArgs {
    fn push_sets(&self, set: &mut Vec<String>) {
        if let Some(s) = self.sampler {
            set.push(format!("resample.samplers=[\"{s}\"]"));
        }
        if let Some(k) = self.k {
            set.push(format!("resample.k={k}"));
        }
        if let Some(r) = self.ratio {
            set.push(format!("resample.target_ratio={r}"));
        }
        if let Some(b) = self.beta {
            set.push(format!("resample.beta={b}"));
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse the dump files into dataset.jsonl.
    Ingest,
    /// Extract the sixteen features into features.csv.
    Features,
    /// Drop correlated and uninformative features.
    Select,
    /// Split, search, resample and fit both models per sampler.
    Train(SamplerArgs),
    /// Score the test split and write the report.
    Evaluate,
    /// Every stage in order.
    Run(SamplerArgs),
    /// Order candidate answers of a new question by acceptance probability.
    Rank {
        /// JSON with `question` and `candidates`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "rf")]
        model: ModelArg,
        /// Sampler whose models to use; defaults to the first configured.
        #[arg(long)]
        sampler: Option<SamplerKind>,
        /// Write the ranking here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ModelArg {
    Rf,
    Mlp,
}

fn execute(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    let mut overrides = Overrides { seed: cli.seed, workdir: cli.out, set: cli.set };
    if let Command::Train(s) | Command::Run(s) = &cli.command {
        s.push_sets(&mut overrides.set);
    }
    let config = RunConfig::load(cli.config.as_deref(), &overrides)?;
    match cli.command {
        Command::Ingest => stages::run(&config, Stage::Ingest),
        Command::Features => stages::run(&config, Stage::Features),
        Command::Select => stages::run(&config, Stage::Select),
        Command::Train(_) => stages::run(&config, Stage::Train),
        Command::Evaluate => stages::run(&config, Stage::Evaluate),
        Command::Run(_) => stages::run_all(&config),
        Command::Rank { input, model, sampler, output } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::Io { path: input.clone(), source: e })?;
            let request: RankInput = serde_json::from_str(&text)
                .map_err(|e| Error::Json { context: input.display().to_string(), source: e })?;
            let model = match model {
                ModelArg::Rf => ModelKind::Rf,
                ModelArg::Mlp => ModelKind::Mlp,
            };
            let ranking = rank(&config, &request, model, sampler)?;
            let mut json = serde_json::to_string_pretty(&ranking).expect("ranking serializes");
            json.push('\n');
            match output {
                Some(path) => std::fs::write(&path, json).map_err(|e| Error::Io { path, source: e }),
                None => {
                    print!("{json}");
                    Ok(())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
