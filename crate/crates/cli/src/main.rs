//! `hewisard`: key generation, encryption, encrypted training and inference,
//! client-side finalization, plaintext oracle runs and benchmarks.

mod commands;
mod config;
mod data;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hewisard::wnn::ActivationSpec;

use crate::commands::*;
use crate::config::RunConfig;
use crate::data::{default_data_dir, Split};
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "hewisard", version, about = "Weightless neural networks over TFHE-encrypted data")]
struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Accept parameter sets with a ring too small to be secure.
    #[arg(long, global = true)]
    insecure: bool,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Named model set: mnist_t, mnist_s, mnist_m, mnist_l or wisconsin.
    #[arg(long, conflicts_with = "config")]
    set: Option<String>,
    /// `key = value` file describing a model set.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ConfigArgs {
    fn resolve(&self) -> CliResult<RunConfig> {
        match (&self.set, &self.config) {
            (Some(name), _) => RunConfig::named(name),
            (None, Some(path)) => RunConfig::load(path),
            (None, None) => Err(CliError::Usage("pass --set or --config".into())),
        }
    }
}

#[derive(Args)]
struct DataArgs {
    /// Dataset root holding mnist/ and wisconsin/; defaults to $HEWISARD_DATA or ./data.
    #[arg(long)]
    data: Option<PathBuf>,
}

impl DataArgs {
    fn dir(&self) -> PathBuf {
        self.data.clone().unwrap_or_else(default_data_dir)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a secret key and a packing key-switching key.
    Keygen {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Preprocess a dataset split and encrypt it to a sample stream.
    Encrypt {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        keys: PathBuf,
        #[arg(long, value_enum)]
        split: Split,
        /// Keep only the first samples of the split.
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an encrypted model on an encrypted sample stream.
    Train {
        #[arg(long)]
        samples: PathBuf,
        /// Input permutation seed of a new model.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Continue training an existing model.
        #[arg(long)]
        resume: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Add two encrypted models trained under the same key.
    Merge {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score encrypted samples, writing one packed score ciphertext per sample.
    Infer {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt score packs, activate and predict.
    Finalize {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        packs: PathBuf,
        #[arg(long)]
        keys: PathBuf,
        /// Ground-truth labels, one per line, for an accuracy report.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Overrides the model set activation (bin[:thr], log, b-log[:c]).
        #[arg(long)]
        act: Option<String>,
        /// Rescale counters by class frequency.
        #[arg(long)]
        balance: Option<bool>,
        /// Predictions, one per line.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plaintext training and evaluation with the same report fields.
    Oracle {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        data: DataArgs,
        /// Permutation seeds: `3`, `0-9` or `0,4,7`.
        #[arg(long, default_value = "0", value_parser = parse_seeds)]
        seeds: Seeds,
        #[arg(long)]
        train_limit: Option<usize>,
        #[arg(long)]
        test_limit: Option<usize>,
    },
    /// Time encrypted training and inference at several thread counts.
    Bench {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        train: usize,
        #[arg(long, default_value_t = 1)]
        infer: usize,
        /// Thread counts to compare, e.g. `1,8`.
        #[arg(long = "scale", default_value = "1", value_delimiter = ',')]
        scale: Vec<usize>,
    },
}

#[derive(Clone, Debug)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let num = |v: &str| v.trim().parse::<u64>().map_err(|_| format!("bad seed {v:?}"));
    if let Some((a, b)) = s.split_once('-') {
        let (a, b) = (num(a)?, num(b)?);
        if a > b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok(Seeds((a..=b).collect()));
    }
    s.split(',').map(num).collect::<Result<_, _>>().map(Seeds)
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let insecure = cli.insecure;
    let report = match cli.command {
        Command::Keygen { config, seed, out } => keygen_cmd(&config.resolve()?, seed, &out, insecure)?,
        Command::Encrypt { config, data, keys, split, limit, seed, out } => {
            let args = EncryptArgs { keys: &keys, data: &data.dir(), split, limit, seed, out: &out };
            encrypt_cmd(&config.resolve()?, args, insecure)?
        }
        Command::Train { samples, seed, resume, out } => train_cmd(&samples, seed, resume.as_deref(), &out, insecure)?,
        Command::Merge { a, b, out } => merge_cmd(&a, &b, &out, insecure)?,
        Command::Infer { model, samples, keys, out } => infer_cmd(&model, &samples, &keys, &out, insecure)?,
        Command::Finalize { config, packs, keys, labels, act, balance, out } => {
            let cfg = if config.set.is_some() || config.config.is_some() { Some(config.resolve()?) } else { None };
            let act = match (act, &cfg) {
                (Some(a), _) => ActivationSpec::parse(&a)?,
                (None, Some(c)) => c.set.act,
                (None, None) => return Err(CliError::Usage("pass --act or a model set".into())),
            };
            let balance = balance.or(cfg.map(|c| c.set.balance)).unwrap_or(false);
            let args = FinalizeArgs { packs: &packs, keys: &keys, labels: labels.as_deref(), act, balance, out: out.as_deref() };
            finalize_cmd(args, insecure)?
        }
        Command::Oracle { config, data, seeds, train_limit, test_limit } => {
            let args = OracleArgs { data: &data.dir(), seeds: &seeds.0, train_limit, test_limit };
            oracle_cmd(&config.resolve()?, args)?
        }
        Command::Bench { config, data, seed, train, infer, scale } => {
            let args = BenchArgs { data: &data.dir(), seed, train, infer, threads: &scale };
            bench_cmd(&config.resolve()?, args, insecure)?
        }
    };
    print!("{report}");
    if let Some(path) = cli.report {
        std::fs::write(&path, report.to_string()).map_err(hewisard::Error::from)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
