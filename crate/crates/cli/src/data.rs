use std::path::{Path, PathBuf};

use hewisard::datasets::{
    load_mnist_idx, load_tabular_split, make_unbalanced, preprocess, BitDataset, Dataset, SplitSpec, SyntheticSpec,
    TabularSchema,
};

use crate::config::{DatasetKind, RunConfig};
use crate::error::CliResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Split {
    Train,
    Test,
}

pub fn default_data_dir() -> PathBuf {
    std::env::var_os("HEWISARD_DATA").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"))
}

/// The raw split named by the config, before preprocessing. `limit` keeps
/// the leading samples.
pub fn load(cfg: &RunConfig, dir: &Path, split: Split, limit: Option<usize>) -> CliResult<Dataset> {
    let data = match cfg.dataset {
        DatasetKind::Mnist => {
            let part = match split {
                Split::Train => "train",
                Split::Test => "t10k",
            };
            let d = dir.join("mnist");
            let all = load_mnist_idx(
                d.join(format!("{part}-images-idx3-ubyte")),
                d.join(format!("{part}-labels-idx1-ubyte")),
            )?;
            match (split, cfg.set.train_samples) {
                (Split::Train, Some(n)) => all.head(n),
                _ => all,
            }
        }
        DatasetKind::Wisconsin => {
            let path = dir.join("wisconsin/wdbc.csv");
            let rows = std::fs::read_to_string(&path).map_err(hewisard::Error::from)?.lines().count().saturating_sub(1);
            let spec = SplitSpec::Ordered { train: rows * 4 / 5 };
            let (train, test) = load_tabular_split(&path, &TabularSchema::wisconsin(), &spec, "wdbc")?;
            match split {
                Split::Train => train,
                Split::Test => test,
            }
        }
        DatasetKind::Synthetic => match split {
            Split::Train => make_unbalanced(&SyntheticSpec::default(), &[900, 100], 1)?,
            Split::Test => make_unbalanced(&SyntheticSpec::default(), &[200, 200], 2)?,
        },
    };
    Ok(match limit {
        Some(n) => data.head(n),
        None => data,
    })
}

pub fn load_bits(cfg: &RunConfig, dir: &Path, split: Split, limit: Option<usize>) -> CliResult<(Dataset, BitDataset)> {
    let raw = load(cfg, dir, split, limit)?;
    let bits = preprocess(&raw, &cfg.set.preprocess()?);
    Ok((raw, bits))
}
