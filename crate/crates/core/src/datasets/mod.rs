//! Dataset loading, splitting and preprocessing.
//!
//! All datasets are reduced to 8-bit integer features before the WiSARD
//! preprocessing runs, so a [`Dataset`] stores one byte per feature.

mod idx;
mod synthetic;
mod tabular;

pub use idx::load_mnist_idx;
pub use synthetic::{make_unbalanced, SyntheticSpec};
pub use tabular::{load_tabular, load_tabular_split, MinMaxScaler, TabularData, TabularSchema};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::wnn::PreprocessSpec;

/// Integer features with class labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    features: Vec<u8>,
    pub n_features: usize,
    pub labels: Vec<usize>,
    pub classes: usize,
    pub source: String,
}

impl Dataset {
    pub fn new(features: Vec<u8>, n_features: usize, labels: Vec<usize>, classes: usize, source: &str) -> Result<Self> {
        if n_features == 0 || features.len() != n_features * labels.len() {
            return Err(Error::Dimension { expected: n_features * labels.len(), found: features.len() });
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
            return Err(Error::Label { label: bad, classes });
        }
        Ok(Self { features, n_features, labels, classes, source: source.to_string() })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[u8] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        let mut features = Vec::with_capacity(idx.len() * self.n_features);
        for &i in idx {
            features.extend_from_slice(self.sample(i));
        }
        Self {
            features,
            n_features: self.n_features,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes,
            source: self.source.clone(),
        }
    }

    pub fn head(&self, n: usize) -> Self {
        self.subset(&(0..n.min(self.len())).collect::<Vec<_>>())
    }

    pub fn class_counts(&self) -> Vec<u64> {
        let mut out = vec![0; self.classes];
        for &y in &self.labels {
            out[y] += 1;
        }
        out
    }
}

/// How a single dataset is divided into train and test parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitSpec {
    /// The first `train` rows train, the rest test, in file order.
    Ordered { train: usize },
    /// A seeded shuffle followed by a `fraction` train cut (rounded).
    Shuffled { fraction: f64, seed: u64 },
}

impl SplitSpec {
    /// `(train, test)` row indices for a dataset of `n` rows.
    pub fn indices(&self, n: usize) -> (Vec<usize>, Vec<usize>) {
        let mut idx: Vec<usize> = (0..n).collect();
        let cut = match *self {
            SplitSpec::Ordered { train } => train.min(n),
            SplitSpec::Shuffled { fraction, seed } => {
                idx.shuffle(&mut ChaCha20Rng::seed_from_u64(seed));
                ((n as f64) * fraction).round() as usize
            }
        };
        let test = idx.split_off(cut);
        (idx, test)
    }
}

/// Preprocessed bit vectors with labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitDataset {
    pub bits: Vec<Vec<bool>>,
    pub labels: Vec<usize>,
    pub classes: usize,
}

impl BitDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn s(&self) -> usize {
        self.bits.first().map_or(0, Vec::len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[bool], usize)> {
        self.bits.iter().map(Vec::as_slice).zip(self.labels.iter().copied())
    }
}

/// Applies `spec` to every sample independently.
pub fn preprocess(dataset: &Dataset, spec: &PreprocessSpec) -> BitDataset {
    BitDataset {
        bits: (0..dataset.len()).map(|i| spec.apply(dataset.sample(i))).collect(),
        labels: dataset.labels.clone(),
        classes: dataset.classes,
    }
}
