use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use super::Dataset;
use crate::error::{Error, Result};

/// Gaussian clusters on a few informative features, uniform noise elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub features: usize,
    pub informative: usize,
    pub spread: f64,
    /// Seed of the per-class cluster centers, shared by train and test draws.
    pub centers_seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self { features: 16, informative: 3, spread: 30.0, centers_seed: 0 }
    }
}

/// `counts[c]` samples of class `c`, drawn in class order.
pub fn make_unbalanced(spec: &SyntheticSpec, counts: &[usize], seed: u64) -> Result<Dataset> {
    if counts.len() < 2 || spec.informative > spec.features || spec.features == 0 {
        return Err(Error::InvalidParams("synthetic set needs two classes and informative <= features".into()));
    }
    let mut centers_rng = ChaCha20Rng::seed_from_u64(spec.centers_seed);
    // Centers are redrawn until every pair is at least four spreads apart.
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(counts.len());
    let mut attempts = 0;
    while centers.len() < counts.len() {
        attempts += 1;
        if attempts > 10_000 {
            return Err(Error::InvalidParams("cannot place separated class centers".into()));
        }
        let c: Vec<f64> = (0..spec.informative).map(|_| centers_rng.random_range(0..256u32) as f64).collect();
        let far = |o: &Vec<f64>| c.iter().zip(o).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt() >= 4.0 * spec.spread;
        if centers.iter().all(far) {
            centers.push(c);
        }
    }
    let noise = Normal::new(0.0, spec.spread).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (class, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            for c in &centers[class] {
                features.push((c + noise.sample(&mut rng)).round().clamp(0.0, 255.0) as u8);
            }
            for _ in spec.informative..spec.features {
                features.push(rng.random());
            }
            labels.push(class);
        }
    }
    Dataset::new(features, spec.features, labels, counts.len(), "synthetic")
}
