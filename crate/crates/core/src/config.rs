//! Named model configurations.

use std::fmt;

use crate::error::{Error, Result};
use crate::tfhe::HeParams;
use crate::wnn::{ActivationSpec, PreprocessSpec, Quantizer, Thermometer, ThermometerKind, WisardGeometry};

/// Which TFHE parameter family a model set encrypts under.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeSet {
    He0,
    He1,
}

impl HeSet {
    pub fn params(self, p_log: u32) -> HeParams {
        match self {
            HeSet::He0 => HeParams::he0(p_log),
            HeSet::He1 => HeParams::he1(p_log),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            HeSet::He0 => "HE_0",
            HeSet::He1 => "HE_1",
        }
    }
}

/// Hyperparameters of one model, from preprocessing to the counter modulus.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSet {
    pub name: String,
    pub addr: usize,
    pub therm_size: usize,
    pub therm_kind: ThermometerKind,
    /// Distinct values reaching the thermometer.
    pub therm_range: u64,
    pub quantizer: Option<Quantizer>,
    pub act: ActivationSpec,
    pub he: HeSet,
    pub p_log: u32,
    /// Rescale counters by class frequency before activation.
    pub balance: bool,
    /// Leading training samples used; `None` takes the whole training split.
    pub train_samples: Option<usize>,
}

pub const MODEL_SET_NAMES: [&str; 5] = ["mnist_t", "mnist_s", "mnist_m", "mnist_l", "wisconsin"];

impl ModelSet {
    fn mnist(name: &str, addr: usize, he: HeSet, p_log: u32, train: usize) -> Self {
        Self {
            name: name.into(),
            addr,
            therm_size: 4,
            therm_kind: ThermometerKind::Log,
            therm_range: 16,
            quantizer: Some(Quantizer::Linear { r: 16 }),
            act: ActivationSpec::BoundedLog { c: ActivationSpec::DEFAULT_LOG_BOUND },
            he,
            p_log,
            balance: false,
            train_samples: Some(train),
        }
    }

    pub fn mnist_t() -> Self {
        Self::mnist("mnist_t", 9, HeSet::He0, 8, 1000)
    }

    pub fn mnist_s() -> Self {
        Self::mnist("mnist_s", 12, HeSet::He0, 10, 7500)
    }

    pub fn mnist_m() -> Self {
        Self::mnist("mnist_m", 14, HeSet::He1, 12, 30000)
    }

    pub fn mnist_l() -> Self {
        Self::mnist("mnist_l", 16, HeSet::He1, 13, 60000)
    }

    pub fn wisconsin() -> Self {
        Self {
            name: "wisconsin".into(),
            addr: 10,
            therm_size: 5,
            therm_kind: ThermometerKind::Linear,
            therm_range: 256,
            quantizer: None,
            act: ActivationSpec::Log,
            he: HeSet::He0,
            p_log: 9,
            balance: false,
            train_samples: None,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "mnist_t" => Ok(Self::mnist_t()),
            "mnist_s" => Ok(Self::mnist_s()),
            "mnist_m" => Ok(Self::mnist_m()),
            "mnist_l" => Ok(Self::mnist_l()),
            "wisconsin" => Ok(Self::wisconsin()),
            _ => Err(Error::InvalidParams(format!("unknown model set {name:?}"))),
        }
    }

    pub fn preprocess(&self) -> Result<PreprocessSpec> {
        Ok(PreprocessSpec {
            quantizer: self.quantizer,
            thermometer: Thermometer::new(self.therm_kind, self.therm_size, self.therm_range)?,
        })
    }

    pub fn geometry(&self, features: usize, classes: usize, seed: u64) -> Result<WisardGeometry> {
        WisardGeometry::new(features * self.therm_size, classes, self.addr, seed, self.p_log)
    }

    pub fn he_params(&self) -> HeParams {
        self.he.params(self.p_log)
    }

    /// Rejects training sets whose largest class could wrap a counter.
    pub fn check_capacity(&self, class_counts: &[u64]) -> Result<()> {
        let most = class_counts.iter().copied().max().unwrap_or(0);
        if most >= 1u64 << self.p_log {
            return Err(Error::InvalidParams(format!(
                "{}: a class with {most} samples overflows counters mod 2^{}",
                self.name, self.p_log
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ModelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.therm_kind {
            ThermometerKind::Linear => "lin",
            ThermometerKind::Log => "log",
        };
        write!(
            f,
            "{} addr={} therm={}/{} act={} set={} p=2^{}",
            self.name,
            self.addr,
            self.therm_size,
            kind,
            self.act,
            self.he.name(),
            self.p_log
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in MODEL_SET_NAMES {
            assert_eq!(ModelSet::by_name(name).unwrap().name, name);
        }
        assert!(ModelSet::by_name("ham_s").is_err());
    }

    #[test]
    fn capacity() {
        let m = ModelSet::mnist_t();
        assert!(m.check_capacity(&[255, 3]).is_ok());
        assert!(m.check_capacity(&[256]).is_err());
    }
}
