//! Run configuration: a named model set, optionally overridden from a
//! `key = value` file.

use std::path::Path;

use hewisard::config::{HeSet, ModelSet};
use hewisard::io::Manifest;
use hewisard::tfhe::HeParams;
use hewisard::wnn::{ActivationSpec, Quantizer, ThermometerKind};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Mnist,
    Wisconsin,
    /// Two-class 9:1 generator for balancing experiments.
    Synthetic,
}

impl DatasetKind {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "mnist" => Ok(Self::Mnist),
            "wisconsin" => Ok(Self::Wisconsin),
            "synthetic" => Ok(Self::Synthetic),
            _ => Err(CliError::Usage(format!("unknown dataset {s:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Mnist => "mnist",
            Self::Wisconsin => "wisconsin",
            Self::Synthetic => "synthetic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub set: ModelSet,
    pub params: HeParams,
    pub dataset: DatasetKind,
}

const KEYS: [&str; 14] = [
    "set",
    "name",
    "dataset",
    "addr",
    "therm_size",
    "therm_kind",
    "therm_range",
    "quantizer",
    "act",
    "he",
    "p_log",
    "sigma_rel",
    "balance",
    "train_samples",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.parse().map_err(|_| CliError::Usage(format!("{key}: cannot parse {v:?}")))
}

fn parse_quantizer(v: &str) -> CliResult<Option<Quantizer>> {
    match v.split_once(':') {
        None if v == "none" => Ok(None),
        Some(("lin", r)) => Ok(Some(Quantizer::Linear { r: parse_num("quantizer", r)? })),
        Some(("log", b)) => Ok(Some(Quantizer::Log { base: parse_num("quantizer", b)? })),
        _ => Err(CliError::Usage(format!("quantizer: expected none, lin:<r> or log:<base>, got {v:?}"))),
    }
}

/// `HE_0`, `HE_1` or `insecure:<N>`.
pub fn parse_he(v: &str, p_log: u32) -> CliResult<HeParams> {
    if let Some(n) = v.strip_prefix("insecure:") {
        return Ok(HeParams::insecure(parse_num("he", n)?, p_log));
    }
    Ok(HeParams::by_name(v, p_log)?)
}

fn default_dataset(set: &ModelSet) -> Option<DatasetKind> {
    if set.name.starts_with("mnist") {
        Some(DatasetKind::Mnist)
    } else if set.name == "wisconsin" {
        Some(DatasetKind::Wisconsin)
    } else {
        None
    }
}

impl RunConfig {
    pub fn named(name: &str) -> CliResult<Self> {
        let set = ModelSet::by_name(name).map_err(|e| CliError::Usage(e.to_string()))?;
        let dataset = default_dataset(&set).expect("named sets have a dataset");
        Ok(Self { params: set.he_params(), set, dataset })
    }

    /// A file may start from `set = <name>` and override single fields, or
    /// spell out every field for a custom set.
    pub fn from_manifest(m: &Manifest) -> CliResult<Self> {
        if let Some((k, _)) = m.entries.iter().find(|(k, _)| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key {k:?}")));
        }
        let base = m.get("set").map(Self::named).transpose()?;
        let need = |key: &str| -> CliResult<&str> {
            m.get(key).ok_or_else(|| CliError::Usage(format!("custom config needs {key:?}")))
        };
        let mut set = match &base {
            Some(b) => b.set.clone(),
            None => ModelSet {
                name: "custom".into(),
                addr: parse_num("addr", need("addr")?)?,
                therm_size: parse_num("therm_size", need("therm_size")?)?,
                therm_kind: ThermometerKind::Linear,
                therm_range: 256,
                quantizer: None,
                act: ActivationSpec::Log,
                he: HeSet::He0,
                p_log: parse_num("p_log", need("p_log")?)?,
                balance: false,
                train_samples: None,
            },
        };
        let overridden = m.entries.iter().any(|(k, _)| k != "set" && k != "name");
        if let Some(v) = m.get("addr") {
            set.addr = parse_num("addr", v)?;
        }
        if let Some(v) = m.get("therm_size") {
            set.therm_size = parse_num("therm_size", v)?;
        }
        if let Some(v) = m.get("therm_kind") {
            set.therm_kind = match v {
                "lin" | "linear" => ThermometerKind::Linear,
                "log" => ThermometerKind::Log,
                _ => return Err(CliError::Usage(format!("therm_kind: expected lin or log, got {v:?}"))),
            };
        }
        if let Some(v) = m.get("therm_range") {
            set.therm_range = parse_num("therm_range", v)?;
        }
        if let Some(v) = m.get("quantizer") {
            set.quantizer = parse_quantizer(v)?;
        }
        if let Some(v) = m.get("act") {
            set.act = ActivationSpec::parse(v)?;
        }
        if let Some(v) = m.get("p_log") {
            set.p_log = parse_num("p_log", v)?;
        }
        if let Some(v) = m.get("balance") {
            set.balance = parse_num("balance", v)?;
        }
        if let Some(v) = m.get("train_samples") {
            set.train_samples = if v == "all" { None } else { Some(parse_num("train_samples", v)?) };
        }
        let mut params = match m.get("he") {
            Some(v) => parse_he(v, set.p_log)?,
            None => base.as_ref().map_or(HeParams::he0(set.p_log), |b| b.params.clone().with_p_log(set.p_log)),
        };
        if let Some(v) = m.get("sigma_rel") {
            if !params.insecure {
                return Err(CliError::Usage("sigma_rel may only be changed on an insecure set".into()));
            }
            params = params.with_sigma_rel(parse_num("sigma_rel", v)?);
        }
        if params.name == "HE_1" {
            set.he = HeSet::He1;
        }
        set.name = match m.get("name") {
            Some(n) => n.to_string(),
            None if overridden => "custom".into(),
            None => set.name,
        };
        let dataset = match m.get("dataset") {
            Some(v) => DatasetKind::parse(v)?,
            None => base
                .map(|b| b.dataset)
                .ok_or_else(|| CliError::Usage("custom config needs \"dataset\"".into()))?,
        };
        set.preprocess()?;
        params.validate()?;
        Ok(Self { set, params, dataset })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(hewisard::Error::from)?;
        Self::from_manifest(&Manifest::parse(&text)?)
    }

    /// Writes the fields every report carries.
    pub fn describe(&self, m: &mut Manifest) {
        let s = &self.set;
        m.set("set", &s.name)
            .set("dataset", self.dataset.name())
            .set("addr", s.addr)
            .set("therm", format!("{}/{}", match s.therm_kind {
                ThermometerKind::Linear => "lin",
                ThermometerKind::Log => "log",
            }, s.therm_size))
            .set("act", s.act)
            .set("balance", s.balance)
            .set("params", &self.params.name)
            .set("p_log", s.p_log);
    }
}
