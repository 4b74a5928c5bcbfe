use super::{ClassCounts, IntegerWisardModel};
use crate::error::{Error, Result};

/// RAM output function applied to (optionally rescaled) counters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActivationSpec {
    /// 1 when the counter exceeds `thr`, else 0.
    Bin { thr: u64 },
    /// `log2(x + 1)`.
    Log,
    /// `min(log2(x + 1), c)`.
    BoundedLog { c: u32 },
}

impl ActivationSpec {
    pub const DEFAULT_LOG_BOUND: u32 = 4;

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            ActivationSpec::Bin { thr } => f64::from(u8::from(x > thr as f64)),
            ActivationSpec::Log => (x + 1.0).log2(),
            ActivationSpec::BoundedLog { c } => (x + 1.0).log2().min(f64::from(c)),
        }
    }

    /// Parses `bin`, `bin:<thr>`, `log`, `b-log` or `b-log:<c>`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let num = |d: u64| -> Result<u64> {
            arg.map_or(Ok(d), |a| a.trim().parse().map_err(|_| Error::Parse(format!("bad activation argument {a:?}"))))
        };
        match kind.trim().to_ascii_lowercase().as_str() {
            "bin" => Ok(ActivationSpec::Bin { thr: num(0)? }),
            "log" => Ok(ActivationSpec::Log),
            "b-log" | "blog" => {
                let c = num(Self::DEFAULT_LOG_BOUND.into())?;
                if c == 0 {
                    return Err(Error::Parse("b-log bound must be positive".into()));
                }
                Ok(ActivationSpec::BoundedLog { c: c as u32 })
            }
            other => Err(Error::Parse(format!("unknown activation {other:?}"))),
        }
    }
}

impl std::fmt::Display for ActivationSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ActivationSpec::Bin { thr } => write!(f, "bin:{thr}"),
            ActivationSpec::Log => write!(f, "log"),
            ActivationSpec::BoundedLog { c } => write!(f, "b-log:{c}"),
        }
    }
}

/// Balancing factors `(n/l)/counts_d` as numerator/denominator pairs.
fn rescale_terms(counts: Option<&ClassCounts>, l: usize) -> Result<Vec<(f64, f64)>> {
    match counts {
        None => Ok(vec![(1.0, 1.0); l]),
        Some(c) => {
            if c.0.len() != l {
                return Err(Error::Dimension { expected: l, found: c.0.len() });
            }
            let n = c.total() as f64;
            c.0.iter()
                .enumerate()
                .map(|(d, &cnt)| if cnt == 0 { Err(Error::EmptyClass(d)) } else { Ok((n, l as f64 * cnt as f64)) })
                .collect()
        }
    }
}

/// Per-class scores from raw lookups: `lookup(i, j)` is the counter hit by
/// RAM `j` of class `i`. Each counter is rescaled when `counts` is given, then
/// activated, then summed over RAMs in index order.
pub fn score_classes(
    l: usize,
    k0: usize,
    lookup: impl Fn(usize, usize) -> u64,
    act: &ActivationSpec,
    counts: Option<&ClassCounts>,
) -> Result<Vec<f64>> {
    let terms = rescale_terms(counts, l)?;
    Ok((0..l)
        .map(|i| {
            let (num, den) = terms[i];
            (0..k0).map(|j| act.apply(lookup(i, j) as f64 * num / den)).sum()
        })
        .collect())
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Activated RAM outputs, laid out like the counter tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivatedModel {
    pub values: Vec<f64>,
}

pub fn activate(model: &IntegerWisardModel, act: &ActivationSpec, counts: Option<&ClassCounts>) -> Result<ActivatedModel> {
    let g = model.geometry();
    let terms = rescale_terms(counts, g.l)?;
    let per_class = g.k0() * g.ram_size();
    let values = model
        .counters()
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            let (num, den) = terms[idx / per_class];
            act.apply(x as f64 * num / den)
        })
        .collect();
    Ok(ActivatedModel { values })
}

/// Predicted class of a preprocessed sample.
pub fn evaluate(
    model: &IntegerWisardModel,
    bits: &[bool],
    act: &ActivationSpec,
    counts: Option<&ClassCounts>,
) -> Result<usize> {
    let g = model.geometry();
    let addrs = model.addresses(bits)?;
    let scores = score_classes(g.l, g.k0(), |i, j| model.get(i, j, addrs[j]) as u64, act, counts)?;
    Ok(argmax(&scores))
}

/// Accuracy and confusion counts (`confusion[truth][predicted]`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metrics {
    pub confusion: Vec<Vec<u64>>,
}

impl Metrics {
    pub fn new(l: usize) -> Self {
        Self { confusion: vec![vec![0; l]; l] }
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.confusion[truth][predicted] += 1;
    }

    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum()
    }

    /// Percentage of correct predictions.
    pub fn accuracy(&self) -> f64 {
        100.0 * self.correct() as f64 / self.total().max(1) as f64
    }

    /// Fraction of class `c` samples predicted as `c`.
    pub fn recall(&self, c: usize) -> f64 {
        let row: u64 = self.confusion[c].iter().sum();
        self.confusion[c][c] as f64 / row.max(1) as f64
    }
}
