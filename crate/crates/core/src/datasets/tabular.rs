use std::fs;
use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};

/// Layout of a delimited text file with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularSchema {
    pub delimiter: char,
    pub label_column: String,
    /// Label strings in class-index order.
    pub classes: Vec<String>,
    /// Feature columns; `None` takes every column except the label.
    pub features: Option<Vec<String>>,
}

impl TabularSchema {
    /// Breast cancer Wisconsin (diagnostic): benign is class 0, malignant class 1.
    pub fn wisconsin() -> Self {
        Self { delimiter: ',', label_column: "diagnosis".into(), classes: vec!["B".into(), "M".into()], features: None }
    }
}

/// Raw real-valued rows before scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularData {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub classes: usize,
}

pub fn load_tabular(path: impl AsRef<Path>, schema: &TabularSchema) -> Result<TabularData> {
    let text = fs::read_to_string(path.as_ref())?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines.next().ok_or_else(|| Error::Format("empty file".into()))?;
    let header: Vec<&str> = head.split(schema.delimiter).map(str::trim).collect();
    let find = |name: &str| {
        header.iter().position(|h| *h == name).ok_or_else(|| Error::Format(format!("missing column {name:?}")))
    };
    let label_at = find(&schema.label_column)?;
    let feature_at: Vec<usize> = match &schema.features {
        Some(names) => names.iter().map(|n| find(n)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|&i| i != label_at).collect(),
    };
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(schema.delimiter).map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(Error::Parse(format!("line {}: {} cells, expected {}", lineno + 1, cells.len(), header.len())));
        }
        let label = schema
            .classes
            .iter()
            .position(|c| c == cells[label_at])
            .ok_or_else(|| Error::Parse(format!("line {}: unknown label {:?}", lineno + 1, cells[label_at])))?;
        let row = feature_at
            .iter()
            .map(|&i| {
                cells[i]
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse(format!("line {}: non-numeric cell {:?}", lineno + 1, cells[i])))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        labels.push(label);
    }
    Ok(TabularData {
        columns: feature_at.iter().map(|&i| header[i].to_string()).collect(),
        rows,
        labels,
        classes: schema.classes.len(),
    })
}

/// Per-feature bounds mapping values onto `0..=255`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinMaxScaler {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl MinMaxScaler {
    /// Bounds over the given rows only.
    pub fn fit(data: &TabularData, rows: &[usize]) -> Result<Self> {
        let width = data.columns.len();
        if rows.is_empty() {
            return Err(Error::InvalidParams("cannot fit bounds on zero rows".into()));
        }
        let mut lo = vec![f64::INFINITY; width];
        let mut hi = vec![f64::NEG_INFINITY; width];
        for &r in rows {
            for (f, &v) in data.rows[r].iter().enumerate() {
                lo[f] = lo[f].min(v);
                hi[f] = hi[f].max(v);
            }
        }
        Ok(Self { lo, hi })
    }

    /// `round((x − lo)/(hi − lo) · 255)`, clamped; constant columns map to 0.
    pub fn scale(&self, f: usize, x: f64) -> u8 {
        let span = self.hi[f] - self.lo[f];
        if span <= 0.0 {
            return 0;
        }
        ((x - self.lo[f]) / span * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
    }

    pub fn transform(&self, data: &TabularData, source: &str) -> Result<Dataset> {
        let width = data.columns.len();
        if self.lo.len() != width {
            return Err(Error::Dimension { expected: self.lo.len(), found: width });
        }
        let features = data.rows.iter().flat_map(|row| row.iter().enumerate().map(|(f, &x)| self.scale(f, x))).collect();
        Dataset::new(features, width, data.labels.clone(), data.classes, source)
    }
}

/// Loads a tabular file, splits it and scales both parts with bounds fitted
/// on the training rows.
pub fn load_tabular_split(
    path: impl AsRef<Path>,
    schema: &TabularSchema,
    split: &super::SplitSpec,
    source: &str,
) -> Result<(Dataset, Dataset)> {
    let data = load_tabular(path, schema)?;
    let (train, test) = split.indices(data.rows.len());
    let scaler = MinMaxScaler::fit(&data, &train)?;
    let all = scaler.transform(&data, source)?;
    Ok((all.subset(&train), all.subset(&test)))
}
