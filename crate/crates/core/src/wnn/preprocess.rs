use crate::error::{Error, Result};

/// Reduces the resolution of an integer feature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantizer {
    /// `⌊x / r⌋`.
    Linear { r: u64 },
    /// `⌊log_b(x + 1)⌋`.
    Log { base: u64 },
}

impl Quantizer {
    pub fn apply(&self, x: u64) -> u64 {
        match *self {
            Quantizer::Linear { r } => x / r,
            Quantizer::Log { base } => {
                let mut v = x + 1;
                let mut out = 0;
                while v >= base {
                    v /= base;
                    out += 1;
                }
                out
            }
        }
    }

    /// Number of distinct outputs for inputs in `0..range`.
    pub fn output_range(&self, range: u64) -> u64 {
        self.apply(range - 1) + 1
    }
}

pub fn quantize(v: u64, q: &Quantizer) -> u64 {
    q.apply(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThermometerKind {
    Linear,
    Log,
}

/// Unary encoding into `size` bits; bit `i` is set when `v >= thresholds[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thermometer {
    pub kind: ThermometerKind,
    pub size: usize,
    /// Number of distinct input values.
    pub range: u64,
    thresholds: Vec<u64>,
}

impl Thermometer {
    pub fn new(kind: ThermometerKind, size: usize, range: u64) -> Result<Self> {
        if size == 0 || range < 2 {
            return Err(Error::InvalidParams(format!("thermometer of size {size} over range {range}")));
        }
        let thresholds = match kind {
            // v·(T+1) >= (i+1)·R, i.e. T evenly spaced cuts strictly inside the range.
            ThermometerKind::Linear => (0..size as u64).map(|i| ((i + 1) * range).div_ceil(size as u64 + 1)).collect(),
            // round(R^(i/T)), bumped so the cuts stay strictly increasing.
            ThermometerKind::Log => {
                let mut out: Vec<u64> = Vec::with_capacity(size);
                for i in 0..size {
                    let t = (range as f64).powf(i as f64 / size as f64).round() as u64;
                    let t = out.last().map_or(t, |&prev| t.max(prev + 1));
                    out.push(t);
                }
                out
            }
        };
        Ok(Self { kind, size, range, thresholds })
    }

    /// A thermometer with explicit cut points.
    pub fn with_thresholds(thresholds: Vec<u64>) -> Result<Self> {
        if thresholds.is_empty() || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("thresholds must be strictly increasing".into()));
        }
        let range = thresholds.last().unwrap() + 1;
        Ok(Self { kind: ThermometerKind::Linear, size: thresholds.len(), range, thresholds })
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.thresholds
    }

    pub fn encode_into(&self, v: u64, out: &mut Vec<bool>) {
        out.extend(self.thresholds.iter().map(|&t| v >= t));
    }
}

pub fn thermometer_encode(v: u64, t: &Thermometer) -> Vec<bool> {
    let mut out = Vec::with_capacity(t.size);
    t.encode_into(v, &mut out);
    out
}

/// Per-sample preprocessing: optional quantization, then a thermometer per feature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreprocessSpec {
    pub quantizer: Option<Quantizer>,
    pub thermometer: Thermometer,
}

impl PreprocessSpec {
    /// Input bit count for `features` features.
    pub fn bit_len(&self, features: usize) -> usize {
        features * self.thermometer.size
    }

    /// Feature-major bits: feature `f` occupies bits `f·T .. (f+1)·T`.
    pub fn apply<T: Copy + Into<u64>>(&self, features: &[T]) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.bit_len(features.len()));
        for &x in features {
            let x: u64 = x.into();
            let v = self.quantizer.map_or(x, |q| q.apply(x));
            self.thermometer.encode_into(v, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantizer_formulas() {
        assert_eq!(quantize(255, &Quantizer::Linear { r: 16 }), 15);
        assert_eq!(quantize(7, &Quantizer::Log { base: 2 }), 3);
        assert_eq!(quantize(6, &Quantizer::Log { base: 2 }), 2);
        assert_eq!(quantize(0, &Quantizer::Linear { r: 16 }), 0);
        assert_eq!(quantize(0, &Quantizer::Log { base: 2 }), 0);
        assert_eq!(Quantizer::Linear { r: 16 }.output_range(256), 16);
    }

    #[test]
    fn unit_thermometer() {
        let t = Thermometer::with_thresholds(vec![1, 2, 3, 4]).unwrap();
        assert_eq!(thermometer_encode(3, &t), vec![true, true, true, false]);
        assert_eq!(thermometer_encode(0, &t), vec![false; 4]);
        assert_eq!(thermometer_encode(4, &t), vec![true; 4]);
    }

    #[test]
    fn threshold_families() {
        let log = Thermometer::new(ThermometerKind::Log, 4, 16).unwrap();
        assert_eq!(log.thresholds(), &[1, 2, 4, 8]);
        let lin = Thermometer::new(ThermometerKind::Linear, 5, 256).unwrap();
        assert_eq!(lin.thresholds(), &[43, 86, 128, 171, 214]);
        let crowded = Thermometer::new(ThermometerKind::Log, 8, 16).unwrap();
        assert!(crowded.thresholds().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(crowded.thresholds().len(), 8);
    }

    #[test]
    fn encodings_are_monotone() {
        for t in [
            Thermometer::new(ThermometerKind::Log, 4, 16).unwrap(),
            Thermometer::new(ThermometerKind::Linear, 5, 256).unwrap(),
        ] {
            for v in 0..t.range {
                let bits = thermometer_encode(v, &t);
                assert!(bits.windows(2).all(|w| w[0] || !w[1]));
            }
            assert!(thermometer_encode(t.range - 1, &t).iter().all(|&b| b));
        }
    }
}
