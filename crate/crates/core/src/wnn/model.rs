use super::{addresses, permutation, WisardGeometry};
use crate::error::{Error, Result};

/// Training samples per class.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassCounts(pub Vec<u64>);

impl ClassCounts {
    pub fn zeros(l: usize) -> Self {
        Self(vec![0; l])
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.0.len() != other.0.len() {
            return Err(Error::Dimension { expected: self.0.len(), found: other.0.len() });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }
}

/// Counter tensor `l × k0 × 2^a`, every entry reduced mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerWisardModel {
    geometry: WisardGeometry,
    perm: Vec<usize>,
    counters: Vec<u32>,
}

impl IntegerWisardModel {
    pub fn zero(geometry: &WisardGeometry) -> Result<Self> {
        geometry.validate()?;
        let len = geometry.l * geometry.k0() * geometry.ram_size();
        Ok(Self { geometry: geometry.clone(), perm: permutation(geometry.r, geometry.s), counters: vec![0; len] })
    }

    /// Rebuilds a model from a flat counter tensor.
    pub fn from_counters(geometry: &WisardGeometry, counters: Vec<u32>) -> Result<Self> {
        let mut m = Self::zero(geometry)?;
        if counters.len() != m.counters.len() {
            return Err(Error::Dimension { expected: m.counters.len(), found: counters.len() });
        }
        if let Some(&bad) = counters.iter().find(|&&c| c as u64 >= geometry.p()) {
            return Err(Error::Encoding { value: bad as u64, modulus: geometry.p() });
        }
        m.counters = counters;
        Ok(m)
    }

    pub fn geometry(&self) -> &WisardGeometry {
        &self.geometry
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn counters(&self) -> &[u32] {
        &self.counters
    }

    fn index(&self, class: usize, ram: usize, addr: usize) -> usize {
        (class * self.geometry.k0() + ram) * self.geometry.ram_size() + addr
    }

    pub fn get(&self, class: usize, ram: usize, addr: usize) -> u32 {
        self.counters[self.index(class, ram, addr)]
    }

    /// The `2^a` counters of one RAM of one class.
    pub fn ram(&self, class: usize, ram: usize) -> &[u32] {
        let start = self.index(class, ram, 0);
        &self.counters[start..start + self.geometry.ram_size()]
    }

    /// RAM addresses of a sample under this model's permutation.
    pub fn addresses(&self, bits: &[bool]) -> Result<Vec<usize>> {
        if bits.len() != self.geometry.s {
            return Err(Error::Dimension { expected: self.geometry.s, found: bits.len() });
        }
        Ok(addresses(bits, &self.perm, self.geometry.a))
    }

    pub fn train_sample(&mut self, bits: &[bool], label: usize) -> Result<()> {
        if label >= self.geometry.l {
            return Err(Error::Label { label, classes: self.geometry.l });
        }
        let mask = (self.geometry.p() - 1) as u32;
        for (ram, addr) in self.addresses(bits)?.into_iter().enumerate() {
            let i = self.index(label, ram, addr);
            self.counters[i] = self.counters[i].wrapping_add(1) & mask;
        }
        Ok(())
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::Mismatch(format!("geometries {:?} and {:?}", self.geometry, other.geometry)));
        }
        Ok(())
    }
}

/// Integer WiSARD training: every sample adds one to the addressed counter of
/// each RAM of its class.
pub fn train_integer<'a, I>(samples: I, geometry: &WisardGeometry) -> Result<(IntegerWisardModel, ClassCounts)>
where
    I: IntoIterator<Item = (&'a [bool], usize)>,
{
    let mut model = IntegerWisardModel::zero(geometry)?;
    let mut counts = ClassCounts::zeros(geometry.l);
    for (bits, label) in samples {
        model.train_sample(bits, label)?;
        counts.0[label] += 1;
    }
    Ok((model, counts))
}

/// Counter-wise sum mod `p` of two models with the same geometry and seed.
pub fn merge(m1: &IntegerWisardModel, m2: &IntegerWisardModel) -> Result<IntegerWisardModel> {
    m1.same_shape(m2)?;
    let mask = (m1.geometry.p() - 1) as u32;
    let mut out = m1.clone();
    for (a, b) in out.counters.iter_mut().zip(&m2.counters) {
        *a = a.wrapping_add(*b) & mask;
    }
    Ok(out)
}
