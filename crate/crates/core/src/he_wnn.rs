//! Integer WiSARD over encrypted data.
//!
//! Samples arrive as RGSW encryptions of their bits. Each RAM row of the model
//! is one [`EncryptedLut`] indexed by `(label << a) | address`, so training a
//! sample is one inverse vertical packing per RAM with the constant 1 as
//! payload, and inference is one vertical packing per RAM and class with the
//! label bits public.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lut::{inverse_vertical_packing, vertical_packing, EncryptedLut, SelectorBit};
use crate::tfhe::{
    cmux_rotate, dec_rlwe, enc_rgsw_seeded, extract_lwe, measure_noise, packing_key_switch, trivial_rgsw,
    FourierRgsw, HeParams, LweCiphertext, NoiseBudget, PackingKeySwitchKey, RlweCiphertext, SecretKey, SeededRgsw,
};
use crate::wnn::{argmax, permutation, score_classes, ActivationSpec, ClassCounts, IntegerWisardModel, WisardGeometry};

/// A sample as sent by the client, masks compressed to seeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeededSample {
    pub data: Vec<SeededRgsw>,
    /// Empty for inference-only samples.
    pub label: Vec<SeededRgsw>,
}

/// A sample ready for evaluation, every bit in the Fourier domain.
#[derive(Clone, Debug)]
pub struct EncryptedSample {
    pub data: Vec<FourierRgsw>,
    pub label: Vec<FourierRgsw>,
}

impl SeededSample {
    pub fn expand(&self) -> EncryptedSample {
        let conv = |v: &[SeededRgsw]| v.iter().map(|c| FourierRgsw::from(&c.expand())).collect();
        EncryptedSample { data: conv(&self.data), label: conv(&self.label) }
    }
}

/// Encrypts preprocessed bits and, for training, the label's bits (LSB first).
pub fn encrypt_sample_seeded<R: Rng + ?Sized>(
    bits: &[bool],
    label: Option<usize>,
    geometry: &WisardGeometry,
    key: &SecretKey,
    rng: &mut R,
) -> Result<SeededSample> {
    if bits.len() != geometry.s {
        return Err(Error::Dimension { expected: geometry.s, found: bits.len() });
    }
    let mut enc = |b: bool| {
        let mut seed = [0u8; 32];
        rng.fill(&mut seed);
        enc_rgsw_seeded(b as u64, key, seed, rng)
    };
    let data = bits.iter().map(|&b| enc(b)).collect::<Result<_>>()?;
    let label = match label {
        None => Vec::new(),
        Some(y) if y >= geometry.l => return Err(Error::Label { label: y, classes: geometry.l }),
        Some(y) => (0..geometry.label_bits()).map(|i| enc((y >> i) & 1 == 1)).collect::<Result<_>>()?,
    };
    Ok(SeededSample { data, label })
}

pub fn encrypt_sample<R: Rng + ?Sized>(
    bits: &[bool],
    label: Option<usize>,
    geometry: &WisardGeometry,
    key: &SecretKey,
    rng: &mut R,
) -> Result<EncryptedSample> {
    Ok(encrypt_sample_seeded(bits, label, geometry, key, rng)?.expand())
}

/// Encrypted counter tables, one per RAM, plus encrypted class counts.
#[derive(Clone, Debug, PartialEq)]
pub struct HomWisardModel {
    geometry: WisardGeometry,
    params: HeParams,
    perm: Vec<usize>,
    pub rams: Vec<EncryptedLut>,
    /// Coefficient `i` counts the samples of class `i`.
    pub counts: RlweCiphertext,
}

impl HomWisardModel {
    pub fn zero(geometry: &WisardGeometry, params: &HeParams) -> Result<Self> {
        geometry.validate()?;
        params.validate()?;
        if geometry.p_log != params.p_log {
            return Err(Error::Mismatch(format!(
                "model counts mod 2^{} but {} encrypts mod 2^{}",
                geometry.p_log, params.name, params.p_log
            )));
        }
        if geometry.label_bits() > params.log_n() as usize {
            return Err(Error::InvalidParams(format!("{} classes do not fit one ciphertext", geometry.l)));
        }
        let k = geometry.lut_bits();
        Ok(Self {
            geometry: geometry.clone(),
            params: params.clone(),
            perm: permutation(geometry.r, geometry.s),
            rams: vec![EncryptedLut::zero(k, params.n); geometry.k0()],
            counts: RlweCiphertext::zero(params.n),
        })
    }

    /// Reassembles a model from parts, checking every shape.
    pub fn from_parts(
        geometry: &WisardGeometry,
        params: &HeParams,
        rams: Vec<EncryptedLut>,
        counts: RlweCiphertext,
    ) -> Result<Self> {
        let mut m = Self::zero(geometry, params)?;
        if rams.len() != m.rams.len() {
            return Err(Error::Dimension { expected: m.rams.len(), found: rams.len() });
        }
        for (z, r) in m.rams.iter().zip(&rams) {
            if r.k != z.k || r.polys.len() != z.polys.len() || r.polys.iter().any(|c| c.len() != params.n) {
                return Err(Error::Mismatch("RAM table shape differs from the geometry".into()));
            }
        }
        if counts.len() != params.n {
            return Err(Error::Dimension { expected: params.n, found: counts.len() });
        }
        m.rams = rams;
        m.counts = counts;
        Ok(m)
    }

    pub fn geometry(&self) -> &WisardGeometry {
        &self.geometry
    }

    pub fn params(&self) -> &HeParams {
        &self.params
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    fn check_sample(&self, sample: &EncryptedSample, with_label: bool) -> Result<()> {
        if sample.data.len() != self.geometry.s {
            return Err(Error::Dimension { expected: self.geometry.s, found: sample.data.len() });
        }
        if with_label && sample.label.len() != self.geometry.label_bits() {
            return Err(Error::Arity { expected: self.geometry.label_bits(), found: sample.label.len() });
        }
        let levels = self.params.gadget.levels();
        if sample.data.iter().chain(&sample.label).any(|c| c.gadget != self.params.gadget || c.levels() != levels) {
            return Err(Error::Mismatch(format!("sample not encrypted under {}", self.params.name)));
        }
        Ok(())
    }

    /// Encrypted address bits of RAM `j`, least significant first. Positions
    /// past the end of the input are a public zero.
    fn address_bits<'a>(&self, sample: &'a EncryptedSample, zero: &'a FourierRgsw, j: usize) -> Vec<&'a FourierRgsw> {
        let a = self.geometry.a;
        (j * a..(j + 1) * a)
            .map(|idx| if idx < self.geometry.s { &sample.data[self.perm[idx]] } else { zero })
            .collect()
    }

    /// Decrypts every counter and the class counts.
    pub fn decrypt(&self, key: &SecretKey) -> Result<(IntegerWisardModel, ClassCounts)> {
        self.params.check_compatible(key.params())?;
        let g = &self.geometry;
        let per_ram = g.ram_size();
        let mut counters = vec![0u32; g.l * g.k0() * per_ram];
        for (j, lut) in self.rams.iter().enumerate() {
            let values = crate::lut::decode_lut(lut, key);
            for i in 0..g.l {
                for addr in 0..per_ram {
                    counters[(i * g.k0() + j) * per_ram + addr] = values[(i << g.a) | addr] as u32;
                }
            }
        }
        let counts = dec_rlwe(&self.counts, key)[..g.l].to_vec();
        Ok((IntegerWisardModel::from_counters(g, counters)?, ClassCounts(counts)))
    }

    /// Worst coefficient error over every table and the class counts.
    pub fn noise(&self, key: &SecretKey) -> NoiseBudget {
        let mut worst = measure_noise(&self.counts, key);
        for c in self.rams.iter().flat_map(|l| &l.polys) {
            worst.max_error = worst.max_error.max(measure_noise(c, key).max_error);
        }
        worst
    }
}

fn unit_payload(params: &HeParams) -> Result<RlweCiphertext> {
    let mut m = vec![0u64; params.n];
    m[0] = 1;
    RlweCiphertext::trivial(&m, params)
}

fn public_zero(params: &HeParams) -> Result<FourierRgsw> {
    Ok(FourierRgsw::from(&trivial_rgsw(0, params)?))
}

/// Adds one to the class slot selected by `label_bits`.
pub fn he_count_labels(label_bits: &[FourierRgsw], counts: &mut RlweCiphertext, params: &HeParams) -> Result<()> {
    let bits: Vec<SelectorBit> = label_bits.iter().map(SelectorBit::Enc).collect();
    let lut = inverse_vertical_packing(&bits, &unit_payload(params)?)?;
    *counts += &lut.polys[0];
    Ok(())
}

/// Adds one encrypted sample to the model. RAM rows are updated in parallel.
pub fn he_train(model: &mut HomWisardModel, sample: &EncryptedSample) -> Result<()> {
    model.check_sample(sample, true)?;
    let payload = unit_payload(&model.params)?;
    let zero = public_zero(&model.params)?;
    let updates = (0..model.rams.len())
        .into_par_iter()
        .map(|j| {
            let addr = model.address_bits(sample, &zero, j);
            let bits: Vec<SelectorBit> = addr.into_iter().chain(&sample.label).map(SelectorBit::Enc).collect();
            inverse_vertical_packing(&bits, &payload)
        })
        .collect::<Result<Vec<_>>>()?;
    for (ram, delta) in model.rams.iter_mut().zip(&updates) {
        ram.add_assign(delta)?;
    }
    he_count_labels(&sample.label, &mut model.counts, &model.params)
}

/// Trains on a stream of samples; returns how many were consumed.
pub fn he_train_stream<I>(model: &mut HomWisardModel, samples: I) -> Result<usize>
where
    I: IntoIterator<Item = Result<EncryptedSample>>,
{
    let mut n = 0;
    for s in samples {
        he_train(model, &s?)?;
        n += 1;
    }
    Ok(n)
}

/// Entry-wise sum of two models trained under the same key and geometry.
pub fn he_merge(m1: &HomWisardModel, m2: &HomWisardModel) -> Result<HomWisardModel> {
    if m1.geometry != m2.geometry {
        return Err(Error::Mismatch("models have different geometries".into()));
    }
    m1.params.check_compatible(&m2.params)?;
    let mut out = m1.clone();
    for (a, b) in out.rams.iter_mut().zip(&m2.rams) {
        a.add_assign(b)?;
    }
    out.counts += &m2.counts;
    Ok(out)
}

/// Raw per-(class, RAM) lookups packed into RLWE ciphertexts, class-major:
/// coefficient `(i·k0 + j) mod N` of ciphertext `(i·k0 + j) / N` holds the
/// counter class `i`'s RAM `j` returns for the sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScorePack {
    pub l: usize,
    pub k0: usize,
    pub packed: Vec<RlweCiphertext>,
    pub counts: RlweCiphertext,
}

impl ScorePack {
    /// Ciphertexts needed for `l·k0` scores in dimension `n`.
    pub fn packed_len(l: usize, k0: usize, n: usize) -> usize {
        (l * k0).div_ceil(n)
    }
}

/// LWE lookups `[class i]` of RAM `j`.
fn ram_lookups(model: &HomWisardModel, sample: &EncryptedSample, zero: &FourierRgsw, j: usize) -> Result<Vec<LweCiphertext>> {
    let g = &model.geometry;
    let lut = &model.rams[j];
    let log_n = model.params.log_n() as usize;
    let addr = model.address_bits(sample, zero, j);
    if g.a > log_n {
        let label_bits = g.label_bits();
        return (0..g.l)
            .map(|i| {
                let bits: Vec<SelectorBit> = addr
                    .iter()
                    .map(|&c| SelectorBit::Enc(c))
                    .chain((0..label_bits).map(|b| SelectorBit::Clear((i >> b) & 1 == 1)))
                    .collect();
                vertical_packing(&bits, lut)
            })
            .collect();
    }
    // Every class of one polynomial shares the same rotation by the address.
    let mut out = Vec::with_capacity(g.l);
    let mut rotated: Option<(usize, RlweCiphertext)> = None;
    for i in 0..g.l {
        let base = i << g.a;
        let poly = base >> log_n;
        if rotated.as_ref().map(|(p, _)| *p) != Some(poly) {
            let mut c = lut.polys[poly].clone();
            for (b, sel) in addr.iter().enumerate() {
                cmux_rotate(sel, -(1i64 << b), &mut c);
            }
            rotated = Some((poly, c));
        }
        let (_, c) = rotated.as_ref().expect("rotated above");
        out.push(extract_lwe(c, base & (model.params.n - 1))?);
    }
    Ok(out)
}

/// Encrypted inference: every raw RAM lookup, packed for the client.
pub fn he_infer_pd(model: &HomWisardModel, sample: &EncryptedSample, ksk: &PackingKeySwitchKey) -> Result<ScorePack> {
    model.check_sample(sample, false)?;
    model.params.check_compatible(ksk.params())?;
    let g = &model.geometry;
    let zero = public_zero(&model.params)?;
    let per_ram = (0..g.k0())
        .into_par_iter()
        .map(|j| ram_lookups(model, sample, &zero, j))
        .collect::<Result<Vec<_>>>()?;
    let mut lwes = Vec::with_capacity(g.l * g.k0());
    for i in 0..g.l {
        lwes.extend(per_ram.iter().map(|r| r[i].clone()));
    }
    drop(per_ram);
    let packed = lwes
        .par_chunks(model.params.n)
        .map(|chunk| packing_key_switch(chunk, ksk))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScorePack { l: g.l, k0: g.k0(), packed, counts: model.counts.clone() })
}

/// What the client can tell about the health of a decrypted pack.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub noise: NoiseBudget,
    /// Lookups larger than their class's sample count, impossible unless a
    /// ciphertext failed to decrypt.
    pub impossible: usize,
}

impl Diagnostics {
    /// Less than one bit of headroom is treated as a likely failure.
    pub fn healthy(&self) -> bool {
        self.impossible == 0 && self.noise.headroom_bits() >= 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Finalized {
    pub class: usize,
    pub scores: Vec<f64>,
    pub lookups: Vec<u64>,
    pub counts: ClassCounts,
    pub diagnostics: Diagnostics,
}

/// Decrypts a pack and applies balancing (optional) and the activation.
pub fn client_finalize(pack: &ScorePack, key: &SecretKey, act: &ActivationSpec, balance: bool) -> Result<Finalized> {
    let total = pack.l * pack.k0;
    let n = key.params().n;
    if pack.packed.len() != total.div_ceil(n) {
        return Err(Error::Dimension { expected: total.div_ceil(n), found: pack.packed.len() });
    }
    let mut lookups: Vec<u64> = pack.packed.iter().flat_map(|c| dec_rlwe(c, key)).collect();
    lookups.truncate(total);
    let counts = ClassCounts(dec_rlwe(&pack.counts, key)[..pack.l].to_vec());
    let mut noise = measure_noise(&pack.counts, key);
    for c in &pack.packed {
        noise.max_error = noise.max_error.max(measure_noise(c, key).max_error);
    }
    let impossible = lookups.iter().enumerate().filter(|&(idx, &v)| v > counts.0[idx / pack.k0]).count();
    let scores = score_classes(pack.l, pack.k0, |i, j| lookups[i * pack.k0 + j], act, balance.then_some(&counts))?;
    Ok(Finalized { class: argmax(&scores), scores, lookups, counts, diagnostics: Diagnostics { noise, impossible } })
}
