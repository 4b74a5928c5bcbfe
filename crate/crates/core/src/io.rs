//! Binary file formats for keys, samples, models and score packs.
//!
//! Every file starts with the magic `HEWISARD`, a kind byte, a little-endian
//! `u16` version, the parameter set and a 64-bit key id. All integers are
//! little-endian. Files under an insecure parameter set only load when the
//! caller allows it.

use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::he_wnn::{HomWisardModel, ScorePack, SeededSample};
use crate::lut::{poly_count, EncryptedLut};
use crate::ring::{GadgetSpec, RingPoly};
use crate::tfhe::{HeParams, PackingKeySwitchKey, RlweCiphertext, SecretKey, SeededRgsw, PRNG_ID};
use crate::wnn::{ClassCounts, IntegerWisardModel, WisardGeometry, PERMUTATION_PRNG_ID};

pub const MAGIC: &[u8; 8] = b"HEWISARD";
pub const FORMAT_VERSION: u16 = 1;

const MAX_N: usize = 1 << 16;
const MAX_ITEMS: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum FileKind {
    SecretKey = 1,
    SwitchingKey = 2,
    Samples = 3,
    Model = 4,
    ScorePack = 5,
    PlainModel = 6,
}

impl FileKind {
    fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            1 => Self::SecretKey,
            2 => Self::SwitchingKey,
            3 => Self::Samples,
            4 => Self::Model,
            5 => Self::ScorePack,
            6 => Self::PlainModel,
            _ => return Err(Error::Format(format!("unknown file kind {v}"))),
        })
    }
}

/// Common prefix of every encrypted artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub kind: FileKind,
    pub params: HeParams,
    /// Ties ciphertext files to the key that produced them.
    pub key_id: u64,
}

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_u16::<LE>(s.len() as u16)?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = r.read_u16::<LE>()? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf)?;
    String::from_utf8(buf).map_err(|_| Error::Format("invalid utf-8 string".into()))
}

fn write_magic<W: Write>(w: &mut W, kind: FileKind) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_u8(kind as u8)?;
    w.write_u16::<LE>(FORMAT_VERSION)?;
    Ok(())
}

fn read_magic<R: Read>(r: &mut R, expected: FileKind) -> Result<()> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let kind = FileKind::from_u8(r.read_u8()?)?;
    if kind != expected {
        return Err(Error::Format(format!("expected a {expected:?} file, found {kind:?}")));
    }
    let version = r.read_u16::<LE>()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    Ok(())
}

fn write_gadget<W: Write>(w: &mut W, g: &GadgetSpec) -> Result<()> {
    w.write_u8(g.levels() as u8)?;
    w.write_u8(g.base_log() as u8)?;
    Ok(())
}

fn read_gadget<R: Read>(r: &mut R) -> Result<GadgetSpec> {
    let levels = r.read_u8()? as usize;
    GadgetSpec::new(levels, r.read_u8()? as u32)
}

pub fn write_params<W: Write>(w: &mut W, p: &HeParams) -> Result<()> {
    write_str(w, &p.name)?;
    w.write_u32::<LE>(p.n as u32)?;
    w.write_f64::<LE>(p.sigma_rel)?;
    write_gadget(w, &p.gadget)?;
    write_gadget(w, &p.ks_gadget)?;
    w.write_u8(p.p_log as u8)?;
    w.write_u8(p.insecure as u8)?;
    Ok(())
}

pub fn read_params<R: Read>(r: &mut R, allow_insecure: bool) -> Result<HeParams> {
    let name = read_str(r)?;
    let n = r.read_u32::<LE>()? as usize;
    if n > MAX_N {
        return Err(Error::Format(format!("ring dimension {n} too large")));
    }
    let p = HeParams {
        name,
        n,
        sigma_rel: r.read_f64::<LE>()?,
        gadget: read_gadget(r)?,
        ks_gadget: read_gadget(r)?,
        p_log: r.read_u8()? as u32,
        insecure: r.read_u8()? != 0,
    };
    p.check_allowed(allow_insecure)?;
    Ok(p)
}

fn write_header<W: Write>(w: &mut W, h: &Header) -> Result<()> {
    write_magic(w, h.kind)?;
    write_params(w, &h.params)?;
    w.write_u64::<LE>(h.key_id)?;
    write_str(w, PRNG_ID)?;
    Ok(())
}

pub fn read_header<R: Read>(r: &mut R, kind: FileKind, allow_insecure: bool) -> Result<Header> {
    read_magic(r, kind)?;
    let params = read_params(r, allow_insecure)?;
    let key_id = r.read_u64::<LE>()?;
    let prng = read_str(r)?;
    if prng != PRNG_ID {
        return Err(Error::Format(format!("file produced with generator {prng:?}, expected {PRNG_ID:?}")));
    }
    Ok(Header { kind, params, key_id })
}

fn write_poly<W: Write>(w: &mut W, p: &RingPoly) -> Result<()> {
    for &c in p.coeffs() {
        w.write_u64::<LE>(c)?;
    }
    Ok(())
}

fn read_poly<R: Read>(r: &mut R, n: usize) -> Result<RingPoly> {
    let mut buf = vec![0u64; n];
    r.read_u64_into::<LE>(&mut buf)?;
    RingPoly::new(buf)
}

fn write_rlwe<W: Write>(w: &mut W, c: &RlweCiphertext) -> Result<()> {
    write_poly(w, &c.a)?;
    write_poly(w, &c.b)
}

fn read_rlwe<R: Read>(r: &mut R, n: usize) -> Result<RlweCiphertext> {
    Ok(RlweCiphertext { a: read_poly(r, n)?, b: read_poly(r, n)? })
}

fn read_len<R: Read>(r: &mut R, what: &str) -> Result<usize> {
    let v = r.read_u64::<LE>()?;
    if v > MAX_ITEMS {
        return Err(Error::Format(format!("implausible {what} count {v}")));
    }
    Ok(v as usize)
}

fn write_geometry<W: Write>(w: &mut W, g: &WisardGeometry) -> Result<()> {
    for v in [g.s as u64, g.l as u64, g.a as u64, g.r] {
        w.write_u64::<LE>(v)?;
    }
    w.write_u8(g.p_log as u8)?;
    write_str(w, PERMUTATION_PRNG_ID)
}

fn read_geometry<R: Read>(r: &mut R) -> Result<WisardGeometry> {
    let s = read_len(r, "input bit")?;
    let l = read_len(r, "class")?;
    let a = read_len(r, "address bit")?;
    let seed = r.read_u64::<LE>()?;
    let p_log = r.read_u8()? as u32;
    let prng = read_str(r)?;
    if prng != PERMUTATION_PRNG_ID {
        return Err(Error::Format(format!("permutation generator {prng:?} unsupported")));
    }
    WisardGeometry::new(s, l, a, seed, p_log)
}

pub fn write_secret_key<W: Write>(w: &mut W, key: &SecretKey, key_id: u64) -> Result<()> {
    write_header(w, &Header { kind: FileKind::SecretKey, params: key.params().clone(), key_id })?;
    let bits: Vec<u8> = key.lwe_key().iter().map(|&b| b as u8).collect();
    w.write_all(&bits)?;
    Ok(())
}

pub fn read_secret_key<R: Read>(r: &mut R, allow_insecure: bool) -> Result<(SecretKey, u64)> {
    let h = read_header(r, FileKind::SecretKey, allow_insecure)?;
    let mut bits = vec![0u8; h.params.n];
    r.read_exact(&mut bits)?;
    let bits: Vec<u64> = bits.into_iter().map(u64::from).collect();
    Ok((SecretKey::from_bits(&h.params, &bits)?, h.key_id))
}

pub fn write_switching_key<W: Write>(w: &mut W, ksk: &PackingKeySwitchKey, key_id: u64) -> Result<()> {
    write_header(w, &Header { kind: FileKind::SwitchingKey, params: ksk.params().clone(), key_id })?;
    for row in ksk.rows() {
        write_rlwe(w, row)?;
    }
    Ok(())
}

pub fn read_switching_key<R: Read>(r: &mut R, allow_insecure: bool) -> Result<(PackingKeySwitchKey, u64)> {
    let h = read_header(r, FileKind::SwitchingKey, allow_insecure)?;
    let n = h.params.n;
    let rows = (0..n * h.params.ks_gadget.levels()).map(|_| read_rlwe(r, n)).collect::<Result<_>>()?;
    Ok((PackingKeySwitchKey::from_rows(h.params, rows)?, h.key_id))
}

/// Streams seeded samples to a writer; call [`SampleWriter::finish`] at the end.
pub struct SampleWriter<W: Write> {
    w: W,
    params: HeParams,
    geometry: WisardGeometry,
    written: u64,
}

impl<W: Write> SampleWriter<W> {
    pub fn new(mut w: W, params: &HeParams, geometry: &WisardGeometry, key_id: u64) -> Result<Self> {
        write_header(&mut w, &Header { kind: FileKind::Samples, params: params.clone(), key_id })?;
        write_geometry(&mut w, geometry)?;
        Ok(Self { w, params: params.clone(), geometry: geometry.clone(), written: 0 })
    }

    pub fn push(&mut self, sample: &SeededSample) -> Result<()> {
        if sample.data.len() != self.geometry.s {
            return Err(Error::Dimension { expected: self.geometry.s, found: sample.data.len() });
        }
        let rows = 2 * self.params.gadget.levels();
        self.w.write_u8(1)?;
        self.w.write_u32::<LE>(sample.label.len() as u32)?;
        for c in sample.data.iter().chain(&sample.label) {
            if c.gadget != self.params.gadget || c.bodies.len() != rows {
                return Err(Error::Mismatch(format!("sample not encrypted under {}", self.params.name)));
            }
            self.w.write_all(&c.seed)?;
            for b in &c.bodies {
                write_poly(&mut self.w, b)?;
            }
        }
        self.written += 1;
        Ok(())
    }

    /// Writes the end marker and returns the sample count.
    pub fn finish(mut self) -> Result<u64> {
        self.w.write_u8(0)?;
        self.w.flush()?;
        Ok(self.written)
    }
}

/// Reads seeded samples one at a time.
pub struct SampleReader<R: Read> {
    r: R,
    pub header: Header,
    pub geometry: WisardGeometry,
    done: bool,
}

impl<R: Read> SampleReader<R> {
    pub fn new(mut r: R, allow_insecure: bool) -> Result<Self> {
        let header = read_header(&mut r, FileKind::Samples, allow_insecure)?;
        let geometry = read_geometry(&mut r)?;
        Ok(Self { r, header, geometry, done: false })
    }

    fn read_one(&mut self) -> Result<Option<SeededSample>> {
        match self.r.read_u8()? {
            0 => return Ok(None),
            1 => {}
            t => return Err(Error::Format(format!("bad record tag {t}"))),
        }
        let labels = self.r.read_u32::<LE>()? as usize;
        if labels != 0 && labels != self.geometry.label_bits() {
            return Err(Error::Format(format!("record with {labels} label bits")));
        }
        let p = &self.header.params;
        let rows = 2 * p.gadget.levels();
        let mut read = || -> Result<SeededRgsw> {
            let mut seed = [0u8; 32];
            self.r.read_exact(&mut seed)?;
            let bodies = (0..rows).map(|_| read_poly(&mut self.r, p.n)).collect::<Result<_>>()?;
            Ok(SeededRgsw { gadget: p.gadget, seed, bodies })
        };
        let data = (0..self.geometry.s).map(|_| read()).collect::<Result<_>>()?;
        let label = (0..labels).map(|_| read()).collect::<Result<_>>()?;
        Ok(Some(SeededSample { data, label }))
    }
}

impl<R: Read> Iterator for SampleReader<R> {
    type Item = Result<SeededSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let out = self.read_one().transpose();
        if !matches!(out, Some(Ok(_))) {
            self.done = true;
        }
        out
    }
}

pub fn write_model<W: Write>(w: &mut W, model: &HomWisardModel, key_id: u64) -> Result<()> {
    write_header(w, &Header { kind: FileKind::Model, params: model.params().clone(), key_id })?;
    write_geometry(w, model.geometry())?;
    for lut in &model.rams {
        for c in &lut.polys {
            write_rlwe(w, c)?;
        }
    }
    write_rlwe(w, &model.counts)
}

pub fn read_model<R: Read>(r: &mut R, allow_insecure: bool) -> Result<(HomWisardModel, u64)> {
    let h = read_header(r, FileKind::Model, allow_insecure)?;
    let g = read_geometry(r)?;
    let n = h.params.n;
    let k = g.lut_bits();
    let rams = (0..g.k0())
        .map(|_| {
            let polys = (0..poly_count(k, n)).map(|_| read_rlwe(r, n)).collect::<Result<_>>()?;
            Ok(EncryptedLut { polys, k })
        })
        .collect::<Result<_>>()?;
    let counts = read_rlwe(r, n)?;
    Ok((HomWisardModel::from_parts(&g, &h.params, rams, counts)?, h.key_id))
}

pub fn write_score_pack<W: Write>(w: &mut W, pack: &ScorePack, params: &HeParams, key_id: u64) -> Result<()> {
    write_header(w, &Header { kind: FileKind::ScorePack, params: params.clone(), key_id })?;
    w.write_u64::<LE>(pack.l as u64)?;
    w.write_u64::<LE>(pack.k0 as u64)?;
    w.write_u64::<LE>(pack.packed.len() as u64)?;
    for c in &pack.packed {
        write_rlwe(w, c)?;
    }
    write_rlwe(w, &pack.counts)
}

pub fn read_score_pack<R: Read>(r: &mut R, allow_insecure: bool) -> Result<(ScorePack, Header)> {
    let h = read_header(r, FileKind::ScorePack, allow_insecure)?;
    let n = h.params.n;
    let l = read_len(r, "class")?;
    let k0 = read_len(r, "RAM")?;
    let count = read_len(r, "ciphertext")?;
    if count != (l * k0).div_ceil(n) {
        return Err(Error::Format(format!("{count} ciphertexts cannot hold {l}x{k0} scores")));
    }
    let packed = (0..count).map(|_| read_rlwe(r, n)).collect::<Result<_>>()?;
    let counts = read_rlwe(r, n)?;
    Ok((ScorePack { l, k0, packed, counts }, h))
}

/// Plaintext counters: magic, geometry, the `u32` counter tensor, class counts.
pub fn write_plain_model<W: Write>(w: &mut W, model: &IntegerWisardModel, counts: &ClassCounts) -> Result<()> {
    write_magic(w, FileKind::PlainModel)?;
    write_geometry(w, model.geometry())?;
    for &c in model.counters() {
        w.write_u32::<LE>(c)?;
    }
    for &c in &counts.0 {
        w.write_u64::<LE>(c)?;
    }
    Ok(())
}

pub fn read_plain_model<R: Read>(r: &mut R) -> Result<(IntegerWisardModel, ClassCounts)> {
    read_magic(r, FileKind::PlainModel)?;
    let g = read_geometry(r)?;
    let mut counters = vec![0u32; g.l * g.k0() * g.ram_size()];
    r.read_u32_into::<LE>(&mut counters)?;
    let mut counts = vec![0u64; g.l];
    r.read_u64_into::<LE>(&mut counts)?;
    Ok((IntegerWisardModel::from_counters(&g, counters)?, ClassCounts(counts)))
}

/// Human-readable `key = value` lines.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::Parse(format!("manifest lacks {key:?}")))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("line {}: expected key = value", i + 1)))?;
            m.set(k.trim(), v.trim());
        }
        Ok(m)
    }
}

impl std::fmt::Display for Manifest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
