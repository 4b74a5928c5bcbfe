//! Encrypted lookup tables in vertical-packing layout.
//!
//! A table of `2^k` entries is spread over `max(1, 2^(k − log2 N))` RLWE
//! ciphertexts. Selector bits are passed least-significant first: `bits[i]` is
//! bit `i` of the entry index `m`. The low `log2 N` bits pick a coefficient
//! (through a blind rotation) and the remaining high bits pick a polynomial
//! (through a CMUX tree walked from the most significant bit down). Entry `m`
//! therefore lives in polynomial `m >> log2 N` at coefficient `m mod N`.
//!
//! [`inverse_vertical_packing`] mirrors this: a blind rotation with negated
//! exponents moves a payload to coefficient `m mod N`, then a CDEMUX tree over
//! the high bits routes it to polynomial `m >> log2 N`.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::tfhe::{
    cmux, cmux_rotate, dec_rlwe, external_product, extract_lwe, FourierRgsw, HeParams, LweCiphertext,
    RlweCiphertext, SecretKey,
};

/// One selector bit, public or encrypted.
#[derive(Clone, Copy, Debug)]
pub enum SelectorBit<'a> {
    Clear(bool),
    Enc(&'a FourierRgsw),
}

impl SelectorBit<'_> {
    pub fn from_index(m: usize, k: usize) -> Vec<SelectorBit<'static>> {
        (0..k).map(|i| SelectorBit::Clear((m >> i) & 1 == 1)).collect()
    }
}

/// A `2^k`-entry table of values mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncryptedLut {
    pub polys: Vec<RlweCiphertext>,
    pub k: usize,
}

/// Number of polynomials holding `2^k` entries in dimension `n`.
pub fn poly_count(k: usize, n: usize) -> usize {
    let log_n = n.trailing_zeros() as usize;
    1 << k.saturating_sub(log_n)
}

impl EncryptedLut {
    pub fn zero(k: usize, n: usize) -> Self {
        Self { polys: vec![RlweCiphertext::zero(n); poly_count(k, n)], k }
    }

    pub fn n(&self) -> usize {
        self.polys[0].len()
    }

    pub fn entries(&self) -> usize {
        1 << self.k
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.k != other.k || self.n() != other.n() {
            return Err(Error::Mismatch(format!(
                "tables of 2^{} entries at N={} and 2^{} entries at N={}",
                self.k,
                self.n(),
                other.k,
                other.n()
            )));
        }
        Ok(())
    }

    /// Entry-wise sum, in place.
    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.same_shape(other)?;
        for (a, b) in self.polys.iter_mut().zip(&other.polys) {
            *a += b;
        }
        Ok(())
    }
}

/// Noiseless table with entry `m` equal to `values[m]`.
pub fn encode_lut(values: &[u64], params: &HeParams) -> Result<EncryptedLut> {
    if !values.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(values.len()));
    }
    let k = values.len().trailing_zeros() as usize;
    let n = params.n;
    let polys = values
        .chunks(n)
        .map(|chunk| {
            let mut m = vec![0u64; n];
            m[..chunk.len()].copy_from_slice(chunk);
            RlweCiphertext::trivial(&m, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EncryptedLut { polys, k })
}

/// Decrypts all `2^k` entries.
pub fn decode_lut(lut: &EncryptedLut, key: &SecretKey) -> Vec<u64> {
    let mut out: Vec<u64> = lut.polys.iter().flat_map(|c| dec_rlwe(c, key)).collect();
    out.truncate(lut.entries());
    out
}

/// Entry-wise sum of two tables of the same shape.
pub fn lut_add(a: &EncryptedLut, b: &EncryptedLut) -> Result<EncryptedLut> {
    let mut out = a.clone();
    out.add_assign(b)?;
    Ok(out)
}

fn check_arity(bits: usize, k: usize) -> Result<()> {
    if bits != k {
        return Err(Error::Arity { expected: k, found: bits });
    }
    Ok(())
}

/// Selects the polynomial addressed by the high selector bits.
fn select_poly<'l>(bits: &[SelectorBit], polys: &'l [RlweCiphertext], log_n: usize) -> Result<Cow<'l, RlweCiphertext>> {
    let mut list: Cow<'l, [RlweCiphertext]> = Cow::Borrowed(polys);
    for bit in bits.iter().skip(log_n).rev() {
        let half = list.len() / 2;
        list = match (*bit, list) {
            (SelectorBit::Clear(b), Cow::Borrowed(l)) => Cow::Borrowed(if b { &l[half..] } else { &l[..half] }),
            (SelectorBit::Clear(b), Cow::Owned(mut l)) => {
                if b {
                    l.drain(..half);
                } else {
                    l.truncate(half);
                }
                Cow::Owned(l)
            }
            (SelectorBit::Enc(sel), l) => {
                let (lo, hi) = l.split_at(half);
                Cow::Owned(lo.iter().zip(hi).map(|(c0, c1)| cmux(sel, c1, c0)).collect::<Result<_>>()?)
            }
        };
    }
    debug_assert_eq!(list.len(), 1);
    Ok(match list {
        Cow::Borrowed(l) => Cow::Borrowed(&l[0]),
        Cow::Owned(mut l) => Cow::Owned(l.swap_remove(0)),
    })
}

/// Rotates `c` so that the entry addressed by the encrypted low bits reaches
/// the offset formed by the clear low bits, and returns that offset.
fn rotate_low(bits: &[SelectorBit], c: &mut RlweCiphertext, log_n: usize) -> usize {
    let mut offset = 0;
    for (i, bit) in bits.iter().take(log_n).enumerate() {
        match *bit {
            SelectorBit::Clear(b) => offset |= (b as usize) << i,
            SelectorBit::Enc(sel) => cmux_rotate(sel, -(1i64 << i), c),
        }
    }
    offset
}

/// LWE encryption of `lut[m]`, where `m` is the index spelled by `bits`.
pub fn vertical_packing(bits: &[SelectorBit], lut: &EncryptedLut) -> Result<LweCiphertext> {
    check_arity(bits.len(), lut.k)?;
    let log_n = lut.n().trailing_zeros() as usize;
    let poly = select_poly(bits, &lut.polys, log_n)?;
    let needs_rotation = bits.iter().take(log_n).any(|b| matches!(b, SelectorBit::Enc(_)));
    if !needs_rotation {
        let offset = bits.iter().take(log_n).enumerate().fold(0, |o, (i, b)| match b {
            SelectorBit::Clear(true) => o | 1 << i,
            _ => o,
        });
        return extract_lwe(&poly, offset);
    }
    let mut c = poly.into_owned();
    let offset = rotate_low(bits, &mut c, log_n);
    extract_lwe(&c, offset)
}

/// `(d − C⊡d, C⊡d)`: routes `d` to the second output when `C` encrypts 1.
pub fn cdemux(sel: &FourierRgsw, d: &RlweCiphertext) -> (RlweCiphertext, RlweCiphertext) {
    let on = external_product(sel, d);
    let mut off = d.clone();
    off -= &on;
    (off, on)
}

/// A table that is zero everywhere except entry `m`, which holds the constant
/// term of `payload`. Every selector bit must be encrypted.
pub fn inverse_vertical_packing(bits: &[SelectorBit], payload: &RlweCiphertext) -> Result<EncryptedLut> {
    let sels = bits
        .iter()
        .map(|b| match b {
            SelectorBit::Enc(s) => Ok(*s),
            SelectorBit::Clear(_) => Err(Error::ClearSelector("inverse vertical packing")),
        })
        .collect::<Result<Vec<_>>>()?;
    let log_n = payload.len().trailing_zeros() as usize;
    let mut c = payload.clone();
    for (i, sel) in sels.iter().take(log_n).enumerate() {
        cmux_rotate(sel, 1i64 << i, &mut c);
    }
    let mut list = vec![c];
    for sel in sels.iter().skip(log_n) {
        let (offs, ons): (Vec<_>, Vec<_>) = list.iter().map(|d| cdemux(sel, d)).unzip();
        list = offs;
        list.extend(ons);
    }
    Ok(EncryptedLut { polys: list, k: bits.len() })
}
