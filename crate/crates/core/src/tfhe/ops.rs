use super::{FourierRgsw, LweCiphertext, PackingKeySwitchKey, RlweCiphertext};
use crate::error::{Error, Result};
use crate::ring::fft::{self, mul_add_assign, FourierPoly};

/// `out += C ⊡ c`.
pub fn external_product_add(sel: &FourierRgsw, c: &RlweCiphertext, out: &mut RlweCiphertext) {
    let n = c.len();
    let plan = fft::plan(n);
    let g = sel.gadget;
    let levels = g.levels();
    let mut digits = vec![vec![0i64; n]; levels];
    let mut acc_a = FourierPoly::zero(n);
    let mut acc_b = FourierPoly::zero(n);
    let mut spec = FourierPoly::zero(n);
    for (half, poly) in [&c.b, &c.a].into_iter().enumerate() {
        g.decompose_into(poly.coeffs(), &mut digits);
        for (t, level) in digits.iter().enumerate() {
            plan.forward_i64(level, &mut spec);
            let row = &sel.rows[half * levels + t];
            mul_add_assign(&mut acc_a, &spec, &row[0]);
            mul_add_assign(&mut acc_b, &spec, &row[1]);
        }
    }
    plan.backward_add(&mut acc_a, out.a.coeffs_mut());
    plan.backward_add(&mut acc_b, out.b.coeffs_mut());
}

/// RLWE encryption of `m0 · m1` from `C = RGSW(m0)` and `c = RLWE(m1)`.
pub fn external_product(sel: &FourierRgsw, c: &RlweCiphertext) -> RlweCiphertext {
    let mut out = RlweCiphertext::zero(c.len());
    external_product_add(sel, c, &mut out);
    out
}

/// `c2 + C ⊡ (c1 − c2)`: selects `c1` when `C` encrypts 1, else `c2`.
pub fn cmux(sel: &FourierRgsw, c1: &RlweCiphertext, c2: &RlweCiphertext) -> Result<RlweCiphertext> {
    let diff = c1.sub(c2)?;
    let mut out = c2.clone();
    external_product_add(sel, &diff, &mut out);
    Ok(out)
}

/// Multiplies `c` by `X^e` when `C` encrypts 1, in place.
pub fn cmux_rotate(sel: &FourierRgsw, e: i64, c: &mut RlweCiphertext) {
    let mut diff = c.monomial_mul(e);
    diff -= c;
    external_product_add(sel, &diff, c);
}

/// Encrypts `v · X^(−Σ S_i·I_i)` given `c = RLWE(v)` and `C_i = RGSW(S_i)`.
pub fn blind_rotate(c: &RlweCiphertext, sels: &[&FourierRgsw], exps: &[i64]) -> Result<RlweCiphertext> {
    if sels.len() != exps.len() {
        return Err(Error::Arity { expected: exps.len(), found: sels.len() });
    }
    let mut acc = c.clone();
    for (sel, &e) in sels.iter().zip(exps) {
        cmux_rotate(sel, -e, &mut acc);
    }
    Ok(acc)
}

/// LWE encryption of coefficient `i` of the message of `c`.
pub fn extract_lwe(c: &RlweCiphertext, i: usize) -> Result<LweCiphertext> {
    let n = c.len();
    if i >= n {
        return Err(Error::OutOfRange { index: i, bound: n });
    }
    let src = c.a.coeffs();
    let mut a = Vec::with_capacity(n);
    a.extend(src[..=i].iter().rev().copied());
    a.extend(src[i + 1..].iter().rev().map(|x| x.wrapping_neg()));
    Ok(LweCiphertext { a, b: c.b.coeffs()[i] })
}

/// Packs up to `N` LWE ciphertexts into one RLWE ciphertext whose coefficient
/// `i` encrypts the message of `cs[i]`.
pub fn packing_key_switch(cs: &[LweCiphertext], ksk: &PackingKeySwitchKey) -> Result<RlweCiphertext> {
    let params = ksk.params();
    let n = params.n;
    if cs.len() > n {
        return Err(Error::OutOfRange { index: cs.len(), bound: n + 1 });
    }
    if let Some(bad) = cs.iter().find(|c| c.a.len() != n) {
        return Err(Error::Dimension { expected: n, found: bad.a.len() });
    }
    let mut out = RlweCiphertext::zero(n);
    for (dst, c) in out.b.coeffs_mut().iter_mut().zip(cs) {
        *dst = c.b;
    }
    if cs.is_empty() {
        return Ok(out);
    }
    let g = params.ks_gadget;
    let levels = g.levels();
    let plan = fft::plan(n);
    let spectra = ksk.spectra();
    let mut digits = vec![vec![0i64; n]; levels];
    let mut scalar = vec![0i64; levels];
    let mut acc_a = FourierPoly::zero(n);
    let mut acc_b = FourierPoly::zero(n);
    let mut spec = FourierPoly::zero(n);
    for j in 0..n {
        for (i, c) in cs.iter().enumerate() {
            g.decompose_scalar(c.a[j], &mut scalar);
            for (level, &d) in digits.iter_mut().zip(&scalar) {
                level[i] = d;
            }
        }
        for (t, level) in digits.iter().enumerate() {
            plan.forward_i64(level, &mut spec);
            let row = &spectra[j * levels + t];
            mul_add_assign(&mut acc_a, &spec, &row[0]);
            mul_add_assign(&mut acc_b, &spec, &row[1]);
        }
    }
    let mut sub = RlweCiphertext::zero(n);
    plan.backward_add(&mut acc_a, sub.a.coeffs_mut());
    plan.backward_add(&mut acc_b, sub.b.coeffs_mut());
    out -= &sub;
    Ok(out)
}

