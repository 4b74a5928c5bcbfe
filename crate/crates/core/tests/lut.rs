use hewisard::lut::*;
use hewisard::tfhe::*;
use hewisard::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn insecure() -> SecretKey {
    keygen(&HeParams::insecure(64, 6), 21).unwrap().0
}

fn enc_bits(m: usize, k: usize, key: &SecretKey, rng: &mut ChaCha8Rng) -> Vec<FourierRgsw> {
    (0..k).map(|i| FourierRgsw::new(&enc_rgsw(((m >> i) & 1) as u64, key, rng).unwrap())).collect()
}

fn as_selectors(bits: &[FourierRgsw]) -> Vec<SelectorBit<'_>> {
    bits.iter().map(SelectorBit::Enc).collect()
}

fn random_table(k: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..1usize << k).map(|_| rng.random_range(0..p)).collect()
}

#[test]
fn encode_layout() {
    let params = HeParams::insecure(64, 6);
    let identity: Vec<u64> = (0..64).collect();
    let lut = encode_lut(&identity, &params).unwrap();
    assert_eq!(lut.polys.len(), 1);
    let key = insecure();
    assert_eq!(dec_rlwe(&lut.polys[0], &key), identity);

    let zeros = encode_lut(&[0; 256], &params).unwrap();
    assert_eq!(zeros.polys.len(), 4);
    assert!(zeros.polys.iter().all(|c| c.a.is_zero() && c.b.is_zero()));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let table = random_table(9, 64, &mut rng);
    let lut = encode_lut(&table, &params).unwrap();
    assert_eq!(decode_lut(&lut, &key), table);
    // Entry m sits in polynomial m / N at coefficient m mod N.
    assert_eq!(dec_rlwe(&lut.polys[300 / 64], &key)[300 % 64], table[300]);

    assert!(matches!(encode_lut(&[1, 2, 3], &params), Err(Error::NotPowerOfTwo(3))));
    assert!(encode_lut(&[64, 0], &params).is_err());
}

#[test]
fn clear_selection_is_plain_lookup() {
    let params = HeParams::insecure(64, 6);
    let key = insecure();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let table = random_table(8, 64, &mut rng);
    let lut = encode_lut(&table, &params).unwrap();
    for (m, &want) in table.iter().enumerate() {
        let lwe = vertical_packing(&SelectorBit::from_index(m, 8), &lut).unwrap();
        assert_eq!(lwe_error(&lwe, want, &key), 0);
    }
    assert!(matches!(
        vertical_packing(&SelectorBit::from_index(0, 7), &lut),
        Err(Error::Arity { expected: 8, found: 7 })
    ));
}

#[test]
fn vertical_packing_exhaustive_k6() {
    let key = insecure();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let table = random_table(6, 64, &mut rng);
    let lut = encode_lut(&table, key.params()).unwrap();
    for (m, &want) in table.iter().enumerate() {
        let bits = enc_bits(m, 6, &key, &mut rng);
        assert_eq!(dec_lwe(&vertical_packing(&as_selectors(&bits), &lut).unwrap(), &key), want, "m = {m}");
    }
}

#[test]
fn mixed_bits_agree_with_encrypted_bits() {
    // k = 8 at N = 64: two tree bits above six rotation bits.
    let key = insecure();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let table = random_table(8, 64, &mut rng);
    let mut lut = encode_lut(&table, key.params()).unwrap();
    // Replace the trivial table with a fresh encryption so noise is present.
    for c in &mut lut.polys {
        let m = dec_rlwe(c, &key);
        *c = enc_rlwe(&m, &key, &mut rng).unwrap();
    }
    for _ in 0..40 {
        let m = rng.random_range(0..256usize);
        let enc = enc_bits(m, 8, &key, &mut rng);
        let mask: u32 = rng.random_range(0..256);
        let bits: Vec<SelectorBit> = (0..8)
            .map(|i| if mask >> i & 1 == 1 { SelectorBit::Clear((m >> i) & 1 == 1) } else { SelectorBit::Enc(&enc[i]) })
            .collect();
        let all_enc = dec_lwe(&vertical_packing(&as_selectors(&enc), &lut).unwrap(), &key);
        let mixed = dec_lwe(&vertical_packing(&bits, &lut).unwrap(), &key);
        assert_eq!(all_enc, table[m]);
        assert_eq!(mixed, table[m]);
    }
}

#[test]
fn vertical_packing_he1_k14() {
    let params = HeParams::he1(12);
    let (key, _) = keygen(&params, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let table = random_table(14, params.p(), &mut rng);
    let lut = encode_lut(&table, &params).unwrap();
    for _ in 0..3 {
        let m = rng.random_range(0..1usize << 14);
        let bits = enc_bits(m, 14, &key, &mut rng);
        let lwe = vertical_packing(&as_selectors(&bits), &lut).unwrap();
        assert_eq!(dec_lwe(&lwe, &key), table[m]);
    }
}

#[test]
fn cdemux_routes_and_inverts() {
    let key = insecure();
    let params = key.params().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let s = rng.random_range(0..2u64);
        let v: Vec<u64> = (0..64).map(|_| rng.random_range(0..64)).collect();
        let d = enc_rlwe(&v, &key, &mut rng).unwrap();
        let sel = FourierRgsw::new(&enc_rgsw(s, &key, &mut rng).unwrap());
        let (off, on) = cdemux(&sel, &d);
        let (want_off, want_on) = if s == 1 { (vec![0; 64], v.clone()) } else { (v.clone(), vec![0; 64]) };
        assert_eq!(dec_rlwe(&off, &key), want_off);
        assert_eq!(dec_rlwe(&on, &key), want_on);
        assert_eq!(dec_rlwe(&off.add(&on).unwrap(), &key), v);
        assert_eq!(dec_rlwe(&cmux(&sel, &on, &off).unwrap(), &key), v);
    }
    let _ = params;
}

#[test]
fn ivp_zero_index_and_clear_rejection() {
    let key = insecure();
    let params = key.params().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let payload = RlweCiphertext::trivial(&one_hot(64, 1), &params).unwrap();
    let bits = enc_bits(0, 6, &key, &mut rng);
    let lut = inverse_vertical_packing(&as_selectors(&bits), &payload).unwrap();
    assert_eq!(decode_lut(&lut, &key), one_hot(64, 1));
    let mut mixed = as_selectors(&bits);
    mixed[2] = SelectorBit::Clear(false);
    assert!(matches!(inverse_vertical_packing(&mixed, &payload), Err(Error::ClearSelector(_))));
}

fn one_hot(len: usize, v: u64) -> Vec<u64> {
    let mut out = vec![0; len];
    out[0] = v;
    out
}

#[test]
fn ivp_exhaustive_single_valued() {
    // k = 8 at N = 64 exercises both the rotation and the CDEMUX tree.
    let key = insecure();
    let params = key.params().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for m in 0..256usize {
        let v = rng.random_range(1..64u64);
        let payload = RlweCiphertext::trivial(&one_hot(64, v), &params).unwrap();
        let bits = enc_bits(m, 8, &key, &mut rng);
        let lut = inverse_vertical_packing(&as_selectors(&bits), &payload).unwrap();
        let entries = decode_lut(&lut, &key);
        let nonzero: Vec<usize> = (0..256).filter(|&i| entries[i] != 0).collect();
        assert_eq!(nonzero, vec![m]);
        assert_eq!(entries[m], v);
    }
}

#[test]
fn round_trip_he0() {
    let params = HeParams::he0(8);
    let (key, _) = keygen(&params, 9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..3 {
        let m = rng.random_range(0..1usize << 13);
        let v = rng.random_range(0..params.p());
        let payload = enc_rlwe(&one_hot(params.n, v), &key, &mut rng).unwrap();
        let bits = enc_bits(m, 13, &key, &mut rng);
        let lut = inverse_vertical_packing(&as_selectors(&bits), &payload).unwrap();
        assert_eq!(dec_lwe(&vertical_packing(&as_selectors(&bits), &lut).unwrap(), &key), v);
    }
}

#[test]
fn lut_addition() {
    let key = insecure();
    let params = key.params().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let one = RlweCiphertext::trivial(&one_hot(64, 1), &params).unwrap();
    let b3 = enc_bits(3, 6, &key, &mut rng);
    let b9 = enc_bits(9, 6, &key, &mut rng);
    let at3 = inverse_vertical_packing(&as_selectors(&b3), &one).unwrap();
    let at9 = inverse_vertical_packing(&as_selectors(&b9), &one).unwrap();
    let zero = EncryptedLut::zero(6, 64);
    assert_eq!(lut_add(&at3, &zero).unwrap(), at3);
    let both = decode_lut(&lut_add(&at3, &at9).unwrap(), &key);
    assert_eq!((both[3], both[9], both.iter().sum::<u64>()), (1, 1, 2));
    let twice = decode_lut(&lut_add(&at3, &at3).unwrap(), &key);
    assert_eq!(twice[3], 2);
    assert!(matches!(lut_add(&at3, &EncryptedLut::zero(7, 64)), Err(Error::Mismatch(_))));

    // Linearity of lookups over table sums.
    let ta = random_table(6, 64, &mut rng);
    let tb = random_table(6, 64, &mut rng);
    let la = encode_lut(&ta, &params).unwrap();
    let lb = encode_lut(&tb, &params).unwrap();
    let sum = lut_add(&la, &lb).unwrap();
    for m in [0usize, 17, 63] {
        let bits = enc_bits(m, 6, &key, &mut rng);
        let sel = as_selectors(&bits);
        let got = dec_lwe(&vertical_packing(&sel, &sum).unwrap(), &key);
        let a = dec_lwe(&vertical_packing(&sel, &la).unwrap(), &key);
        let b = dec_lwe(&vertical_packing(&sel, &lb).unwrap(), &key);
        assert_eq!(got, (a + b) % 64);
    }
}
