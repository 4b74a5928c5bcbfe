use hewisard::he_wnn::*;
use hewisard::io::*;
use hewisard::tfhe::{dec_rgsw, keygen, HeParams, PackingKeySwitchKey, SecretKey};
use hewisard::wnn::*;
use hewisard::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn exact(n: usize, p_log: u32) -> (SecretKey, PackingKeySwitchKey) {
    keygen(&HeParams::insecure(n, p_log).with_sigma_rel(0.0), 3).unwrap()
}

fn noisy(n: usize, p_log: u32) -> (SecretKey, PackingKeySwitchKey) {
    keygen(&HeParams::insecure(n, p_log), 4).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, s: usize, l: usize) -> Vec<(Vec<bool>, usize)> {
    (0..n).map(|_| ((0..s).map(|_| rng.random_bool(0.4)).collect(), rng.random_range(0..l))).collect()
}

fn encrypt_all(
    set: &[(Vec<bool>, usize)],
    g: &WisardGeometry,
    sk: &SecretKey,
    rng: &mut ChaCha8Rng,
    labelled: bool,
) -> Vec<EncryptedSample> {
    set.iter().map(|(x, y)| encrypt_sample(x, labelled.then_some(*y), g, sk, rng).unwrap()).collect()
}

fn train_enc(g: &WisardGeometry, sk: &SecretKey, samples: &[EncryptedSample]) -> HomWisardModel {
    let mut m = HomWisardModel::zero(g, sk.params()).unwrap();
    for s in samples {
        he_train(&mut m, s).unwrap();
    }
    m
}

fn plain(set: &[(Vec<bool>, usize)], g: &WisardGeometry) -> (IntegerWisardModel, ClassCounts) {
    train_integer(set.iter().map(|(x, y)| (x.as_slice(), *y)), g).unwrap()
}

#[test]
fn sample_encryption_round_trips_and_is_deterministic() {
    let (sk, _) = noisy(64, 4);
    let g = WisardGeometry::new(10, 5, 3, 0, 4).unwrap();
    let bits: Vec<bool> = (0..10).map(|i| i % 3 == 0).collect();
    let a = encrypt_sample_seeded(&bits, Some(4), &g, &sk, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let b = encrypt_sample_seeded(&bits, Some(4), &g, &sk, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(a, b);
    let got: Vec<bool> = a.data.iter().map(|c| dec_rgsw(&c.expand(), &sk) == 1).collect();
    assert_eq!(got, bits);
    let label: Vec<u64> = a.label.iter().map(|c| dec_rgsw(&c.expand(), &sk)).collect();
    assert_eq!(label, vec![0, 0, 1]);
    assert!(matches!(
        encrypt_sample_seeded(&bits[..9], None, &g, &sk, &mut ChaCha8Rng::seed_from_u64(1)),
        Err(Error::Dimension { .. })
    ));
    assert!(matches!(
        encrypt_sample_seeded(&bits, Some(5), &g, &sk, &mut ChaCha8Rng::seed_from_u64(1)),
        Err(Error::Label { .. })
    ));
}

#[test]
fn empty_training_gives_zero_model() {
    let (sk, _) = exact(64, 4);
    let g = WisardGeometry::new(12, 3, 4, 1, 4).unwrap();
    let m = HomWisardModel::zero(&g, sk.params()).unwrap();
    let (dec, counts) = m.decrypt(&sk).unwrap();
    assert_eq!(dec, IntegerWisardModel::zero(&g).unwrap());
    assert_eq!(counts, ClassCounts::zeros(3));
}

#[test]
fn training_matches_plaintext_at_zero_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (sk, _) = exact(64, 5);
    // Address sizes below, at and above log2 N, label field inside and across polynomials.
    for (s, l, a) in [(12, 2, 3), (20, 3, 5), (13, 4, 6), (14, 3, 7)] {
        let g = WisardGeometry::new(s, l, a, 9, 5).unwrap();
        let set = random_set(&mut rng, 12, s, l);
        let enc = encrypt_all(&set, &g, &sk, &mut rng, true);
        let m = train_enc(&g, &sk, &enc);
        assert_eq!(m.decrypt(&sk).unwrap(), plain(&set, &g), "s={s} l={l} a={a}");
    }
}

#[test]
fn one_sample_trace() {
    let (sk, ksk) = exact(64, 4);
    let g = WisardGeometry::new(16, 3, 4, 2, 4).unwrap();
    let x: Vec<bool> = (0..16).map(|i| i % 5 == 1).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let enc = encrypt_sample(&x, Some(2), &g, &sk, &mut rng).unwrap();
    let m = train_enc(&g, &sk, std::slice::from_ref(&enc));
    assert_eq!(m.decrypt(&sk).unwrap(), plain(&[(x.clone(), 2)], &g));
    let query = encrypt_sample(&x, None, &g, &sk, &mut rng).unwrap();
    let pack = he_infer_pd(&m, &query, &ksk).unwrap();
    let fin = client_finalize(&pack, &sk, &ActivationSpec::Bin { thr: 0 }, false).unwrap();
    assert_eq!(fin.scores, vec![0.0, 0.0, g.k0() as f64]);
    assert_eq!(fin.class, 2);
    assert_eq!(fin.counts, ClassCounts(vec![0, 0, 1]));
    assert!(fin.diagnostics.healthy());
}

#[test]
fn inference_matches_plaintext_lookups() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (sk, ksk) = noisy(64, 5);
    for (s, l, a) in [(18, 2, 3), (20, 3, 5), (14, 3, 7)] {
        let g = WisardGeometry::new(s, l, a, 11, 5).unwrap();
        let set = random_set(&mut rng, 16, s, l);
        let m = train_enc(&g, &sk, &encrypt_all(&set, &g, &sk, &mut rng, true));
        let (pm, counts) = plain(&set, &g);
        for (x, _) in random_set(&mut rng, 8, s, l) {
            let query = encrypt_sample(&x, None, &g, &sk, &mut rng).unwrap();
            let pack = he_infer_pd(&m, &query, &ksk).unwrap();
            assert_eq!(pack.packed.len(), ScorePack::packed_len(l, g.k0(), 64));
            let addrs = pm.addresses(&x).unwrap();
            let expected: Vec<u64> =
                (0..l).flat_map(|i| (0..g.k0()).map(move |j| (i, j))).map(|(i, j)| pm.get(i, j, addrs[j]) as u64).collect();
            for act in [ActivationSpec::Log, ActivationSpec::Bin { thr: 1 }] {
                let fin = client_finalize(&pack, &sk, &act, true).unwrap();
                assert_eq!(fin.lookups, expected);
                assert_eq!(fin.counts, counts);
                assert_eq!(fin.class, evaluate(&pm, &x, &act, Some(&counts)).unwrap());
            }
        }
    }
}

#[test]
fn merge_and_resumption_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (sk, _) = noisy(64, 6);
    let g = WisardGeometry::new(15, 3, 5, 4, 6).unwrap();
    let set = random_set(&mut rng, 14, 15, 3);
    let enc = encrypt_all(&set, &g, &sk, &mut rng, true);
    let whole = train_enc(&g, &sk, &enc);
    let (left, right) = enc.split_at(5);
    let merged = he_merge(&train_enc(&g, &sk, left), &train_enc(&g, &sk, right)).unwrap();
    assert_eq!(merged, whole);
    assert_eq!(merged.decrypt(&sk).unwrap(), plain(&set, &g));
    let mut resumed = train_enc(&g, &sk, left);
    he_train_stream(&mut resumed, right.iter().cloned().map(Ok)).unwrap();
    assert_eq!(resumed, whole);
    let zero = HomWisardModel::zero(&g, sk.params()).unwrap();
    assert_eq!(he_merge(&whole, &zero).unwrap(), whole);
    let mut reversed = enc.clone();
    reversed.reverse();
    assert_eq!(train_enc(&g, &sk, &reversed), whole);
    let other = WisardGeometry::new(15, 3, 5, 5, 6).unwrap();
    assert!(he_merge(&whole, &HomWisardModel::zero(&other, sk.params()).unwrap()).is_err());
}

#[test]
fn label_counting_on_a_skewed_stream() {
    let (sk, _) = noisy(64, 5);
    let g = WisardGeometry::new(4, 2, 2, 0, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut counts = hewisard::tfhe::RlweCiphertext::zero(64);
    for y in (0..10).map(|i| usize::from(i == 3)) {
        let s = encrypt_sample(&[false; 4], Some(y), &g, &sk, &mut rng).unwrap();
        he_count_labels(&s.label, &mut counts, sk.params()).unwrap();
    }
    assert_eq!(&hewisard::tfhe::dec_rlwe(&counts, &sk)[..3], &[9, 1, 0]);
}

#[test]
fn finalize_edge_cases() {
    let (sk, ksk) = exact(64, 4);
    let g = WisardGeometry::new(8, 4, 4, 0, 4).unwrap();
    let m = HomWisardModel::zero(&g, sk.params()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let q = encrypt_sample(&[true; 8], None, &g, &sk, &mut rng).unwrap();
    let pack = he_infer_pd(&m, &q, &ksk).unwrap();
    assert_eq!(client_finalize(&pack, &sk, &ActivationSpec::Log, false).unwrap().class, 0);
    assert!(matches!(client_finalize(&pack, &sk, &ActivationSpec::Log, true), Err(Error::EmptyClass(0))));
    // Equal class counts make balancing a no-op.
    let set: Vec<(Vec<bool>, usize)> = (0..8).map(|i| ((0..8).map(|b| (i >> (b % 3)) & 1 == 1).collect(), i % 4)).collect();
    let m = train_enc(&g, &sk, &encrypt_all(&set, &g, &sk, &mut rng, true));
    for (x, _) in &set {
        let pack = he_infer_pd(&m, &encrypt_sample(x, None, &g, &sk, &mut rng).unwrap(), &ksk).unwrap();
        let a = client_finalize(&pack, &sk, &ActivationSpec::Log, false).unwrap();
        let b = client_finalize(&pack, &sk, &ActivationSpec::Log, true).unwrap();
        assert_eq!(a.scores, b.scores);
    }
}

#[test]
fn score_pack_sizes() {
    // Ten classes of 262 RAMs (784 pixels at 4 bits, 12-bit addresses).
    assert_eq!(ScorePack::packed_len(10, 262, 2048), 2);
    assert_eq!(ScorePack::packed_len(10, 784, 2048), 4);
    assert_eq!(ScorePack::packed_len(2, 15, 2048), 1);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let (sk, ksk) = exact(64, 4);
    let (sk2, _) = exact(128, 4);
    let g = WisardGeometry::new(8, 2, 4, 0, 4).unwrap();
    let mut m = HomWisardModel::zero(&g, sk.params()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let unlabelled = encrypt_sample(&[true; 8], None, &g, &sk, &mut rng).unwrap();
    assert!(matches!(he_train(&mut m, &unlabelled), Err(Error::Arity { .. })));
    let g7 = WisardGeometry::new(7, 2, 4, 0, 4).unwrap();
    let short = encrypt_sample(&[true; 7], None, &g7, &sk, &mut rng).unwrap();
    assert!(he_infer_pd(&m, &short, &ksk).is_err());
    let (_, ksk2) = exact(128, 4);
    assert!(he_infer_pd(&m, &unlabelled, &ksk2).is_err());
    assert!(m.decrypt(&sk2).is_err());
    assert!(HomWisardModel::zero(&WisardGeometry::new(8, 2, 4, 0, 5).unwrap(), sk.params()).is_err());
}

#[test]
fn real_parameters_single_pass() {
    let params = HeParams::he0(8);
    let (sk, ksk) = keygen(&params, 12).unwrap();
    let g = WisardGeometry::new(24, 3, 6, 1, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let set = random_set(&mut rng, 6, 24, 3);
    let m = train_enc(&g, &sk, &encrypt_all(&set, &g, &sk, &mut rng, true));
    let (pm, counts) = plain(&set, &g);
    assert_eq!(m.decrypt(&sk).unwrap(), (pm.clone(), counts.clone()));
    let budget = m.noise(&sk);
    assert!(budget.headroom_bits() > 4.0, "{budget:?}");
    for (x, _) in &set {
        let pack = he_infer_pd(&m, &encrypt_sample(x, None, &g, &sk, &mut rng).unwrap(), &ksk).unwrap();
        let fin = client_finalize(&pack, &sk, &ActivationSpec::Log, false).unwrap();
        assert!(fin.diagnostics.healthy());
        assert_eq!(fin.class, evaluate(&pm, x, &ActivationSpec::Log, None).unwrap());
    }
}

#[test]
fn files_round_trip() {
    let (sk, ksk) = noisy(64, 5);
    let g = WisardGeometry::new(10, 3, 4, 7, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let set = random_set(&mut rng, 4, 10, 3);
    let seeded: Vec<SeededSample> =
        set.iter().map(|(x, y)| encrypt_sample_seeded(x, Some(*y), &g, &sk, &mut rng).unwrap()).collect();

    let mut buf = Vec::new();
    let mut w = SampleWriter::new(&mut buf, sk.params(), &g, 77).unwrap();
    for s in &seeded {
        w.push(s).unwrap();
    }
    assert_eq!(w.finish().unwrap(), 4);
    let reader = SampleReader::new(buf.as_slice(), true).unwrap();
    assert_eq!((reader.header.key_id, &reader.geometry), (77, &g));
    let back: Vec<SeededSample> = reader.collect::<Result<_, _>>().unwrap();
    assert_eq!(back, seeded);
    assert!(matches!(SampleReader::new(buf.as_slice(), false), Err(Error::InsecureNotAllowed(_))));

    let m = train_enc(&g, &sk, &seeded.iter().map(SeededSample::expand).collect::<Vec<_>>());
    let mut buf = Vec::new();
    write_model(&mut buf, &m, 77).unwrap();
    assert_eq!(read_model(&mut buf.as_slice(), true).unwrap(), (m.clone(), 77));
    let mut bad = buf.clone();
    bad[0] ^= 1;
    assert!(matches!(read_model(&mut bad.as_slice(), true), Err(Error::Format(_))));
    assert!(matches!(read_score_pack(&mut buf.as_slice(), true), Err(Error::Format(_))));
    assert!(read_model(&mut &buf[..buf.len() - 1], true).is_err());

    let pack = he_infer_pd(&m, &seeded[0].expand(), &ksk).unwrap();
    let mut buf = Vec::new();
    write_score_pack(&mut buf, &pack, sk.params(), 77).unwrap();
    assert_eq!(read_score_pack(&mut buf.as_slice(), true).unwrap().0, pack);

    let mut buf = Vec::new();
    write_secret_key(&mut buf, &sk, 77).unwrap();
    let (sk_back, id) = read_secret_key(&mut buf.as_slice(), true).unwrap();
    assert_eq!((sk_back.lwe_key(), id), (sk.lwe_key(), 77));
    let mut buf = Vec::new();
    write_switching_key(&mut buf, &ksk, 77).unwrap();
    assert_eq!(read_switching_key(&mut buf.as_slice(), true).unwrap().0, ksk);

    let (pm, counts) = plain(&set, &g);
    let mut buf = Vec::new();
    write_plain_model(&mut buf, &pm, &counts).unwrap();
    assert_eq!(read_plain_model(&mut buf.as_slice()).unwrap(), (pm, counts));
}

#[test]
fn manifest_text() {
    let mut m = Manifest::default();
    m.set("params", "HE_0").set("seed", 5).set("params", "HE_1");
    let text = m.to_string();
    assert_eq!(text, "params = HE_1\nseed = 5\n");
    let back = Manifest::parse(&format!("# comment\n\n{text}")).unwrap();
    assert_eq!(back, m);
    assert_eq!(back.require("seed").unwrap(), "5");
    assert!(back.require("nope").is_err());
    assert!(Manifest::parse("no equals sign").is_err());
}
