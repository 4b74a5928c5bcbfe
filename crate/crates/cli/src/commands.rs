use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hewisard::he_wnn::{
    client_finalize, encrypt_sample, encrypt_sample_seeded, he_infer_pd, he_merge, he_train, HomWisardModel,
};
use hewisard::io::{
    read_model, read_score_pack, read_secret_key, read_switching_key, write_model, write_score_pack,
    write_secret_key, write_switching_key, Manifest, SampleReader, SampleWriter,
};
use hewisard::tfhe::{keygen, PackingKeySwitchKey, SecretKey, PRNG_ID};
use hewisard::wnn::{evaluate, train_integer, ActivationSpec, Metrics, WisardGeometry};
use hewisard::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::config::RunConfig;
use crate::data::{load_bits, Split};
use crate::error::{CliError, CliResult};
use crate::report::Report;

const SECRET_KEY: &str = "secret.key";
const SWITCHING_KEY: &str = "switching.key";
const KEY_MANIFEST: &str = "keys.txt";

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(Error::from)?))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    let f = File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    Ok(BufReader::new(f))
}

fn hex(id: u64) -> String {
    format!("{id:016x}")
}

/// FNV-1a over the key bits. Identifies a key; it is not a commitment.
fn key_id(sk: &SecretKey) -> u64 {
    sk.lwe_key().iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b).wrapping_mul(0x0000_0100_0000_01b3))
}

fn same_key(what: &str, found: u64, expected: u64) -> CliResult<()> {
    if found != expected {
        return Err(Error::Mismatch(format!("{what} belongs to key {} but key {} was given", hex(found), hex(expected))).into());
    }
    Ok(())
}

fn labels_path(samples: &Path) -> PathBuf {
    let mut p = samples.as_os_str().to_owned();
    p.push(".labels");
    PathBuf::from(p)
}

fn read_labels(path: &Path) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(Error::from)?;
        out.push(line.trim().parse().map_err(|_| Error::Parse(format!("{}:{}: bad label", path.display(), i + 1)))?);
    }
    Ok(out)
}

fn peak_memory_mib() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let kb: f64 = status.lines().find_map(|l| l.strip_prefix("VmHWM:"))?.trim().trim_end_matches("kB").trim().parse().ok()?;
    Some(kb / 1024.0)
}

pub fn keygen_cmd(cfg: &RunConfig, seed: u64, out: &Path, insecure: bool) -> CliResult<Report> {
    cfg.params.check_allowed(insecure)?;
    std::fs::create_dir_all(out).map_err(Error::from)?;
    let t = Instant::now();
    let (sk, ksk) = keygen(&cfg.params, seed)?;
    let id = key_id(&sk);
    write_secret_key(&mut create(&out.join(SECRET_KEY))?, &sk, id)?;
    write_switching_key(&mut create(&out.join(SWITCHING_KEY))?, &ksk, id)?;
    let mut m = Manifest::default();
    m.set("key_id", hex(id))
        .set("params", &cfg.params.name)
        .set("n", cfg.params.n)
        .set("p_log", cfg.params.p_log)
        .set("insecure", cfg.params.insecure)
        .set("seed", seed)
        .set("prng", PRNG_ID)
        .set("secret_key", SECRET_KEY)
        .set("switching_key", SWITCHING_KEY);
    std::fs::write(out.join(KEY_MANIFEST), m.to_string()).map_err(Error::from)?;
    let mut r = Report::new("keygen");
    for (k, v) in &m.entries {
        r.set(k, v);
    }
    r.set("seconds", format!("{:.3}", t.elapsed().as_secs_f64()));
    Ok(r)
}

fn load_secret(keys: &Path, insecure: bool) -> CliResult<(SecretKey, u64)> {
    Ok(read_secret_key(&mut open(&keys.join(SECRET_KEY))?, insecure)?)
}

fn load_switching(keys: &Path, insecure: bool) -> CliResult<(PackingKeySwitchKey, u64)> {
    Ok(read_switching_key(&mut open(&keys.join(SWITCHING_KEY))?, insecure)?)
}

pub struct EncryptArgs<'a> {
    pub keys: &'a Path,
    pub data: &'a Path,
    pub split: Split,
    pub limit: Option<usize>,
    pub seed: u64,
    pub out: &'a Path,
}

pub fn encrypt_cmd(cfg: &RunConfig, a: EncryptArgs<'_>, insecure: bool) -> CliResult<Report> {
    let (sk, id) = load_secret(a.keys, insecure)?;
    if !sk.params().compatible(&cfg.params) {
        return Err(Error::Mismatch(format!("key is for {} but the config uses {}", sk.params().name, cfg.params.name)).into());
    }
    let (raw, bits) = load_bits(cfg, a.data, a.split, a.limit)?;
    if a.split == Split::Train {
        cfg.set.check_capacity(&raw.class_counts())?;
    }
    let g = cfg.set.geometry(raw.n_features, raw.classes, 0)?;
    let t = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(a.seed);
    let mut writer = SampleWriter::new(create(a.out)?, sk.params(), &g, id)?;
    let mut labels = create(&labels_path(a.out))?;
    for (x, y) in bits.iter() {
        let label = (a.split == Split::Train).then_some(y);
        writer.push(&encrypt_sample_seeded(x, label, &g, &sk, &mut rng)?)?;
        writeln!(labels, "{y}").map_err(Error::from)?;
    }
    let count = writer.finish()?;
    labels.flush().map_err(Error::from)?;
    let bytes = std::fs::metadata(a.out).map_err(Error::from)?.len();
    let mut r = Report::new("encrypt");
    cfg.describe(&mut r.fields);
    r.set("key_id", hex(id))
        .set("split", format!("{:?}", a.split).to_lowercase())
        .set("samples", count)
        .set("bits_per_sample", g.s)
        .set("classes", g.l)
        .set("encrypted_labels", a.split == Split::Train)
        .set("bytes", bytes)
        .set("labels_file", labels_path(a.out).display())
        .set("seconds", format!("{:.3}", t.elapsed().as_secs_f64()));
    Ok(r)
}

pub fn train_cmd(samples: &Path, seed: u64, resume: Option<&Path>, out: &Path, insecure: bool) -> CliResult<Report> {
    let reader = SampleReader::new(open(samples)?, insecure)?;
    let id = reader.header.key_id;
    let mut model = match resume {
        Some(path) => {
            let (m, model_id) = read_model(&mut open(path)?, insecure)?;
            same_key("model", model_id, id)?;
            let (g, h) = (m.geometry(), &reader.geometry);
            if (g.s, g.l, g.a, g.p_log) != (h.s, h.l, h.a, h.p_log) {
                return Err(Error::Mismatch("samples do not fit the model being resumed".into()).into());
            }
            m
        }
        None => {
            let g = WisardGeometry { r: seed, ..reader.geometry.clone() };
            HomWisardModel::zero(&g, &reader.header.params)?
        }
    };
    let t = Instant::now();
    let mut n = 0usize;
    for sample in reader {
        he_train(&mut model, &sample?.expand())?;
        n += 1;
    }
    let secs = t.elapsed().as_secs_f64();
    write_model(&mut create(out)?, &model, id)?;
    let mut r = Report::new("train");
    r.set("key_id", hex(id))
        .set("params", &model.params().name)
        .set("permutation_seed", model.geometry().r)
        .set("resumed", resume.is_some())
        .set("samples", n)
        .set("rams", model.rams.len())
        .set("seconds", format!("{secs:.3}"))
        .set("ms_per_sample", format!("{:.1}", 1e3 * secs / n.max(1) as f64));
    Ok(r)
}

pub fn merge_cmd(a: &Path, b: &Path, out: &Path, insecure: bool) -> CliResult<Report> {
    let (m1, id1) = read_model(&mut open(a)?, insecure)?;
    let (m2, id2) = read_model(&mut open(b)?, insecure)?;
    same_key("second model", id2, id1)?;
    let merged = he_merge(&m1, &m2)?;
    write_model(&mut create(out)?, &merged, id1)?;
    let mut r = Report::new("merge");
    r.set("key_id", hex(id1)).set("rams", merged.rams.len());
    Ok(r)
}

pub fn infer_cmd(model: &Path, samples: &Path, keys: &Path, out: &Path, insecure: bool) -> CliResult<Report> {
    let (model, id) = read_model(&mut open(model)?, insecure)?;
    let (ksk, ksk_id) = load_switching(keys, insecure)?;
    same_key("switching key", ksk_id, id)?;
    let reader = SampleReader::new(open(samples)?, insecure)?;
    same_key("samples", reader.header.key_id, id)?;
    let mut w = create(out)?;
    let t = Instant::now();
    let mut n = 0usize;
    for sample in reader {
        let pack = he_infer_pd(&model, &sample?.expand(), &ksk)?;
        write_score_pack(&mut w, &pack, model.params(), id)?;
        n += 1;
    }
    w.flush().map_err(Error::from)?;
    let secs = t.elapsed().as_secs_f64();
    let mut r = Report::new("infer");
    r.set("key_id", hex(id))
        .set("params", &model.params().name)
        .set("samples", n)
        .set("seconds", format!("{secs:.3}"))
        .set("ms_per_inference", format!("{:.1}", 1e3 * secs / n.max(1) as f64));
    Ok(r)
}

pub struct FinalizeArgs<'a> {
    pub packs: &'a Path,
    pub keys: &'a Path,
    pub labels: Option<&'a Path>,
    pub act: ActivationSpec,
    pub balance: bool,
    pub out: Option<&'a Path>,
}

fn metrics_rows(r: &mut Report, m: &Metrics, l: usize) {
    r.columns(&["class", "recall"]);
    for c in 0..l {
        r.row(vec![c.to_string(), format!("{:.4}", m.recall(c))]);
    }
}

pub fn finalize_cmd(a: FinalizeArgs<'_>, insecure: bool) -> CliResult<Report> {
    let (sk, id) = load_secret(a.keys, insecure)?;
    let mut reader = open(a.packs)?;
    let mut finals = Vec::new();
    while !reader.fill_buf().map_err(Error::from)?.is_empty() {
        let (pack, header) = read_score_pack(&mut reader, insecure)?;
        same_key("score pack", header.key_id, id)?;
        finals.push(client_finalize(&pack, &sk, &a.act, a.balance)?);
    }
    let predictions: Vec<usize> = finals.iter().map(|f| f.class).collect();
    if let Some(path) = a.out {
        let mut w = create(path)?;
        for p in &predictions {
            writeln!(w, "{p}").map_err(Error::from)?;
        }
        w.flush().map_err(Error::from)?;
    }
    let unhealthy = finals.iter().filter(|f| !f.diagnostics.healthy()).count();
    let headroom = finals.iter().map(|f| f.diagnostics.noise.headroom_bits()).fold(f64::INFINITY, f64::min);
    let mut r = Report::new("finalize");
    r.set("key_id", hex(id))
        .set("act", a.act)
        .set("balance", a.balance)
        .set("samples", finals.len())
        .set("unhealthy", unhealthy)
        .set("min_headroom_bits", format!("{headroom:.1}"));
    if let Some(path) = a.labels {
        let labels = read_labels(path)?;
        if labels.len() != predictions.len() {
            return Err(Error::Mismatch(format!("{} labels for {} score packs", labels.len(), predictions.len())).into());
        }
        let l = finals.first().map_or(0, |f| f.scores.len());
        let mut m = Metrics::new(l);
        for (&y, &p) in labels.iter().zip(&predictions) {
            if y >= l {
                return Err(Error::Label { label: y, classes: l }.into());
            }
            m.record(y, p);
        }
        r.set("correct", m.correct()).set("accuracy", format!("{:.2}", m.accuracy()));
        metrics_rows(&mut r, &m, l);
    }
    if unhealthy > 0 {
        print!("{r}");
        return Err(CliError::Diagnostics(format!("{unhealthy} score packs failed decryption diagnostics")));
    }
    Ok(r)
}

pub struct OracleArgs<'a> {
    pub data: &'a Path,
    pub seeds: &'a [u64],
    pub train_limit: Option<usize>,
    pub test_limit: Option<usize>,
}

pub fn oracle_cmd(cfg: &RunConfig, a: OracleArgs<'_>) -> CliResult<Report> {
    let t = Instant::now();
    let (raw, train) = load_bits(cfg, a.data, Split::Train, a.train_limit)?;
    let (_, test) = load_bits(cfg, a.data, Split::Test, a.test_limit)?;
    cfg.set.check_capacity(&raw.class_counts())?;
    let mut r = Report::new("oracle");
    cfg.describe(&mut r.fields);
    r.columns(&["seed", "correct", "accuracy"]);
    let mut accs = Vec::new();
    for &seed in a.seeds {
        let g = cfg.set.geometry(raw.n_features, raw.classes, seed)?;
        let (model, counts) = train_integer(train.iter(), &g)?;
        let mut m = Metrics::new(g.l);
        for (x, y) in test.iter() {
            m.record(y, evaluate(&model, x, &cfg.set.act, cfg.set.balance.then_some(&counts))?);
        }
        accs.push(m.accuracy());
        r.row(vec![seed.to_string(), m.correct().to_string(), format!("{:.2}", m.accuracy())]);
    }
    let mean = accs.iter().sum::<f64>() / accs.len().max(1) as f64;
    r.set("train_samples", train.len())
        .set("samples", test.len())
        .set("seeds", a.seeds.len())
        .set("accuracy", format!("{mean:.2}"))
        .set("seconds", format!("{:.3}", t.elapsed().as_secs_f64()));
    Ok(r)
}

pub struct BenchArgs<'a> {
    pub data: &'a Path,
    pub seed: u64,
    pub train: usize,
    pub infer: usize,
    pub threads: &'a [usize],
}

pub fn bench_cmd(cfg: &RunConfig, a: BenchArgs<'_>, insecure: bool) -> CliResult<Report> {
    cfg.params.check_allowed(insecure)?;
    let (raw, train) = load_bits(cfg, a.data, Split::Train, Some(a.train))?;
    let (_, test) = load_bits(cfg, a.data, Split::Test, Some(a.infer))?;
    let g = cfg.set.geometry(raw.n_features, raw.classes, a.seed)?;
    let t = Instant::now();
    let (sk, ksk) = keygen(&cfg.params, a.seed)?;
    let keygen_secs = t.elapsed().as_secs_f64();
    // Samples are re-encrypted from a per-index seed so only one is ever held.
    let sample = |i: usize, x: &[bool], y: Option<usize>| {
        encrypt_sample(x, y, &g, &sk, &mut ChaCha20Rng::seed_from_u64(a.seed ^ ((i as u64) << 32)))
    };
    let mut r = Report::new("bench");
    cfg.describe(&mut r.fields);
    r.set("train_samples", train.len()).set("infer_samples", test.len()).set("keygen_seconds", format!("{keygen_secs:.3}"));
    r.columns(&["threads", "train_ms_per_sample", "speedup", "infer_ms_per_sample"]);
    let mut reference: Option<HomWisardModel> = None;
    let mut base_ms = 0.0;
    let mut enc_secs = 0.0;
    let mut deterministic = true;
    for &threads in a.threads {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        let (train_ms, infer_ms, model) = pool.install(|| -> CliResult<(f64, f64, HomWisardModel)> {
            let mut model = HomWisardModel::zero(&g, &cfg.params)?;
            let mut train_secs = 0.0;
            for (i, (x, y)) in train.iter().enumerate() {
                let e = Instant::now();
                let s = sample(i, x, Some(y))?;
                enc_secs += e.elapsed().as_secs_f64();
                let t = Instant::now();
                he_train(&mut model, &s)?;
                train_secs += t.elapsed().as_secs_f64();
            }
            let mut infer_secs = 0.0;
            for (i, (x, _)) in test.iter().enumerate() {
                let s = sample(usize::MAX - i, x, None)?;
                let t = Instant::now();
                he_infer_pd(&model, &s, &ksk)?;
                infer_secs += t.elapsed().as_secs_f64();
            }
            let per = |secs: f64, n: usize| 1e3 * secs / n.max(1) as f64;
            Ok((per(train_secs, train.len()), per(infer_secs, test.len()), model))
        })?;
        if let Some(m) = &reference {
            deterministic &= *m == model;
        } else {
            base_ms = train_ms;
            reference = Some(model);
        }
        r.row(vec![
            threads.to_string(),
            format!("{train_ms:.1}"),
            format!("{:.2}", base_ms / train_ms),
            format!("{infer_ms:.1}"),
        ]);
    }
    let encryptions = (train.len() * a.threads.len()).max(1);
    r.set("encrypt_ms_per_sample", format!("{:.1}", 1e3 * enc_secs / encryptions as f64))
        .set("schedule_independent", deterministic)
        .set("peak_memory_mib", peak_memory_mib().map_or("n/a".into(), |m| format!("{m:.0}")));
    Ok(r)
}
