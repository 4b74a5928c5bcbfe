use std::path::PathBuf;

use hewisard::config::ModelSet;
use hewisard::datasets::*;
use hewisard::wnn::*;
use hewisard::Error;

fn data_dir() -> PathBuf {
    let dir = std::env::var_os("HEWISARD_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"));
    assert!(dir.join("mnist").is_dir(), "dataset directory {} is missing; see README", dir.display());
    dir
}

fn mnist(part: &str) -> Dataset {
    let d = data_dir().join("mnist");
    load_mnist_idx(d.join(format!("{part}-images-idx3-ubyte")), d.join(format!("{part}-labels-idx1-ubyte"))).unwrap()
}

#[test]
fn mnist_files() {
    let train = mnist("train");
    let test = mnist("t10k");
    assert_eq!((train.len(), test.len(), train.n_features, train.classes), (60000, 10000, 784, 10));
    assert_eq!(train.labels[..5], [5, 0, 4, 1, 9]);
    let first: u64 = train.sample(0).iter().map(|&v| v as u64).sum();
    assert_eq!(first, mnist("train").sample(0).iter().map(|&v| v as u64).sum());
    let bits = preprocess(&train.head(3), &ModelSet::mnist_t().preprocess().unwrap());
    assert_eq!(bits.s(), 3136);
}

#[test]
fn mnist_small_run_is_sane() {
    let set = ModelSet::mnist_t();
    let pre = set.preprocess().unwrap();
    let train = preprocess(&mnist("train").head(2000), &pre);
    let test = preprocess(&mnist("t10k").head(500), &pre);
    let (m, _) = train_integer(train.iter(), &set.geometry(784, 10, 0).unwrap()).unwrap();
    let mut metrics = Metrics::new(10);
    for (x, y) in test.iter() {
        metrics.record(y, evaluate(&m, x, &set.act, None).unwrap());
    }
    assert!(metrics.accuracy() > 75.0, "accuracy {}", metrics.accuracy());
}

#[test]
fn idx_errors() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("img");
    let lab = dir.path().join("lab");
    let mut images = vec![0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 2];
    images.extend([1u8; 8]);
    std::fs::write(&img, &images).unwrap();
    std::fs::write(&lab, [0, 0, 8, 1, 0, 0, 0, 2, 3, 4]).unwrap();
    let ds = load_mnist_idx(&img, &lab).unwrap();
    assert_eq!((ds.len(), ds.n_features, ds.labels.clone()), (2, 4, vec![3, 4]));

    std::fs::write(&lab, [0, 0, 8, 1, 0, 0, 0, 3, 3, 4, 5]).unwrap();
    assert!(matches!(load_mnist_idx(&img, &lab), Err(Error::Format(_))));
    std::fs::write(&lab, [0, 0, 8, 3, 0, 0, 0, 2, 3, 4]).unwrap();
    assert!(matches!(load_mnist_idx(&img, &lab), Err(Error::Format(_))));
    std::fs::write(&lab, [0, 0, 8, 1, 0, 0, 0, 2, 3, 4]).unwrap();
    std::fs::write(&img, &images[..20]).unwrap();
    assert!(matches!(load_mnist_idx(&img, &lab), Err(Error::Format(_))));
    assert!(matches!(load_mnist_idx(dir.path().join("none"), &lab), Err(Error::Io(_))));
}

#[test]
fn wisconsin_file() {
    let path = data_dir().join("wisconsin/wdbc.csv");
    let raw = load_tabular(&path, &TabularSchema::wisconsin()).unwrap();
    assert_eq!((raw.rows.len(), raw.columns.len(), raw.classes), (569, 30, 2));
    assert_eq!(raw.labels.iter().filter(|&&y| y == 1).count(), 212);
    let (train, test) =
        load_tabular_split(&path, &TabularSchema::wisconsin(), &SplitSpec::Ordered { train: 455 }, "wdbc").unwrap();
    assert_eq!((train.len(), test.len()), (455, 114));
    let bits = preprocess(&train, &ModelSet::wisconsin().preprocess().unwrap());
    assert_eq!(bits.s(), 150);
}

#[test]
fn tabular_scaling_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.csv");
    std::fs::write(&p, "y;a;b;c\nno;1;7;0\nyes;3;7;2\nno;2;7;4\n").unwrap();
    let schema = TabularSchema { delimiter: ';', label_column: "y".into(), classes: vec!["no".into(), "yes".into()], features: None };
    let raw = load_tabular(&p, &schema).unwrap();
    assert_eq!(raw.columns, vec!["a", "b", "c"]);
    let scaler = MinMaxScaler::fit(&raw, &[0, 1]).unwrap();
    let ds = scaler.transform(&raw, "t").unwrap();
    // Column b is constant; row 2 lies outside the fitted bounds of c and clamps.
    assert_eq!(ds.sample(0), &[0, 0, 0]);
    assert_eq!(ds.sample(1), &[255, 0, 255]);
    assert_eq!(ds.sample(2), &[128, 0, 255]);

    std::fs::write(&p, "y;a\nno;x\n").unwrap();
    assert!(matches!(load_tabular(&p, &schema), Err(Error::Parse(_))));
    std::fs::write(&p, "y;a\nmaybe;1\n").unwrap();
    assert!(matches!(load_tabular(&p, &schema), Err(Error::Parse(_))));
    let missing = TabularSchema { label_column: "z".into(), ..schema };
    assert!(matches!(load_tabular(&p, &missing), Err(Error::Format(_))));
}

#[test]
fn synthetic_generator() {
    let spec = SyntheticSpec::default();
    let a = make_unbalanced(&spec, &[90, 10], 1).unwrap();
    assert_eq!(a.class_counts(), vec![90, 10]);
    assert_eq!(a, make_unbalanced(&spec, &[90, 10], 1).unwrap());
    assert_ne!(a, make_unbalanced(&spec, &[90, 10], 2).unwrap());
    assert!(make_unbalanced(&spec, &[5], 1).is_err());

    let pre = PreprocessSpec { quantizer: None, thermometer: Thermometer::new(ThermometerKind::Linear, 4, 256).unwrap() };
    let train = preprocess(&make_unbalanced(&spec, &[200, 200], 3).unwrap(), &pre);
    let test = preprocess(&make_unbalanced(&spec, &[200, 200], 4).unwrap(), &pre);
    let g = WisardGeometry::new(train.s(), 2, 4, 0, 10).unwrap();
    let (m, _) = train_integer(train.iter(), &g).unwrap();
    let mut metrics = Metrics::new(2);
    for (x, y) in test.iter() {
        metrics.record(y, evaluate(&m, x, &ActivationSpec::Log, None).unwrap());
    }
    assert!(metrics.accuracy() >= 95.0, "accuracy {}", metrics.accuracy());
}

#[test]
fn named_sets_fit_their_training_sizes() {
    let train = mnist("train");
    for name in ["mnist_t", "mnist_s", "mnist_m", "mnist_l"] {
        let set = ModelSet::by_name(name).unwrap();
        let head = train.head(set.train_samples.unwrap());
        set.check_capacity(&head.class_counts()).unwrap();
        assert!(set.check_capacity(&[1 << set.p_log]).is_err());
    }
}
