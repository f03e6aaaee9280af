use proptest::prelude::*;
use stance::bundle::{bundle_dir, discover, escape, load, save, unescape};
use stance_core::features::{FeatureSpace, SparseBooleanVector};
use stance_core::svm::{LinearModel, Loss, Mode, TrainConfig};

fn model(names: Vec<String>, weights: Vec<Vec<f64>>, biases: Vec<f64>, mode: Mode) -> LinearModel {
    let space = FeatureSpace::from_names(names, "TXT+CN_FR".parse().unwrap()).unwrap();
    let cfg = TrainConfig { c: 0.7, tol: 1e-5, max_iter: 50, seed: 3, loss: Loss::Hinge };
    LinearModel::from_parts("Climate Change".into(), mode, weights, biases, space, cfg).unwrap()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 4.0),
    ]
}

/// Feature names with characters that need escaping, a mode flag, and
/// matching weight vectors and biases.
fn case() -> impl Strategy<Value = (Vec<String>, bool, Vec<Vec<f64>>, Vec<f64>)> {
    (proptest::collection::btree_set("[a-z\t\n\\\\ ]{1,6}", 1..12), any::<bool>()).prop_flat_map(|(names, ternary)| {
        let dim = names.len();
        let k = if ternary { 3 } else { 1 };
        (
            Just(names.into_iter().collect::<Vec<_>>()),
            Just(ternary),
            proptest::collection::vec(proptest::collection::vec(finite(), dim), k),
            proptest::collection::vec(finite(), k),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn escape_is_reversible(s in ".*") {
        prop_assert_eq!(unescape(&escape(&s)), Some(s));
    }

    #[test]
    fn save_load_is_identity((names, ternary, weights, biases) in case()) {
        let dim = names.len();
        let mode = if ternary { Mode::Ternary } else { Mode::Binary };
        let m = model(names, weights, biases, mode);
        let dir = tempfile::tempdir().unwrap();
        save(&m, dir.path()).unwrap();
        let back = load(dir.path()).unwrap();
        for (a, b) in m.raw_weights().iter().flatten().zip(back.raw_weights().iter().flatten()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in m.raw_biases().iter().zip(back.raw_biases()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        prop_assert_eq!(back.space().names(), m.space().names());
        prop_assert_eq!(back.config(), m.config());
        prop_assert_eq!(back.topic(), m.topic());
        let all = SparseBooleanVector::new((0..dim).collect(), dim).unwrap();
        prop_assert_eq!(m.predict(&all).unwrap(), back.predict(&all).unwrap());
    }
}

#[test]
fn binary_bundle_stores_one_weight_file() {
    let m = model(vec!["a".into(), "b".into()], vec![vec![0.5, -0.25]], vec![0.1], Mode::Binary);
    let dir = tempfile::tempdir().unwrap();
    save(&m, dir.path()).unwrap();
    let mut files: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    files.sort();
    assert_eq!(files, ["metadata.txt", "space.tsv", "weights-favor.tsv"]);
    let meta = std::fs::read_to_string(dir.path().join("metadata.txt")).unwrap();
    assert!(meta.contains("mode=binary\n") && meta.contains("classes=AGAINST,FAVOR\n"), "{meta}");
    assert!(meta.contains("selector=CN_FR+TXT\n"), "{meta}");
}

#[test]
fn corrupt_bundles_are_rejected() {
    let m = model(vec!["a".into(), "b".into()], vec![vec![1.0, 2.0]; 3], vec![0.0; 3], Mode::Ternary);
    let dir = tempfile::tempdir().unwrap();
    save(&m, dir.path()).unwrap();
    let meta = dir.path().join("metadata.txt");
    let original = std::fs::read_to_string(&meta).unwrap();

    std::fs::write(&meta, original.replace("mode=ternary", "mode=binary")).unwrap();
    assert!(load(dir.path()).is_err());
    std::fs::write(&meta, original.replace("features=2", "features=3")).unwrap();
    assert!(load(dir.path()).is_err());
    std::fs::write(&meta, original.replace("format=", "format=x")).unwrap();
    assert!(load(dir.path()).is_err());
    std::fs::write(&meta, &original).unwrap();
    std::fs::write(dir.path().join("weights-none.tsv"), "bias\t0\n7\t1.0\n").unwrap();
    let err = load(dir.path()).unwrap_err();
    assert!(err.to_string().contains("index 7"), "{err}");
    std::fs::remove_file(dir.path().join("weights-none.tsv")).unwrap();
    assert!(load(dir.path()).is_err());
}

#[test]
fn discover_finds_nested_bundles_in_order() {
    let root = tempfile::tempdir().unwrap();
    let m = model(vec!["a".into()], vec![vec![1.0]], vec![0.0], Mode::Binary);
    let sel = m.space().selector();
    for topic in ["Zeta", "Alpha"] {
        save(&m, &bundle_dir(root.path(), topic, sel, Mode::Binary)).unwrap();
    }
    let found = discover(root.path()).unwrap();
    assert_eq!(found.len(), 2);
    assert!(found[0].starts_with(root.path().join("alpha")));
    assert!(found[1].ends_with("zeta/CN_FR+TXT/binary"));
}
