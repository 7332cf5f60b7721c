use std::collections::BTreeMap;

use proptest::prelude::*;
use soaccept_core::metrics::*;

fn pair_auc(y: &[bool], s: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in (0..y.len()).filter(|&i| y[i]) {
        for j in (0..y.len()).filter(|&j| !y[j]) {
            den += 1.0;
            num += if s[i] > s[j] { 1.0 } else if s[i] == s[j] { 0.5 } else { 0.0 };
        }
    }
    num / den
}

fn labelled() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
    (2usize..=200).prop_flat_map(|n| {
        // Coarse scores so ties are common.
        (proptest::collection::vec(any::<bool>(), n), proptest::collection::vec(0u8..20, n))
            .prop_map(|(y, s)| (y, s.into_iter().map(|v| v as f64 / 19.0).collect()))
    })
}

proptest! {
    #[test]
    fn trapezoid_auc_counts_concordant_pairs((y, s) in labelled()) {
        prop_assume!(y.iter().any(|&b| b) && y.iter().any(|&b| !b));
        let curve = roc(&y, &s).unwrap();
        prop_assert!((curve.auc - pair_auc(&y, &s)).abs() < 1e-12);
        let mut distinct = s.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        prop_assert_eq!(curve.points.len(), distinct.len() + 1);
        let first = curve.points[0];
        let last = *curve.points.last().unwrap();
        prop_assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        for w in curve.points.windows(2) {
            prop_assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
            prop_assert!(w[0].threshold > w[1].threshold);
        }
    }

    #[test]
    fn mcc_is_class_symmetric(tp in 0u64..50, fp in 0u64..50, tn in 0u64..50, fn_ in 0u64..50) {
        let a = ConfusionMatrix { tp, fp, tn, fn_ };
        let b = ConfusionMatrix { tp: tn, fp: fn_, tn: tp, fn_: fp };
        prop_assert_eq!(a.mcc(), b.mcc());
        prop_assert!((-1.0..=1.0).contains(&a.mcc()));
    }

    #[test]
    fn accuracy_is_one_minus_error_rate(pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..100)) {
        let (t, p): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let cm = confusion(&t, &p).unwrap();
        prop_assert_eq!(cm.total() as usize, t.len());
        let wrong = t.iter().zip(&p).filter(|(a, b)| a != b).count();
        let n = t.len() as f64;
        prop_assert_eq!(cm.accuracy().value, (cm.tp + cm.tn) as f64 / n);
        prop_assert!((cm.accuracy().value - (1.0 - wrong as f64 / n)).abs() < 1e-15);
    }
}

#[test]
fn hand_confusion_matrix() {
    let t = [true, true, true, true, true, false, false, false, false, false];
    let p = [true, true, true, false, false, true, false, false, false, false];
    let cm = confusion(&t, &p).unwrap();
    assert_eq!(cm, ConfusionMatrix { tp: 3, fp: 1, tn: 4, fn_: 2 });
    assert_eq!(cm.precision().value, 0.75);
    assert_eq!(cm.recall().value, 0.6);
    assert_eq!(cm.accuracy().value, 0.7);
    let expected = (3.0 * 4.0 - 1.0 * 2.0) / (4.0f64 * 5.0 * 5.0 * 6.0).sqrt();
    assert!((cm.mcc() - expected).abs() < 1e-15);
    let perfect = confusion(&t, &t).unwrap();
    assert_eq!((perfect.accuracy().value, perfect.precision().value, perfect.recall().value, perfect.mcc()), (1.0, 1.0, 1.0, 1.0));
}

fn report() -> EvalReport {
    let y = [true, false, true, false, true, false];
    let s = [0.9, 0.8, 0.7, 0.3, 0.55, 0.1];
    let models = ["smote", "adasyn"]
        .iter()
        .flat_map(|sampler| {
            ["rf", "mlp"].iter().map(move |model| ModelEval::new(model, sampler, &y, &s, vec![0.7, 0.3]).unwrap())
        })
        .collect();
    EvalReport {
        n_train: 14,
        n_test: 6,
        test_positives: 3,
        features: vec!["Timelag".into(), "Reputation".into()],
        information_gain: BTreeMap::from([("Timelag".to_string(), 0.5), ("Reputation".to_string(), 0.6)]),
        dropped: vec![],
        search: vec![],
        models,
    }
}

#[test]
fn emitted_files_are_deterministic_and_complete() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    emit_report(&report(), a.path()).unwrap();
    emit_report(&report(), b.path()).unwrap();
    for name in ["report.md", "roc.csv", "roc.svg", "metrics.json"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let csv = std::fs::read_to_string(a.path().join("roc.csv")).unwrap();
    // Six distinct scores give seven points per curve, four curves.
    assert_eq!(csv.lines().count(), 1 + 4 * 7);
    let svg = std::fs::read_to_string(a.path().join("roc.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("stroke-dasharray"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.path().join("metrics.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], METRICS_SCHEMA);
    assert_eq!(json["split"], "test");
    let acc = json["models"][0]["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
    let md = std::fs::read_to_string(a.path().join("report.md")).unwrap();
    assert!(md.contains("test split"));
    assert!(md.contains("| rf | smote |"));
}

#[test]
fn empty_report_is_refused() {
    let mut r = report();
    r.models.clear();
    assert!(emit_report(&r, tempfile::tempdir().unwrap().path()).is_err());
}
