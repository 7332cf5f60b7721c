//! Exit-gate suite: one line per criterion, non-zero exit if any fails.
//! Every oracle here is computed from first principles, not with the code
//! under test.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use soaccept_core::features::{cosine_similarity, fit_tfidf, FeatureName};
use soaccept_core::learn::{accuracy, fit_forest, MlpModel, RfParams};
use soaccept_core::matrix::Matrix;
use soaccept_core::metrics::{confusion, roc, ConfusionMatrix};
use soaccept_core::reference;
use soaccept_core::resample::{adasyn, apply_plan, smote, ResamplePlan};
use soaccept_core::select::{mutual_information, select_from_stats, CorrelationMatrix, SelectConfig};
use soaccept_core::seed;
use soaccept_core::synth::planted_dataset;
use soaccept_core::text::{porter_stem, TokenStream};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn normal(rng: &mut seed::Rng) -> f64 {
    StandardNormal.sample(rng)
}

// ---------------------------------------------------------------- 1

fn brute_weights(docs: &[Vec<String>]) -> Vec<Vec<f64>> {
    let vocab: BTreeSet<&String> = docs.iter().flatten().collect();
    let n = docs.len() as f64;
    docs.iter()
        .map(|doc| {
            let tf = |t: &String| doc.iter().filter(|w| *w == t).count() as f64;
            let max_tf = vocab.iter().map(|t| tf(t)).fold(0.0, f64::max);
            vocab
                .iter()
                .map(|t| {
                    if tf(t) == 0.0 {
                        0.0
                    } else {
                        let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
                        (0.5 + 0.5 * tf(t) / max_tf) * (n / df).ln()
                    }
                })
                .collect()
        })
        .collect()
}

fn brute_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let words = ["java", "list", "sort", "null", "map", "array", "loop", "string"];
    let mut rng = seed::rng(1);
    let mut worst: f64 = 0.0;
    let corpora = 300;
    for _ in 0..corpora {
        let n_docs = rng.gen_range(1..=5);
        let docs: Vec<Vec<String>> = (0..n_docs)
            .map(|_| (0..rng.gen_range(0..15)).map(|_| words[rng.gen_range(0..words.len())].to_string()).collect())
            .collect();
        let streams: Vec<TokenStream> = docs.iter().map(|d| TokenStream::new(d.clone())).collect();
        let model = fit_tfidf(&streams).map_err(|e| e.to_string())?;
        let expected = brute_weights(&docs);
        let vectors: Vec<_> = streams.iter().map(|s| model.tfidf_vector(s)).collect();
        for (v, e) in vectors.iter().zip(&expected) {
            for (j, &w) in e.iter().enumerate() {
                worst = worst.max((v.get(j) - w).abs());
            }
        }
        for a in 0..n_docs {
            for b in 0..n_docs {
                let got = cosine_similarity(&vectors[a], &vectors[b]);
                worst = worst.max((got - brute_cosine(&expected[a], &expected[b])).abs());
            }
        }
    }
    check(worst < 1e-9, || format!("max |delta| {worst:e}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{corpora} corpora of <= 5 documents, max |delta| {worst:.1e}, {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------- 2

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/porter_vocabulary.tsv");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let pairs: Vec<(&str, &str)> = text.lines().filter_map(|l| l.split_once('\t')).collect();
    check(pairs.len() >= 100, || format!("only {} words", pairs.len()))?;
    check(pairs.contains(&("coming", "come")), || "sample lacks coming -> come".into())?;
    let wrong: Vec<String> = pairs
        .iter()
        .filter(|(w, s)| porter_stem(w) != *s)
        .map(|(w, s)| format!("{w}: {} != {s}", porter_stem(w)))
        .collect();
    check(wrong.is_empty(), || format!("{} mismatches, e.g. {}", wrong.len(), wrong[0]))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("{} words agree, coming -> {}, {:.2?}", pairs.len(), porter_stem("coming"), start.elapsed()))
}

// ---------------------------------------------------------------- 3

fn cloud(rng: &mut seed::Rng, n: usize, d: usize, offset: f64) -> Matrix {
    let mut m = Matrix::zeros(0, d);
    for _ in 0..n {
        m.push_row(&(0..d).map(|_| rng.gen_range(-1.0..1.0) + offset).collect::<Vec<_>>());
    }
    m
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn brute_neighbors(points: &Matrix, i: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.n_rows()).filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| {
        dist2(points.row(i), points.row(a)).total_cmp(&dist2(points.row(i), points.row(b))).then(a.cmp(&b))
    });
    order.truncate(k);
    order
}

fn segment_residual(s: &[f64], points: &Matrix, k: usize) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..points.n_rows() {
        for b in brute_neighbors(points, a, k) {
            let (pa, pb) = (points.row(a), points.row(b));
            let dir: Vec<f64> = pb.iter().zip(pa).map(|(y, x)| y - x).collect();
            let len2: f64 = dir.iter().map(|v| v * v).sum();
            let t = if len2 == 0.0 {
                0.0
            } else {
                (s.iter().zip(pa).zip(&dir).map(|((s, a), d)| (s - a) * d).sum::<f64>() / len2).clamp(0.0, 1.0)
            };
            let proj: Vec<f64> = pa.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
            best = best.min(dist2(s, &proj).sqrt());
        }
    }
    best
}

fn criterion_3() -> Outcome {
    let mut rng = seed::rng(33);
    let mut worst: f64 = 0.0;
    for trial in 0..10u64 {
        let n = rng.gen_range(8..=50);
        let d = rng.gen_range(1..=5);
        let k = 5;
        let minority = cloud(&mut rng, n, d, 0.0);
        let n_synthetic = rng.gen_range(1..3 * n);
        let out = smote(&minority, k, n_synthetic, trial).map_err(|e| e.to_string())?;
        check(out.len() == n_synthetic, || format!("cloud {trial}: {} synthetics, asked {n_synthetic}", out.len()))?;
        for s in out.rows.rows() {
            worst = worst.max(segment_residual(s, &minority, k));
        }

        let n_maj = rng.gen_range(n + 1..=150);
        let mut x = cloud(&mut rng, n_maj, d, 0.0);
        x.append(&minority);
        let y: Vec<bool> = (0..n_maj + n).map(|i| i >= n_maj).collect();
        let ratio = [1.0, 0.8, 0.6][trial as usize % 3];
        let plan = ResamplePlan { target_ratio: ratio, seed: trial, ..ResamplePlan::default() };
        let res = apply_plan(&x, &y, &plan).map_err(|e| e.to_string())?;
        let minority_after = res.y.iter().filter(|&&b| b).count();
        let target = ((ratio * n_maj as f64).round() as usize).max(n);
        check(minority_after == target, || format!("cloud {trial}: minority {minority_after}, target {target}"))?;
    }
    check(worst < 1e-9, || format!("max segment residual {worst:e}"))?;
    Ok(format!("10 clouds, max segment residual {worst:.1e}, ratios exact"))
}

// ---------------------------------------------------------------- 4

fn criterion_4() -> Outcome {
    let k = 5;
    let seeds = 30u64;
    for s in 0..seeds {
        let mut rng = seed::rng(4000 + s);
        let n_min = rng.gen_range(6..30);
        let n_maj = rng.gen_range(n_min..120);
        let d = rng.gen_range(1..4);
        let beta = rng.gen_range(0.0..=1.0);
        let z_min = cloud(&mut rng, n_min, d, 0.4);
        let z_maj = cloud(&mut rng, n_maj, d, 0.0);
        let out = adasyn(&z_min, &z_maj, k, beta, s).map_err(|e| e.to_string())?;
        let g = (n_maj - n_min) as f64 * beta;
        let mut all = z_min.clone();
        all.append(&z_maj);
        let r: Vec<f64> = (0..n_min)
            .map(|i| brute_neighbors(&all, i, k).iter().filter(|&&j| j >= n_min).count() as f64 / k as f64)
            .collect();
        let sum: f64 = r.iter().sum();
        let r_hat: Vec<f64> = r.iter().map(|v| if sum > 0.0 { v / sum } else { 1.0 / n_min as f64 }).collect();
        for i in 0..n_min {
            let gi = out.counts[i] as f64;
            check((gi - r_hat[i] * g).abs() <= 1.0, || format!("seed {s}: g_{i} = {gi}, expected {:.3}", r_hat[i] * g))?;
        }
        let total: usize = out.counts.iter().sum();
        check((total as f64 - g).abs() <= n_min as f64, || format!("seed {s}: total {total}, G {g:.2}"))?;
        check(out.synthetic.len() == total, || format!("seed {s}: rows {} != counts {total}", out.synthetic.len()))?;

        let zero = adasyn(&z_min, &z_maj, k, 0.0, s).map_err(|e| e.to_string())?;
        check(zero.synthetic.is_empty(), || format!("seed {s}: beta = 0 produced {} rows", zero.synthetic.len()))?;
    }
    Ok(format!("{seeds} seeds: every g_i within 1 of r_hat*G, totals within |minority| of G, beta = 0 adds none"))
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let n = 2000;
    let mut rng = seed::rng(5);
    let x: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let y: Vec<bool> = x.iter().map(|&v| v > 0.0).collect();
    let noise: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let dep = mutual_information(&x, &y, 3).map_err(|e| e.to_string())?;
    let ind = mutual_information(&x, &noise, 3).map_err(|e| e.to_string())?;
    check((dep - 1.0).abs() <= 0.1, || format!("deterministic label gives {dep:.4} bits"))?;
    check(ind < 0.05, || format!("independent label gives {ind:.4} bits"))?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("deterministic {dep:.4} bits, independent {ind:.4} bits, {:.2?}", start.elapsed()))
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let ig: BTreeMap<String, f64> =
        reference::INFORMATION_GAIN.iter().map(|(n, v)| (n.as_str().to_string(), *v)).collect();
    let names: Vec<&str> = FeatureName::ALL.iter().map(|n| n.as_str()).collect();
    let mut corr = CorrelationMatrix::identity(&names);
    for (a, b, r) in reference::CORRELATIONS {
        corr.set(a.as_str(), b.as_str(), r).map_err(|e| e.to_string())?;
    }
    let result = select_from_stats(&ig, &corr, &SelectConfig::default()).map_err(|e| e.to_string())?;
    let dropped: BTreeSet<&str> = result.dropped.iter().map(|d| d.feature.as_str()).collect();
    let expected: BTreeSet<&str> = ["NumberOfWords", "SignUpDateTimeLag"].into();
    check(dropped == expected, || format!("dropped {dropped:?}"))?;
    check(result.retained.len() == 14, || format!("{} retained", result.retained.len()))?;
    Ok(format!("dropped {:?}, {} retained", dropped, result.retained.len()))
}

// ---------------------------------------------------------------- 7

fn criterion_7() -> Outcome {
    let sizes = [4, 8, 8, 8, 8, 8, 1];
    let n = 16;
    let mut rng = seed::rng(7);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..4).map(|_| normal(&mut rng)).collect()).collect();
    let x = Matrix::from_rows(&rows).map_err(|e| e.to_string())?;
    let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let model = MlpModel::new(&sizes, 77).map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..n).collect();
    let (_, grad) = model.loss_and_gradient(&x, &y, &all);
    let params = model.params();
    let mut probe = model.clone();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let mut p = params.clone();
        p[i] = params[i] + h;
        probe.set_params(&p).map_err(|e| e.to_string())?;
        let up = probe.loss(&x, &y);
        p[i] = params[i] - h;
        probe.set_params(&p).map_err(|e| e.to_string())?;
        let down = probe.loss(&x, &y);
        let numeric = (up - down) / (2.0 * h);
        // Floor for gradients that vanish in double precision.
        let rel = (grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1e-7);
        worst = worst.max(rel);
    }
    check(worst < 1e-4, || format!("max relative error {worst:e}"))?;
    Ok(format!("{} parameters, max relative error {worst:.2e}", params.len()))
}

// ---------------------------------------------------------------- 8

fn pair_auc(y: &[bool], s: &[f64]) -> f64 {
    let pos: Vec<f64> = (0..y.len()).filter(|&i| y[i]).map(|i| s[i]).collect();
    let neg: Vec<f64> = (0..y.len()).filter(|&i| !y[i]).map(|i| s[i]).collect();
    let mut num = 0.0;
    for p in &pos {
        for q in &neg {
            num += if p > q { 1.0 } else if p == q { 0.5 } else { 0.0 };
        }
    }
    num / (pos.len() * neg.len()) as f64
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let seeds = 20u64;
    let mut top2_hits = 0;
    let (mut min_auc, mut max_gap) = (f64::INFINITY, 0.0f64);
    for s in 0..seeds {
        let (x, y) = planted_dataset(2000, 800 + s);
        let (xt, yt) = planted_dataset(2000, 900 + s);
        let model = fit_forest(&x, &y, &RfParams { n_estimators: 100, seed: s, ..RfParams::default() })
            .map_err(|e| e.to_string())?;
        let p = model.predict_proba(&xt).map_err(|e| e.to_string())?;
        min_auc = min_auc.min(pair_auc(&yt, &p));
        let held = 1.0 - accuracy(&p, &yt);
        let oob = model.oob_error.ok_or("no out-of-bag estimate")?;
        max_gap = max_gap.max((oob - held).abs());
        let mut order: Vec<usize> = (0..model.importances.len()).collect();
        order.sort_by(|&a, &b| model.importances[b].total_cmp(&model.importances[a]));
        let top: BTreeSet<usize> = order[..2].iter().copied().collect();
        if top == BTreeSet::from([0, 1]) {
            top2_hits += 1;
        }
    }
    check(min_auc >= 0.90, || format!("held-out AUC {min_auc:.4}"))?;
    check(max_gap < 0.05, || format!("OOB vs held-out error gap {max_gap:.4}"))?;
    check(top2_hits >= 19, || format!("planted features top-2 in {top2_hits}/{seeds} seeds"))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "min held-out AUC {min_auc:.4}, max |OOB - held-out| {max_gap:.4}, top-2 in {top2_hits}/{seeds} seeds, {:.2?}",
        start.elapsed()
    ))
}

// ---------------------------------------------------------------- 9

fn criterion_9() -> Outcome {
    let mut rng = seed::rng(9);
    let mut worst: f64 = 0.0;
    let cases = 500;
    for _ in 0..cases {
        let n = rng.gen_range(2..=200);
        let levels = rng.gen_range(1..30);
        let y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.4)).collect();
        if y.iter().all(|&b| b) || y.iter().all(|&b| !b) {
            continue;
        }
        let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64 / levels as f64).collect();
        let curve = roc(&y, &s).map_err(|e| e.to_string())?;
        worst = worst.max((curve.auc - pair_auc(&y, &s)).abs());
    }
    check(worst < 1e-12, || format!("max AUC deviation {worst:e}"))?;

    // tp=3 fp=1 tn=4 fn=2, built from labels.
    let truth = [true, true, true, true, true, false, false, false, false, false];
    let pred = [true, true, true, false, false, true, false, false, false, false];
    let cm = confusion(&truth, &pred).map_err(|e| e.to_string())?;
    check(cm == ConfusionMatrix { tp: 3, fp: 1, tn: 4, fn_: 2 }, || format!("{cm:?}"))?;
    check(cm.precision().value == 3.0 / 4.0, || "precision".into())?;
    check(cm.recall().value == 3.0 / 5.0, || "recall".into())?;
    check(cm.accuracy().value == 7.0 / 10.0, || "accuracy".into())?;
    let mcc = (3.0 * 4.0 - 1.0 * 2.0) / (4.0f64 * 5.0 * 5.0 * 6.0).sqrt();
    check(cm.mcc() == mcc, || format!("mcc {} vs {mcc}", cm.mcc()))?;
    Ok(format!("{cases} random cases, max |AUC - concordance| {worst:.1e}; hand confusion exact (mcc {mcc:.6})"))
}

// ---------------------------------------------------------------- 10

fn files_under(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).expect("readable workdir") {
            let path = entry.expect("dir entry").path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = std::fs::read(&path).expect("readable file");
                out.insert(path.strip_prefix(root).expect("under root").to_path_buf(), bytes);
            }
        }
    }
    out
}

fn criterion_10() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/so200/run.json");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut trees = Vec::new();
    let mut slowest = Duration::ZERO;
    for (i, threads) in ["1", "8", "8"].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let start = Instant::now();
        let o = Command::new(env!("CARGO_BIN_EXE_soaccept"))
            .arg("run")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .arg("--threads")
            .arg(threads)
            .output()
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        check(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        within(elapsed, Duration::from_secs(120))?;
        slowest = slowest.max(elapsed);
        trees.push(files_under(&out));
    }
    check(trees[0].keys().any(|p| p.ends_with("report/report.md")), || "no report.md".into())?;
    for (i, t) in trees.iter().enumerate().skip(1) {
        let differing: Vec<_> = trees[0]
            .keys()
            .chain(t.keys())
            .filter(|p| trees[0].get(*p) != t.get(*p))
            .collect();
        check(differing.is_empty(), || format!("run {i} differs in {:?}", differing[0]))?;
    }
    Ok(format!(
        "3 runs (threads 1, 8, 8) byte-identical over {} files, slowest {:.2?}",
        trees[0].len(),
        slowest
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("tf-idf and cosine match a brute-force evaluator", criterion_1),
        ("Porter stemmer agrees with the reference vocabulary", criterion_2),
        ("SMOTE synthetics lie on neighbor segments; ratio exact", criterion_3),
        ("ADASYN allocation follows difficulty weights", criterion_4),
        ("mutual information: 1 bit for a deterministic label, ~0 for noise", criterion_5),
        ("selection replay on the reference statistics", criterion_6),
        ("MLP gradient check", criterion_7),
        ("random forest on the planted dataset", criterion_8),
        ("AUC equals concordance; confusion metrics exact", criterion_9),
        ("fixture run deterministic across runs and thread counts", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {:>2}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
