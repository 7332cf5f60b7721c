//! The five pipeline stages. Each reads its predecessors' files from the
//! workdir, writes its own, and finishes by recording a manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use soaccept_core::features::{extract_matrix, FeatureMatrix, FeatureName};
use soaccept_core::ingest::{ingest_files, read_dataset, write_dataset};
use soaccept_core::jsonio::{read_json, write_json};
use soaccept_core::learn::{
    fit_forest, fit_mlp, permutation_importance, random_search, split_train_test, ForestModel, MlpModel,
    Partition, RfParams, SearchResult,
};
use soaccept_core::matrix::Matrix;
use soaccept_core::metrics::{emit_report, EvalReport, ModelEval, SearchSummary};
use soaccept_core::resample::{apply_plan, SamplerKind, Scaler};
use soaccept_core::select::{select_features, SelectionReport};
use soaccept_core::{Error, Result};

use crate::config::RunConfig;
use crate::manifest::{sha256_json, Stage, Workdir};

pub const DATASET: &str = "dataset.jsonl";
pub const INGEST_REPORT: &str = "ingest_report.json";
pub const FEATURES: &str = "features.csv";
pub const ROW_KEYS: &str = "row_keys.csv";
pub const TFIDF: &str = "tfidf.json";
pub const FEATURES_REPORT: &str = "features_report.json";
pub const SELECTION: &str = "selection_report.json";
pub const SPLIT: &str = "split.json";
pub const SCALER: &str = "scaler.json";
pub const MEDIANS: &str = "medians.json";
pub const REPORT_DIR: &str = "report";
pub const REPORT_FILES: [&str; 4] = ["report.md", "roc.csv", "roc.svg", "metrics.json"];

pub fn model_file(sampler: SamplerKind, name: &str) -> String {
    format!("models/{sampler}/{name}")
}

/// Digest of the settings a stage depends on.
pub fn stage_config(config: &RunConfig, stage: Stage) -> String {
    match stage {
        Stage::Ingest => sha256_json(&config.ingest),
        Stage::Features => sha256_json(&()),
        Stage::Select => sha256_json(&config.select),
        Stage::Train => sha256_json(&(config.seed, &config.split, &config.resample, &config.search, &config.mlp)),
        Stage::Evaluate => sha256_json(&(config.seed, &config.evaluate)),
    }
}

fn workdir(config: &RunConfig) -> Workdir {
    Workdir::new(&config.paths.workdir)
}

fn require(config: &RunConfig, stage: Stage) -> Result<Workdir> {
    let w = workdir(config);
    w.require(stage, |s| stage_config(config, s))?;
    Ok(w)
}

fn write_compact<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string(value).map_err(|e| Error::Json { context: path.display().to_string(), source: e })?;
    text.push('\n');
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    }
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

pub fn ingest(config: &RunConfig) -> Result<()> {
    let w = workdir(config);
    w.begin(Stage::Ingest)?;
    let (records, report) = ingest_files(&config.paths.posts, &config.paths.users, &config.ingest)?;
    if records.is_empty() {
        return Err(Error::Data("no question passed the ingest filters".into()));
    }
    write_dataset(&records, &w.path(DATASET))?;
    write_json(&w.path(INGEST_REPORT), &report)?;
    w.record(
        Stage::Ingest,
        stage_config(config, Stage::Ingest),
        &[&config.paths.posts, &config.paths.users],
        &[],
        &[DATASET.into(), INGEST_REPORT.into()],
    )?;
    Ok(())
}

pub fn features(config: &RunConfig) -> Result<()> {
    let w = require(config, Stage::Features)?;
    w.begin(Stage::Features)?;
    let records = read_dataset(&w.path(DATASET))?;
    let extraction = extract_matrix(&records)?;
    extraction.check()?;
    extraction.matrix.write_csv(&w.path(FEATURES))?;
    let mut keys = String::from("question_id,answer_id\n");
    for k in &extraction.keys {
        writeln!(keys, "{},{}", k.question_id, k.answer_id).expect("string write");
    }
    let keys_path = w.path(ROW_KEYS);
    std::fs::write(&keys_path, keys).map_err(|e| Error::Io { path: keys_path, source: e })?;
    write_json(&w.path(TFIDF), &extraction.tfidf)?;
    write_json(&w.path(FEATURES_REPORT), &extraction.report)?;
    w.record(
        Stage::Features,
        stage_config(config, Stage::Features),
        &[],
        &[DATASET],
        &[FEATURES.into(), ROW_KEYS.into(), TFIDF.into(), FEATURES_REPORT.into()],
    )?;
    Ok(())
}

pub fn select(config: &RunConfig) -> Result<()> {
    let w = require(config, Stage::Select)?;
    w.begin(Stage::Select)?;
    let fm = FeatureMatrix::read_csv(&w.path(FEATURES))?;
    let names: Vec<&str> = FeatureName::ALL.iter().map(|n| n.as_str()).collect();
    let report = select_features(&fm.to_matrix(&FeatureName::ALL), &fm.labels(), &names, &config.select)?;
    report.write(&w.path(SELECTION))?;
    if report.retained.is_empty() {
        return Err(Error::Data(format!(
            "no feature has information gain above {}; lower select.ig_threshold",
            config.select.ig_threshold
        )));
    }
    w.record(Stage::Select, stage_config(config, Stage::Select), &[], &[FEATURES], &[SELECTION.into()])?;
    Ok(())
}

/// Retained columns in selection order.
pub fn retained_columns(selection: &SelectionReport) -> Result<Vec<FeatureName>> {
    selection.retained.iter().map(|n| n.parse()).collect()
}

fn training_medians(fm: &FeatureMatrix, rows: &[usize]) -> BTreeMap<String, f64> {
    FeatureName::ALL
        .iter()
        .map(|&name| {
            let mut v: Vec<f64> = rows.iter().map(|&i| fm.rows[i].get(name)).collect();
            v.sort_by(f64::total_cmp);
            let m = v.len() / 2;
            let median = if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 };
            (name.as_str().to_string(), median)
        })
        .collect()
}

struct Data {
    fm: FeatureMatrix,
    columns: Vec<FeatureName>,
    x: Matrix,
    y: Vec<bool>,
}

fn load_data(w: &Workdir) -> Result<Data> {
    let fm = FeatureMatrix::read_csv(&w.path(FEATURES))?;
    let selection = SelectionReport::read(&w.path(SELECTION))?;
    let columns = retained_columns(&selection)?;
    let x = fm.to_matrix(&columns);
    let y = fm.labels();
    Ok(Data { fm, columns, x, y })
}

pub fn train(config: &RunConfig) -> Result<()> {
    let w = require(config, Stage::Train)?;
    w.begin(Stage::Train)?;
    let data = load_data(&w)?;
    let partition = split_train_test(data.y.len(), &config.split_spec())?;
    let x_train = data.x.select_rows(&partition.train);
    let y_train: Vec<bool> = partition.train.iter().map(|&i| data.y[i]).collect();
    let scaler = Scaler::fit(&x_train)?;
    write_json(&w.path(SPLIT), &partition)?;
    write_json(&w.path(SCALER), &scaler)?;
    write_json(&w.path(MEDIANS), &training_medians(&data.fm, &partition.train))?;

    let mut outputs: Vec<String> = vec![SPLIT.into(), SCALER.into(), MEDIANS.into()];
    for &sampler in &config.resample.samplers {
        let unit = |what: &str| config.unit_seed(&format!("{what}:{sampler}"));
        let search = random_search(
            &x_train,
            &y_train,
            &config.search,
            &config.resample_plan(sampler, 0),
            unit("search"),
        )?;
        let resampled = apply_plan(&x_train, &y_train, &config.resample_plan(sampler, unit("resample")))?;
        let forest = fit_forest(&resampled.x, &resampled.y, &RfParams { seed: unit("forest"), ..search.best })?;
        let mlp = fit_mlp(&scaler.transform(&resampled.x), &resampled.y, &config.mlp_config(sampler.as_str()))?;

        let files = [
            model_file(sampler, "search.json"),
            model_file(sampler, "model.rf.json"),
            model_file(sampler, "model.mlp.json"),
        ];
        write_compact(&w.path(&files[0]), &search)?;
        write_compact(&w.path(&files[1]), &forest)?;
        write_compact(&w.path(&files[2]), &mlp)?;
        outputs.extend(files);
    }
    w.record(Stage::Train, stage_config(config, Stage::Train), &[], &[FEATURES, SELECTION], &outputs)?;
    Ok(())
}

pub fn load_forest(path: &Path) -> Result<ForestModel> {
    let model: ForestModel = read_json(path)?;
    model.check()?;
    Ok(model)
}

pub fn load_mlp(path: &Path) -> Result<MlpModel> {
    let model: MlpModel = read_json(path)?;
    model.check()?;
    Ok(model)
}

pub fn evaluate(config: &RunConfig) -> Result<()> {
    let w = require(config, Stage::Evaluate)?;
    w.begin(Stage::Evaluate)?;
    let data = load_data(&w)?;
    let partition: Partition = read_json(&w.path(SPLIT))?;
    let scaler: Scaler = read_json(&w.path(SCALER))?;
    let x_test = data.x.select_rows(&partition.test);
    let y_test: Vec<bool> = partition.test.iter().map(|&i| data.y[i]).collect();
    let selection = SelectionReport::read(&w.path(SELECTION))?;

    let mut models = Vec::new();
    let mut search = Vec::new();
    let mut inputs: Vec<String> = vec![FEATURES.into(), SELECTION.into(), SPLIT.into(), SCALER.into()];
    for &sampler in &config.resample.samplers {
        let s = sampler.as_str();
        let result: SearchResult = read_json(&w.path(&model_file(sampler, "search.json")))?;
        search.push(SearchSummary { sampler: s.into(), best: result.best, cv_accuracy: result.best_accuracy });
        let forest = load_forest(&w.path(&model_file(sampler, "model.rf.json")))?;
        let mlp = load_mlp(&w.path(&model_file(sampler, "model.mlp.json")))?;
        let mlp_predict = |m: &Matrix| mlp.predict_proba(&scaler.transform(m));
        let mlp_weights = permutation_importance(
            mlp_predict,
            &x_test,
            &y_test,
            config.evaluate.permutation_repeats,
            config.unit_seed(&format!("importance:{s}")),
        )?;
        models.push(ModelEval::new("rf", s, &y_test, &forest.predict_proba(&x_test)?, forest.importances.clone())?);
        models.push(ModelEval::new("mlp", s, &y_test, &mlp_predict(&x_test)?, mlp_weights)?);
        inputs.extend(["search.json", "model.rf.json", "model.mlp.json"].map(|f| model_file(sampler, f)));
    }
    let report = EvalReport {
        n_train: partition.train.len(),
        n_test: partition.test.len(),
        test_positives: y_test.iter().filter(|&&b| b).count(),
        features: data.columns.iter().map(|c| c.as_str().to_string()).collect(),
        information_gain: selection.information_gain,
        dropped: selection.dropped,
        search,
        models,
    };
    emit_report(&report, &w.path(REPORT_DIR))?;
    let input_refs: Vec<&str> = inputs.iter().map(String::as_str).collect();
    let outputs: Vec<String> = REPORT_FILES.iter().map(|f| format!("{REPORT_DIR}/{f}")).collect();
    w.record(Stage::Evaluate, stage_config(config, Stage::Evaluate), &[], &input_refs, &outputs)?;
    Ok(())
}

pub fn run(config: &RunConfig, stage: Stage) -> Result<()> {
    match stage {
        Stage::Ingest => ingest(config),
        Stage::Features => features(config),
        Stage::Select => select(config),
        Stage::Train => train(config),
        Stage::Evaluate => evaluate(config),
    }
}

pub fn run_all(config: &RunConfig) -> Result<()> {
    Stage::ALL.iter().try_for_each(|&s| run(config, s))
}
