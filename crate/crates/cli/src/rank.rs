//! Ranking the candidate answers of a new question with a trained model.
//!
//! Metadata a candidate does not supply (typically Score, CommentCount and
//! the question's ViewCount, which only exist after the fact) is filled
//! with the training median and listed under `imputed`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use soaccept_core::features::{Extractor, FeatureName, FeatureVector, Label, TfIdfModel, N_FEATURES};
use soaccept_core::ingest::Timestamp;
use soaccept_core::jsonio::read_json;
use soaccept_core::matrix::Matrix;
use soaccept_core::resample::{SamplerKind, Scaler};
use soaccept_core::select::SelectionReport;
use soaccept_core::{Error, Result};

use crate::config::RunConfig;
use crate::manifest::{Stage, Workdir};
use crate::stages::{load_forest, load_mlp, model_file, retained_columns, stage_config, MEDIANS, SCALER, SELECTION, TFIDF};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionInput {
    pub body: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default)]
    pub creation_ts: Option<String>,
    #[serde(default)]
    pub view_count: Option<u64>,
    #[serde(default)]
    pub answer_count: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateInput {
    pub body: String,
    #[serde(default)]
    pub creation_ts: Option<String>,
    #[serde(default)]
    pub reputation: Option<u64>,
    #[serde(default)]
    pub user_creation_ts: Option<String>,
    #[serde(default)]
    pub score: Option<i64>,
    #[serde(default)]
    pub comment_count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RankInput {
    pub question: QuestionInput,
    pub candidates: Vec<CandidateInput>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Rf,
    Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranked {
    pub rank: usize,
    /// Position in the input list.
    pub candidate: usize,
    pub probability: f64,
    /// Model features filled with training medians.
    pub imputed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub model: ModelKind,
    pub sampler: SamplerKind,
    pub ranking: Vec<Ranked>,
}

fn timestamp(field: &str, raw: &Option<String>) -> Result<Option<Timestamp>> {
    raw.as_deref()
        .map(|s| s.parse().map_err(|e| Error::InvalidInput(format!("{field} {s:?}: {e}"))))
        .transpose()
}

/// Feature rows for every candidate, with the names of features that had
/// to be imputed.
pub fn candidate_features(
    input: &RankInput,
    tfidf: &TfIdfModel,
    medians: &BTreeMap<String, f64>,
) -> Result<Vec<(FeatureVector, Vec<FeatureName>)>> {
    if input.candidates.is_empty() {
        return Err(Error::InvalidInput("no candidate answers to rank".into()));
    }
    let extractor = Extractor::default();
    let q = &input.question;
    let q_tokens = extractor.question_tokens(&q.body);
    let q_ts = timestamp("question.creation_ts", &q.creation_ts)?;
    let answer_count = q.answer_count.unwrap_or(0).max(input.candidates.len() as u64);
    input
        .candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut fv = FeatureVector { values: [0.0; N_FEATURES], label: Label::Unaccepted };
            extractor.fill_content(&extractor.content(&q_tokens, &c.body), tfidf, &mut fv);
            let a_ts = timestamp(&format!("candidates[{i}].creation_ts"), &c.creation_ts)?;
            let u_ts = timestamp(&format!("candidates[{i}].user_creation_ts"), &c.user_creation_ts)?;
            let timelag = match (q_ts, a_ts) {
                (Some(q), Some(a)) if a.millis() < q.millis() => {
                    return Err(Error::InvalidInput(format!("candidate {i} predates the question")))
                }
                (Some(q), Some(a)) => Some((a.millis() - q.millis()) as f64),
                _ => None,
            };
            let known = [
                (FeatureName::Timelag, timelag),
                (FeatureName::SignUpDateTimeLag, a_ts.zip(u_ts).map(|(a, u)| (a.millis() - u.millis()) as f64)),
                (FeatureName::Reputation, c.reputation.map(|v| v as f64)),
                (FeatureName::Score, c.score.map(|v| v as f64)),
                (FeatureName::CommentCount, c.comment_count.map(|v| v as f64)),
                (FeatureName::ViewCount, q.view_count.map(|v| v as f64)),
                (FeatureName::AnswerCount, Some(answer_count as f64)),
            ];
            let mut imputed = Vec::new();
            for (name, value) in known {
                let v = match value {
                    Some(v) => v,
                    None => {
                        imputed.push(name);
                        medians.get(name.as_str()).copied().ok_or_else(|| {
                            Error::Data(format!("{MEDIANS} has no median for {name}"))
                        })?
                    }
                };
                fv.set(name, v);
            }
            Ok((fv, imputed))
        })
        .collect()
}

/// Orders scores descending; equal scores keep input order.
pub fn order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

pub fn rank(config: &RunConfig, input: &RankInput, model: ModelKind, sampler: Option<SamplerKind>) -> Result<Ranking> {
    let w = Workdir::new(&config.paths.workdir);
    w.require(Stage::Evaluate, |s| stage_config(config, s))?;
    let sampler = match sampler {
        Some(s) if config.resample.samplers.contains(&s) => s,
        Some(s) => return Err(Error::Config(format!("no model was trained with sampler {s}"))),
        None => config.resample.samplers[0],
    };
    let mut tfidf: TfIdfModel = read_json(&w.path(TFIDF))?;
    tfidf.reindex();
    let medians: BTreeMap<String, f64> = read_json(&w.path(MEDIANS))?;
    let columns = retained_columns(&SelectionReport::read(&w.path(SELECTION))?)?;

    let rows = candidate_features(input, &tfidf, &medians)?;
    let mut x = Matrix::zeros(0, columns.len());
    for (fv, _) in &rows {
        x.push_row(&columns.iter().map(|&c| fv.get(c)).collect::<Vec<_>>());
    }
    let scores = match model {
        ModelKind::Rf => load_forest(&w.path(&model_file(sampler, "model.rf.json")))?.predict_proba(&x)?,
        ModelKind::Mlp => {
            let scaler: Scaler = read_json(&w.path(SCALER))?;
            load_mlp(&w.path(&model_file(sampler, "model.mlp.json")))?.predict_proba(&scaler.transform(&x))?
        }
    };
    let ranking = order(&scores)
        .into_iter()
        .enumerate()
        .map(|(r, i)| Ranked {
            rank: r + 1,
            candidate: i,
            probability: scores[i],
            imputed: rows[i]
                .1
                .iter()
                .filter(|n| columns.contains(n))
                .map(|n| n.as_str().to_string())
                .collect(),
        })
        .collect();
    Ok(Ranking { model, sampler, ranking })
}
