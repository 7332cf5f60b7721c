use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::scores::{confusion, roc, ConfusionMatrix, Rate, RocCurve};
use crate::error::{Error, Result};
use crate::learn::{is_positive, RfParams};
use crate::reference;
use crate::select::Dropped;

pub const METRICS_SCHEMA: u32 = 1;

/// One trained model evaluated on the test split.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelEval {
    /// `rf` or `mlp`.
    pub model: String,
    pub sampler: String,
    pub confusion: ConfusionMatrix,
    pub roc: RocCurve,
    /// Normalized weights aligned with [`EvalReport::features`].
    pub importances: Vec<f64>,
}

impl ModelEval {
    pub fn new(
        model: &str,
        sampler: &str,
        y_test: &[bool],
        scores: &[f64],
        importances: Vec<f64>,
    ) -> Result<Self> {
        let predicted: Vec<bool> = scores.iter().map(|&p| is_positive(p)).collect();
        Ok(ModelEval {
            model: model.to_string(),
            sampler: sampler.to_string(),
            confusion: confusion(y_test, &predicted)?,
            roc: roc(y_test, scores)?,
            importances,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub sampler: String,
    pub best: RfParams,
    pub cv_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_train: usize,
    pub n_test: usize,
    pub test_positives: usize,
    /// Retained features in model column order.
    pub features: Vec<String>,
    pub information_gain: BTreeMap<String, f64>,
    pub dropped: Vec<Dropped>,
    pub search: Vec<SearchSummary>,
    pub models: Vec<ModelEval>,
}

#[derive(Serialize)]
struct ModelJson<'a> {
    model: &'a str,
    sampler: &'a str,
    confusion: ConfusionMatrix,
    accuracy: f64,
    precision: Rate,
    recall: Rate,
    mcc: f64,
    auc: f64,
    roc_points: usize,
    importances: BTreeMap<&'a str, f64>,
}

#[derive(Serialize)]
struct MetricsJson<'a> {
    schema: u32,
    split: &'static str,
    threshold: f64,
    n_train: usize,
    n_test: usize,
    test_positives: usize,
    features: &'a [String],
    models: Vec<ModelJson<'a>>,
    search: &'a [SearchSummary],
}

fn pct(v: f64) -> String {
    format!("{:.2}", v * 100.0)
}

fn rate_pct(r: Rate) -> String {
    if r.undefined {
        format!("{} (undefined)", pct(r.value))
    } else {
        pct(r.value)
    }
}

fn or_dash(v: Option<String>) -> String {
    v.unwrap_or_else(|| "-".into())
}

impl EvalReport {
    fn check(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidInput("evaluation report has no models".into()));
        }
        for m in &self.models {
            if m.importances.len() != self.features.len() {
                return Err(Error::InvalidInput(format!(
                    "{}/{} has {} importances for {} features",
                    m.model,
                    m.sampler,
                    m.importances.len(),
                    self.features.len()
                )));
            }
        }
        Ok(())
    }

    fn samplers(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for m in &self.models {
            if !out.contains(&m.sampler.as_str()) {
                out.push(&m.sampler);
            }
        }
        out
    }

    fn find(&self, model: &str, sampler: &str) -> Option<&ModelEval> {
        self.models.iter().find(|m| m.model == model && m.sampler == sampler)
    }

    pub fn metrics_json(&self) -> Result<String> {
        self.check()?;
        let models = self
            .models
            .iter()
            .map(|m| ModelJson {
                model: &m.model,
                sampler: &m.sampler,
                confusion: m.confusion,
                accuracy: m.confusion.accuracy().value,
                precision: m.confusion.precision(),
                recall: m.confusion.recall(),
                mcc: m.confusion.mcc(),
                auc: m.roc.auc,
                roc_points: m.roc.points.len(),
                importances: self.features.iter().map(String::as_str).zip(m.importances.iter().copied()).collect(),
            })
            .collect();
        let doc = MetricsJson {
            schema: METRICS_SCHEMA,
            split: "test",
            threshold: 0.5,
            n_train: self.n_train,
            n_test: self.n_test,
            test_positives: self.test_positives,
            features: &self.features,
            models,
            search: &self.search,
        };
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::json("metrics.json", e))?;
        text.push('\n');
        Ok(text)
    }

    pub fn roc_csv(&self) -> Result<String> {
        self.check()?;
        let mut out = String::from("model,sampler,fpr,tpr,threshold\n");
        for m in &self.models {
            for p in &m.roc.points {
                let t = if p.threshold.is_infinite() { "inf".to_string() } else { p.threshold.to_string() };
                writeln!(out, "{},{},{},{},{}", m.model, m.sampler, p.fpr, p.tpr, t).unwrap();
            }
        }
        Ok(out)
    }

    /// Random-forest curves, one per sampler, over the chance diagonal.
    pub fn roc_svg(&self) -> Result<String> {
        self.check()?;
        const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
        let (left, top, size) = (60.0, 20.0, 400.0);
        let px = |x: f64| left + x * size;
        let py = |y: f64| top + (1.0 - y) * size;
        let mut curves: Vec<&ModelEval> = self.models.iter().filter(|m| m.model == "rf").collect();
        if curves.is_empty() {
            curves = self.models.iter().collect();
        }

        let mut s = String::new();
        writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="520" height="500" viewBox="0 0 520 500" font-family="sans-serif" font-size="12">"#).unwrap();
        writeln!(s, r#"<rect x="{left}" y="{top}" width="{size}" height="{size}" fill="white" stroke="black"/>"#).unwrap();
        for i in 0..=5 {
            let v = i as f64 / 5.0;
            writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{v:.1}</text>"#, px(v), top + size + 16.0).unwrap();
            writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.1}</text>"#, left - 6.0, py(v) + 4.0).unwrap();
        }
        writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">False positive rate</text>"#, px(0.5), top + size + 36.0).unwrap();
        writeln!(s, r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">True positive rate</text>"#, py(0.5), py(0.5)).unwrap();
        writeln!(s, r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="gray" stroke-dasharray="6 4"/>"#, px(0.0), py(0.0), px(1.0), py(1.0)).unwrap();
        for (i, m) in curves.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let points: Vec<String> = m.roc.points.iter().map(|p| format!("{:.2},{:.2}", px(p.fpr), py(p.tpr))).collect();
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, points.join(" ")).unwrap();
            let y = py(0.0) - 12.0 - 18.0 * (curves.len() - 1 - i) as f64;
            writeln!(s, r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/>"#, px(0.55), px(0.62)).unwrap();
            writeln!(s, r#"<text x="{:.1}" y="{:.1}">{} {} (AUC {:.3})</text>"#, px(0.64), y + 4.0, m.model, m.sampler, m.roc.auc).unwrap();
        }
        writeln!(s, r#"<text x="{:.1}" y="{:.1}">chance</text>"#, px(0.64), py(0.0) - 12.0 - 18.0 * curves.len() as f64 + 4.0).unwrap();
        s.push_str("</svg>\n");
        Ok(s)
    }

    pub fn markdown(&self) -> Result<String> {
        self.check()?;
        let mut s = String::from("# Answer acceptability evaluation\n\n");
        writeln!(
            s,
            "All metrics are computed on the held-out test split ({} rows, {} accepted) at decision threshold 0.5. Training split: {} rows. Reference columns are the full-corpus values and are shown for comparison only.\n",
            self.n_test, self.test_positives, self.n_train
        )
        .unwrap();

        s.push_str("## Classifier performance (test split, %)\n\n");
        s.push_str("| Model | Sampler | Accuracy | Precision | Recall | MCC | AUC | Ref. accuracy | Ref. precision | Ref. recall | Ref. MCC |\n");
        s.push_str("|---|---|---|---|---|---|---|---|---|---|---|\n");
        for m in &self.models {
            let r = reference::metrics_for(&m.model, &m.sampler);
            writeln!(
                s,
                "| {} | {} | {} | {} | {} | {:.3} | {:.3} | {} | {} | {} | {} |",
                m.model,
                m.sampler,
                pct(m.confusion.accuracy().value),
                rate_pct(m.confusion.precision()),
                rate_pct(m.confusion.recall()),
                m.confusion.mcc(),
                m.roc.auc,
                or_dash(r.map(|r| format!("{:.2}", r.accuracy_pct))),
                or_dash(r.map(|r| format!("{:.2}", r.precision_pct))),
                or_dash(r.map(|r| format!("{:.2}", r.recall_pct))),
                or_dash(r.and_then(|r| r.mcc).map(|v| format!("{v:.2}"))),
            )
            .unwrap();
        }

        s.push_str("\n## Confusion matrices (test split)\n\n| Model | Sampler | TP | FP | TN | FN |\n|---|---|---|---|---|---|\n");
        for m in &self.models {
            let c = m.confusion;
            writeln!(s, "| {} | {} | {} | {} | {} | {} |", m.model, m.sampler, c.tp, c.fp, c.tn, c.fn_).unwrap();
        }

        s.push_str("\n## Information gain (bits)\n\n| Feature | Measured | Reference | Selection |\n|---|---|---|---|\n");
        for (name, ref_ig) in reference::INFORMATION_GAIN {
            let name = name.as_str();
            let status = match self.dropped.iter().find(|d| d.feature == name) {
                Some(d) => format!("dropped ({})", d.reason),
                None if self.features.iter().any(|f| f == name) => "retained".to_string(),
                None => "-".to_string(),
            };
            let measured = or_dash(self.information_gain.get(name).map(|v| format!("{v:.3}")));
            writeln!(s, "| {name} | {measured} | {ref_ig:.3} | {status} |").unwrap();
        }

        for sampler in self.samplers() {
            let rf = self.find("rf", sampler);
            let mlp = self.find("mlp", sampler);
            writeln!(s, "\n## Feature weights ({sampler})\n").unwrap();
            s.push_str("| Feature | Random forest | Neural network | Ref. random forest | Ref. neural network |\n|---|---|---|---|---|\n");
            for (i, name) in self.features.iter().enumerate() {
                let r = reference::FEATURE_WEIGHTS.iter().find(|(f, _, _)| f.as_str() == name);
                writeln!(
                    s,
                    "| {name} | {} | {} | {} | {} |",
                    or_dash(rf.map(|m| format!("{:.3}", m.importances[i]))),
                    or_dash(mlp.map(|m| format!("{:.3}", m.importances[i]))),
                    or_dash(r.map(|r| format!("{:.3}", r.1))),
                    or_dash(r.map(|r| format!("{:.3}", r.2))),
                )
                .unwrap();
            }
        }

        if !self.search.is_empty() {
            s.push_str("\n## Random-forest search\n\n| Sampler | n_estimators | max_depth | min_samples_split | min_samples_leaf | CV accuracy |\n|---|---|---|---|---|---|\n");
            for r in &self.search {
                let b = &r.best;
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} |",
                    r.sampler, b.n_estimators, b.max_depth, b.min_samples_split, b.min_samples_leaf, pct(r.cv_accuracy)
                )
                .unwrap();
            }
            let b = reference::BEST_FOREST;
            writeln!(
                s,
                "| reference | {} | {} | {} | {} | - |",
                b.n_estimators, b.max_depth, b.min_samples_split, b.min_samples_leaf
            )
            .unwrap();
        }
        Ok(s)
    }
}

/// Writes `report.md`, `roc.csv`, `roc.svg` and `metrics.json` into `out_dir`.
pub fn emit_report(report: &EvalReport, out_dir: &Path) -> Result<()> {
    report.check()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let files = [
        ("report.md", report.markdown()?),
        ("roc.csv", report.roc_csv()?),
        ("roc.svg", report.roc_svg()?),
        ("metrics.json", report.metrics_json()?),
    ];
    for (name, text) in files {
        let path = out_dir.join(name);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

