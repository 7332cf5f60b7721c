use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// The sixteen answer features, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FeatureName {
    Timelag,
    #[serde(rename = "URLCount")]
    UrlCount,
    CommentCount,
    Reputation,
    TextPolarity,
    AnswerCount,
    ViewCount,
    Score,
    NumberOfCodeLine,
    NumberOfSentence,
    TextualSimilarity,
    Codelength,
    #[serde(rename = "TFAnswerCode")]
    TfAnswerCode,
    #[serde(rename = "TFAnswerText")]
    TfAnswerText,
    SignUpDateTimeLag,
    NumberOfWords,
}

pub const N_FEATURES: usize = 16;

impl FeatureName {
    pub const ALL: [FeatureName; N_FEATURES] = [
        FeatureName::Timelag,
        FeatureName::UrlCount,
        FeatureName::CommentCount,
        FeatureName::Reputation,
        FeatureName::TextPolarity,
        FeatureName::AnswerCount,
        FeatureName::ViewCount,
        FeatureName::Score,
        FeatureName::NumberOfCodeLine,
        FeatureName::NumberOfSentence,
        FeatureName::TextualSimilarity,
        FeatureName::Codelength,
        FeatureName::TfAnswerCode,
        FeatureName::TfAnswerText,
        FeatureName::SignUpDateTimeLag,
        FeatureName::NumberOfWords,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureName::Timelag => "Timelag",
            FeatureName::UrlCount => "URLCount",
            FeatureName::CommentCount => "CommentCount",
            FeatureName::Reputation => "Reputation",
            FeatureName::TextPolarity => "TextPolarity",
            FeatureName::AnswerCount => "AnswerCount",
            FeatureName::ViewCount => "ViewCount",
            FeatureName::Score => "Score",
            FeatureName::NumberOfCodeLine => "NumberOfCodeLine",
            FeatureName::NumberOfSentence => "NumberOfSentence",
            FeatureName::TextualSimilarity => "TextualSimilarity",
            FeatureName::Codelength => "Codelength",
            FeatureName::TfAnswerCode => "TFAnswerCode",
            FeatureName::TfAnswerText => "TFAnswerText",
            FeatureName::SignUpDateTimeLag => "SignUpDateTimeLag",
            FeatureName::NumberOfWords => "NumberOfWords",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Real-valued features; the rest are integer counts or milliseconds.
    pub fn is_real(self) -> bool {
        matches!(
            self,
            FeatureName::TextPolarity
                | FeatureName::TextualSimilarity
                | FeatureName::TfAnswerCode
                | FeatureName::TfAnswerText
        )
    }
}

impl fmt::Display for FeatureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FeatureName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown feature {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Accepted,
    Unaccepted,
}

impl Label {
    pub fn from_accepted(accepted: bool) -> Self {
        if accepted {
            Label::Accepted
        } else {
            Label::Unaccepted
        }
    }

    /// Accepted is the positive class.
    pub fn is_positive(self) -> bool {
        self == Label::Accepted
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Accepted => "accepted",
            Label::Unaccepted => "unaccepted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: [f64; N_FEATURES],
    pub label: Label,
}

impl FeatureVector {
    pub fn get(&self, name: FeatureName) -> f64 {
        self.values[name.index()]
    }

    pub fn set(&mut self, name: FeatureName, value: f64) {
        self.values[name.index()] = value;
    }
}

/// One row per answer, columns in [`FeatureName::ALL`] order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureVector>,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: FeatureName) -> Vec<f64> {
        self.rows.iter().map(|r| r.get(name)).collect()
    }

    /// `true` marks an accepted answer.
    pub fn labels(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.label.is_positive()).collect()
    }

    /// Dense matrix restricted to `columns`, in the given order.
    pub fn to_matrix(&self, columns: &[FeatureName]) -> Matrix {
        let mut m = Matrix::zeros(0, columns.len());
        let mut row = Vec::with_capacity(columns.len());
        for r in &self.rows {
            row.clear();
            row.extend(columns.iter().map(|&c| r.get(c)));
            m.push_row(&row);
        }
        m
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = csv::Writer::from_path(path)?;
        let mut header: Vec<&str> = FeatureName::ALL.iter().map(|n| n.as_str()).collect();
        header.push("label");
        out.write_record(&header)?;
        let mut fields = Vec::with_capacity(N_FEATURES + 1);
        for row in &self.rows {
            fields.clear();
            for name in FeatureName::ALL {
                let v = row.get(name);
                fields.push(if name.is_real() {
                    format_sig9(v)
                } else {
                    format_integral(v)
                });
            }
            fields.push(row.label.as_str().to_string());
            out.write_record(&fields)?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<FeatureMatrix> {
        let mut reader = csv::Reader::from_path(path)?;
        let header = reader.headers()?.clone();
        let expected: Vec<&str> = FeatureName::ALL
            .iter()
            .map(|n| n.as_str())
            .chain(["label"])
            .collect();
        if header.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Data(format!(
                "{}: unexpected header {:?}",
                path.display(),
                header
            )));
        }
        let mut rows = Vec::new();
        for (n, record) in reader.records().enumerate() {
            let record = record?;
            let bad = |what: &str| Error::Data(format!("{}: row {}: {what}", path.display(), n + 1));
            let mut values = [0.0; N_FEATURES];
            for (i, v) in values.iter_mut().enumerate() {
                *v = record[i].parse().map_err(|_| bad(&format!("bad number {:?}", &record[i])))?;
            }
            let label = match &record[N_FEATURES] {
                "accepted" => Label::Accepted,
                "unaccepted" => Label::Unaccepted,
                other => return Err(bad(&format!("bad label {other:?}"))),
            };
            rows.push(FeatureVector { values, label });
        }
        Ok(FeatureMatrix { rows })
    }
}

fn format_integral(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 9.0e15 {
        format!("{}", v as i64)
    } else {
        format_sig9(v)
    }
}

/// Shortest decimal rendering of `v` rounded to 9 significant digits.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let rounded: f64 = sci.parse().expect("round trip");
        let decimals = (8 - exp).max(0) as usize;
        let fixed = format!("{rounded:.decimals$}");
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
