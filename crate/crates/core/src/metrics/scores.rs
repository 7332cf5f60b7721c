use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts with accepted as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

pub fn confusion(y_true: &[bool], y_pred: &[bool]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (true, false) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// A ratio whose denominator may be zero; such ratios read as 0 and are
/// marked undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub value: f64,
    pub undefined: bool,
}

impl Rate {
    fn of(num: u64, den: u64) -> Rate {
        if den == 0 {
            Rate { value: 0.0, undefined: true }
        } else {
            Rate { value: num as f64 / den as f64, undefined: false }
        }
    }
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> Rate {
        Rate::of(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> Rate {
        Rate::of(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> Rate {
        Rate::of(self.tp, self.tp + self.fn_)
    }

    /// Matthews correlation; 0 when any marginal is empty.
    pub fn mcc(&self) -> f64 {
        let (tp, fp, tn, fn_) = (self.tp as f64, self.fp as f64, self.tn as f64, self.fn_ as f64);
        let factors = [tp + fp, tp + fn_, tn + fp, tn + fn_];
        if factors.contains(&0.0) {
            return 0.0;
        }
        let den = factors.iter().product::<f64>().sqrt();
        ((tp * tn - fp * fn_) / den).clamp(-1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Rows scoring at least this value are predicted positive; the first
    /// point uses +infinity.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC by sweeping every distinct score from high to low.
pub fn roc(y_true: &[bool], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} scores",
            y_true.len(),
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidInput("NaN score".into()));
    }
    let n_pos = y_true.iter().filter(|&&b| b).count() as f64;
    let n_neg = y_true.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return Err(Error::InvalidInput("ROC needs both classes".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY }];
    let (mut tp, mut fp) = (0.0, 0.0);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if y_true[order[i]] {
                tp += 1.0;
            } else {
                fp += 1.0;
            }
            i += 1;
        }
        let prev = *points.last().expect("start point");
        let point = RocPoint { fpr: fp / n_neg, tpr: tp / n_pos, threshold };
        auc += (point.fpr - prev.fpr) * (point.tpr + prev.tpr) / 2.0;
        points.push(point);
    }
    Ok(RocCurve { points, auc })
}
