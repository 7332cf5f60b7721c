//! Pre-modeling feature filter: correlation pruning followed by an
//! information-gain threshold.

mod mi;
mod pearson;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use mi::mutual_information;
pub use pearson::{pearson_matrix, CorrelationMatrix};

use crate::error::{Error, Result};
use crate::jsonio::{read_json, write_json};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectConfig {
    pub r_threshold: f64,
    pub ig_threshold: f64,
    pub k: usize,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            r_threshold: 0.7,
            ig_threshold: 0.4,
            k: 3,
        }
    }
}

impl SelectConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_threshold > 0.0 && self.r_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "select.r_threshold must be in (0, 1], got {}",
                self.r_threshold
            )));
        }
        if !(self.ig_threshold >= 0.0) {
            return Err(Error::Config(format!(
                "select.ig_threshold must be >= 0, got {}",
                self.ig_threshold
            )));
        }
        if self.k == 0 {
            return Err(Error::Config("select.k must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum DropReason {
    CorrelatedWith(String),
    LowIg,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::CorrelatedWith(name) => write!(f, "correlated-with:{name}"),
            DropReason::LowIg => f.write_str("low-ig"),
        }
    }
}

impl Serialize for DropReason {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DropReason {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        match s.strip_prefix("correlated-with:") {
            Some(name) => Ok(DropReason::CorrelatedWith(name.to_string())),
            None if s == "low-ig" => Ok(DropReason::LowIg),
            None => Err(serde::de::Error::custom(format!("unknown drop reason {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dropped {
    pub feature: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Retained features in input order.
    pub retained: Vec<String>,
    /// Dropped features in the order they were removed.
    pub dropped: Vec<Dropped>,
}

/// Contents of `selection_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub config: SelectConfig,
    pub information_gain: BTreeMap<String, f64>,
    pub correlation: CorrelationMatrix,
    pub retained: Vec<String>,
    pub dropped: Vec<Dropped>,
}

impl SelectionReport {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }
}

/// Information gain of every column against the labels, in bits.
pub fn information_gain(x: &Matrix, y: &[bool], names: &[&str], k: usize) -> Result<BTreeMap<String, f64>> {
    let values: Vec<f64> = (0..x.n_cols())
        .into_par_iter()
        .map(|j| mutual_information(&x.column(j), y, k))
        .collect::<Result<_>>()?;
    Ok(names.iter().map(|n| n.to_string()).zip(values).collect())
}

/// Applies the selection rule to precomputed statistics.
///
/// Correlated pairs are resolved strongest first: among retained features,
/// the pair with the largest `|r| >= r_threshold` loses its member with the
/// smaller IG (on equal IG, the lexicographically later name). This repeats
/// until no retained pair reaches the threshold; then every feature with
/// `IG <= ig_threshold` is dropped.
pub fn select_from_stats(
    ig: &BTreeMap<String, f64>,
    corr: &CorrelationMatrix,
    config: &SelectConfig,
) -> Result<SelectionResult> {
    for name in &corr.names {
        if !ig.contains_key(name) {
            return Err(Error::InvalidInput(format!("no information gain for {name}")));
        }
    }
    let n = corr.names.len();
    let mut alive = vec![true; n];
    let mut dropped = Vec::new();
    loop {
        let mut worst: Option<(f64, &str, &str, usize, usize)> = None;
        for i in 0..n {
            for j in i + 1..n {
                if !alive[i] || !alive[j] {
                    continue;
                }
                let r = corr.r[i][j].abs();
                if r < config.r_threshold {
                    continue;
                }
                let (a, b) = order(&corr.names[i], &corr.names[j]);
                let better = match worst {
                    None => true,
                    Some((wr, wa, wb, _, _)) => r > wr || (r == wr && (a, b) < (wa, wb)),
                };
                if better {
                    worst = Some((r, a, b, i, j));
                }
            }
        }
        let Some((_, _, _, i, j)) = worst else { break };
        let (ni, nj) = (&corr.names[i], &corr.names[j]);
        let (gi, gj) = (ig[ni], ig[nj]);
        let (loser, winner) = if gi < gj || (gi == gj && ni > nj) { (i, j) } else { (j, i) };
        alive[loser] = false;
        dropped.push(Dropped {
            feature: corr.names[loser].clone(),
            reason: DropReason::CorrelatedWith(corr.names[winner].clone()),
        });
    }
    for i in 0..n {
        if alive[i] && ig[&corr.names[i]] <= config.ig_threshold {
            alive[i] = false;
            dropped.push(Dropped {
                feature: corr.names[i].clone(),
                reason: DropReason::LowIg,
            });
        }
    }
    let retained = (0..n).filter(|&i| alive[i]).map(|i| corr.names[i].clone()).collect();
    Ok(SelectionResult { retained, dropped })
}

fn order<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Computes correlations and information gain on `x`, then selects.
pub fn select_features(
    x: &Matrix,
    y: &[bool],
    names: &[&str],
    config: &SelectConfig,
) -> Result<SelectionReport> {
    config.validate()?;
    if x.n_rows() != y.len() {
        return Err(Error::InvalidInput(format!(
            "{} rows for {} labels",
            x.n_rows(),
            y.len()
        )));
    }
    let correlation = pearson_matrix(x, names)?;
    let information_gain = information_gain(x, y, names, config.k)?;
    let result = select_from_stats(&information_gain, &correlation, config)?;
    Ok(SelectionReport {
        config: *config,
        information_gain,
        correlation,
        retained: result.retained,
        dropped: result.dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
    }

    #[test]
    fn independent_features_above_threshold_are_all_kept() {
        let ig = stats(&[("a", 0.5), ("b", 0.6), ("c", 0.9)]);
        let corr = CorrelationMatrix::identity(&["a", "b", "c"]);
        let r = select_from_stats(&ig, &corr, &SelectConfig::default()).unwrap();
        assert_eq!(r.retained, vec!["a", "b", "c"]);
        assert!(r.dropped.is_empty());
    }

    #[test]
    fn correlated_pair_drops_lower_ig_and_ties_drop_later_name() {
        let ig = stats(&[("a", 0.5), ("b", 0.6), ("c", 0.6), ("d", 0.3)]);
        let mut corr = CorrelationMatrix::identity(&["a", "b", "c", "d"]);
        corr.set("a", "b", -0.9).unwrap();
        corr.set("b", "c", 0.75).unwrap();
        let r = select_from_stats(&ig, &corr, &SelectConfig::default()).unwrap();
        assert_eq!(r.retained, vec!["b"]);
        assert_eq!(
            r.dropped,
            vec![
                Dropped { feature: "a".into(), reason: DropReason::CorrelatedWith("b".into()) },
                Dropped { feature: "c".into(), reason: DropReason::CorrelatedWith("b".into()) },
                Dropped { feature: "d".into(), reason: DropReason::LowIg },
            ]
        );
    }

    #[test]
    fn resolving_one_pair_can_save_another_feature() {
        // a-b strongest; dropping b leaves b-c moot so c survives.
        let ig = stats(&[("a", 0.9), ("b", 0.8), ("c", 0.7)]);
        let mut corr = CorrelationMatrix::identity(&["a", "b", "c"]);
        corr.set("a", "b", 0.95).unwrap();
        corr.set("b", "c", 0.8).unwrap();
        let r = select_from_stats(&ig, &corr, &SelectConfig::default()).unwrap();
        assert_eq!(r.retained, vec!["a", "c"]);
    }

    #[test]
    fn drop_reason_serialization() {
        let json = serde_json::to_string(&DropReason::CorrelatedWith("Score".into())).unwrap();
        assert_eq!(json, "\"correlated-with:Score\"");
        let back: DropReason = serde_json::from_str(&json).unwrap();
        assert_eq!(back, DropReason::CorrelatedWith("Score".into()));
        assert_eq!(serde_json::to_string(&DropReason::LowIg).unwrap(), "\"low-ig\"");
    }
}
