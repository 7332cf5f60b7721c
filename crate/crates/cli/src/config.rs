//! `run.json`: every stage setting plus the master seed.
//!
//! Unit seeds are `seed::derive(master, unit)` with unit names `split`,
//! `search:<sampler>`, `resample:<sampler>`, `forest:<sampler>`,
//! `mlp:<sampler>` and `importance:<sampler>`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use soaccept_core::ingest::IngestFilter;
use soaccept_core::learn::{MlpConfig, SearchSpace, SplitSpec};
use soaccept_core::resample::{ResamplePlan, SamplerKind};
use soaccept_core::select::SelectConfig;
use soaccept_core::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub posts: PathBuf,
    pub users: PathBuf,
    pub workdir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            posts: "Posts.xml".into(),
            users: "Users.xml".into(),
            workdir: "work".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleSettings {
    /// One trained model pair per sampler.
    pub samplers: Vec<SamplerKind>,
    pub k: usize,
    pub target_ratio: f64,
    pub beta: f64,
}

impl Default for ResampleSettings {
    fn default() -> Self {
        ResampleSettings {
            samplers: vec![SamplerKind::Smote, SamplerKind::Adasyn],
            k: 5,
            target_ratio: 1.0,
            beta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSettings {
    pub train_fraction: f64,
}

impl Default for SplitSettings {
    fn default() -> Self {
        SplitSettings { train_fraction: 0.7 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MlpSettings {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for MlpSettings {
    fn default() -> Self {
        let d = MlpConfig::default();
        MlpSettings {
            hidden: d.hidden,
            learning_rate: d.learning_rate,
            batch_size: d.batch_size,
            epochs: d.epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSettings {
    /// Shuffles per column for the network's permutation importance.
    pub permutation_repeats: usize,
}

impl Default for EvaluateSettings {
    fn default() -> Self {
        EvaluateSettings { permutation_repeats: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub paths: Paths,
    pub ingest: IngestFilter,
    pub select: SelectConfig,
    pub resample: ResampleSettings,
    pub split: SplitSettings,
    pub search: SearchSpace,
    pub mlp: MlpSettings,
    pub evaluate: EvaluateSettings,
}

/// Command-line adjustments applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workdir: Option<PathBuf>,
    /// `key.path=value`; the value is parsed as JSON, else taken as a string.
    pub set: Vec<String>,
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

fn apply_set(value: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set expects key=value, got {assignment:?}")))?;
    let mut slot = &mut *value;
    for part in key.split('.') {
        slot = slot
            .get_mut(part)
            .ok_or_else(|| Error::Config(format!("unknown configuration key {key:?}")))?;
    }
    *slot = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    Ok(())
}

fn config_error(e: serde_json::Error) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    /// Defaults, then the file (if any), then `--set`, `--seed` and `--out`.
    /// Relative paths in the file resolve against the file's directory.
    pub fn load(file: Option<&Path>, overrides: &Overrides) -> Result<RunConfig> {
        let mut value = serde_json::to_value(RunConfig::default()).map_err(config_error)?;
        let mut base_dir = PathBuf::from(".");
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let patch: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            if !patch.is_object() {
                return Err(Error::Config(format!("{}: expected a JSON object", path.display())));
            }
            merge(&mut value, patch);
            base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        }
        for assignment in &overrides.set {
            apply_set(&mut value, assignment)?;
        }
        let mut config: RunConfig = serde_json::from_value(value).map_err(config_error)?;
        for p in [&mut config.paths.posts, &mut config.paths.users, &mut config.paths.workdir] {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        }
        if let Some(seed) = overrides.seed {
            config.seed = seed;
        }
        if let Some(dir) = &overrides.workdir {
            config.paths.workdir = dir.clone();
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.ingest.validate()?;
        self.select.validate()?;
        self.search.validate()?;
        let f = self.split.train_fraction;
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Config(format!("split.train_fraction must be in (0, 1), got {f}")));
        }
        self.mlp_config("none").validate()?;
        if self.resample.samplers.is_empty() {
            return Err(Error::Config("resample.samplers must not be empty".into()));
        }
        let mut seen = self.resample.samplers.clone();
        seen.sort_by_key(|s| s.as_str());
        seen.dedup();
        if seen.len() != self.resample.samplers.len() {
            return Err(Error::Config("resample.samplers lists a sampler twice".into()));
        }
        for &s in &self.resample.samplers {
            self.resample_plan(s, 0).validate()?;
        }
        if self.evaluate.permutation_repeats == 0 {
            return Err(Error::Config("evaluate.permutation_repeats must be at least 1".into()));
        }
        Ok(())
    }

    pub fn unit_seed(&self, unit: &str) -> u64 {
        seed::derive(self.seed, unit)
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_fraction: self.split.train_fraction,
            seed: self.unit_seed("split"),
        }
    }

    pub fn resample_plan(&self, method: SamplerKind, seed: u64) -> ResamplePlan {
        ResamplePlan {
            method,
            k: self.resample.k,
            target_ratio: self.resample.target_ratio,
            beta: self.resample.beta,
            seed,
        }
    }

    pub fn mlp_config(&self, sampler: &str) -> MlpConfig {
        MlpConfig {
            hidden: self.mlp.hidden.clone(),
            learning_rate: self.mlp.learning_rate,
            batch_size: self.mlp.batch_size,
            epochs: self.mlp.epochs,
            seed: self.unit_seed(&format!("mlp:{sampler}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, text: &str) -> PathBuf {
        let path = dir.join("run.json");
        std::fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn partial_files_keep_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), r#"{"seed": 9, "select": {"ig_threshold": 0.1}}"#);
        let c = RunConfig::load(Some(&path), &Overrides::default()).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.select.ig_threshold, 0.1);
        assert_eq!(c.select.r_threshold, 0.7);
        assert_eq!(c.paths.workdir, dir.path().join("work"));
    }

    #[test]
    fn overrides_apply_in_order() {
        let o = Overrides {
            seed: Some(3),
            workdir: Some("elsewhere".into()),
            set: vec!["search.n_iterations=7".into(), "resample.samplers=[\"smote\"]".into()],
        };
        let c = RunConfig::load(None, &o).unwrap();
        assert_eq!(c.seed, 3);
        assert_eq!(c.search.n_iterations, 7);
        assert_eq!(c.resample.samplers, vec![SamplerKind::Smote]);
        assert_eq!(c.paths.workdir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn mistakes_are_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let bad = [
            r#"{"sed": 1}"#,
            r#"{"select": {"r_threshold": 2.0}}"#,
            r#"{"mlp": {"hidden": [4]}}"#,
            r#"[1]"#,
            "{",
        ];
        for text in bad {
            let err = RunConfig::load(Some(&write(dir.path(), text)), &Overrides::default()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{text}: {err}");
        }
        let o = Overrides { set: vec!["search.nope=1".into()], ..Overrides::default() };
        assert_eq!(RunConfig::load(None, &o).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn unit_seeds_differ() {
        let c = RunConfig::default();
        assert_ne!(c.unit_seed("split"), c.unit_seed("search:smote"));
        assert_ne!(c.mlp_config("smote").seed, c.mlp_config("adasyn").seed);
    }
}
