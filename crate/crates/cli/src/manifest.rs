//! Per-stage manifests: content digests of every file a stage read and
//! wrote, plus a digest of the settings it ran with. A later stage trusts
//! an upstream artifact only while all three still match.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use soaccept_core::jsonio::{read_json, write_json};
use soaccept_core::{Error, Result};

pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Features,
    Select,
    Train,
    Evaluate,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Ingest, Stage::Features, Stage::Select, Stage::Train, Stage::Evaluate];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Features => "features",
            Stage::Select => "select",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
        }
    }

    pub fn upstream(self) -> &'static [Stage] {
        let i = Stage::ALL.iter().position(|&s| s == self).expect("listed");
        &Stage::ALL[..i]
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub stage: String,
    /// Digest of the stage settings.
    pub config: String,
    /// Files outside the workdir, by file name (informational).
    pub sources: BTreeMap<String, String>,
    /// Workdir files read, by relative path.
    pub inputs: BTreeMap<String, String>,
    /// Workdir files written, by relative path.
    pub outputs: BTreeMap<String, String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut hasher = Sha256::new();
    std::io::copy(&mut file, &mut hasher).map_err(|e| io_error(path, e))?;
    Ok(hex(&hasher.finalize()))
}

pub fn sha256_json<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("settings serialize");
    hex(&Sha256::digest(text.as_bytes()))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

/// The working directory shared by all stages.
#[derive(Debug, Clone)]
pub struct Workdir {
    pub root: PathBuf,
}

impl Workdir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Workdir { root: root.into() }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    fn manifest_path(&self, stage: Stage) -> PathBuf {
        self.path(&format!("{stage}.manifest.json"))
    }

    /// Removes the stage's manifest before it rewrites its outputs, so an
    /// interrupted run never looks complete.
    pub fn begin(&self, stage: Stage) -> Result<()> {
        std::fs::create_dir_all(&self.root).map_err(|e| io_error(&self.root, e))?;
        let path = self.manifest_path(stage);
        match std::fs::remove_file(&path) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
            Err(e) => Err(io_error(&path, e)),
        }
    }

    pub fn record(
        &self,
        stage: Stage,
        config: String,
        sources: &[&Path],
        inputs: &[&str],
        outputs: &[String],
    ) -> Result<Manifest> {
        let digest_all = |files: Vec<(String, PathBuf)>| -> Result<BTreeMap<String, String>> {
            files.into_iter().map(|(k, p)| Ok((k, sha256_file(&p)?))).collect()
        };
        let manifest = Manifest {
            schema: MANIFEST_SCHEMA,
            stage: stage.name().into(),
            config,
            sources: digest_all(
                sources
                    .iter()
                    .map(|p| (p.file_name().unwrap_or_default().to_string_lossy().into_owned(), p.to_path_buf()))
                    .collect(),
            )?,
            inputs: digest_all(inputs.iter().map(|r| (r.to_string(), self.path(r))).collect())?,
            outputs: digest_all(outputs.iter().map(|r| (r.clone(), self.path(r))).collect())?,
        };
        write_json(&self.manifest_path(stage), &manifest)?;
        Ok(manifest)
    }

    pub fn manifest(&self, stage: Stage) -> Option<Manifest> {
        let path = self.manifest_path(stage);
        if !path.exists() {
            return None;
        }
        read_json::<Manifest>(&path).ok().filter(|m| m.schema == MANIFEST_SCHEMA)
    }

    /// Checks every stage upstream of `current`, earliest first, against
    /// the files on disk and the current settings digests.
    pub fn require(&self, current: Stage, config_of: impl Fn(Stage) -> String) -> Result<()> {
        for &stage in current.upstream() {
            let fail = |reason: String| Error::StageDependency {
                stage: current.name().into(),
                reason,
                rerun: stage.name().into(),
            };
            let Some(m) = self.manifest(stage) else {
                return Err(fail(format!("{stage} has not completed in {}", self.root.display())));
            };
            if m.config != config_of(stage) {
                return Err(fail(format!("the {stage} settings changed since it ran")));
            }
            for (rel, digest) in m.outputs.iter().chain(&m.inputs) {
                let path = self.path(rel);
                if !path.exists() {
                    return Err(fail(format!("{rel} is missing")));
                }
                if &sha256_file(&path)? != digest {
                    return Err(fail(format!("{rel} changed since {stage} ran")));
                }
            }
        }
        Ok(())
    }
}
