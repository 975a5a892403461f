use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

/// SHA-256 of a file's bytes, hex encoded.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut f = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::file(path, e))?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex(&h.finalize()))
}

/// Builds a stage key from named parameters, in insertion order.
#[derive(Default)]
pub struct KeyBuilder {
    hasher: Sha256,
    text: Vec<String>,
}

impl KeyBuilder {
    pub fn new(stage: &str) -> Self {
        let mut k = KeyBuilder::default();
        k.add("stage", stage);
        k
    }

    pub fn add(&mut self, name: &str, value: impl ToString) -> &mut Self {
        let line = format!("{}={}\n", name, value.to_string());
        self.hasher.update(line.as_bytes());
        self.text.push(line.trim_end().to_string());
        self
    }

    pub fn finish(&self) -> (String, String) {
        (hex(&self.hasher.clone().finalize()), self.text.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub slice: String,
    pub key: String,
    /// Output files relative to the output directory, with their digests.
    pub outputs: BTreeMap<String, String>,
    pub cache_hit: bool,
    pub seconds: f64,
}

impl StageRecord {
    /// One digest standing for all outputs of the stage.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (name, d) in &self.outputs {
            h.update(format!("{} {}\n", name, d).as_bytes());
        }
        hex(&h.finalize())
    }
}

/// Stages run or reused, plus digests of the final artifacts.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub stages: Vec<StageRecord>,
    pub artifacts: BTreeMap<String, String>,
    pub seconds: f64,
}

impl RunManifest {
    pub fn cache_hits(&self) -> usize {
        self.stages.iter().filter(|s| s.cache_hit).count()
    }
}

/// Content-addressed store for stage outputs under `<out>/cache`.
pub struct StageCache {
    root: PathBuf,
    pub records: Vec<StageRecord>,
}

impl StageCache {
    pub fn new(out: &Path) -> Result<Self> {
        let dir = out.join("cache");
        std::fs::create_dir_all(&dir).map_err(|e| Error::file(&dir, e))?;
        Ok(StageCache {
            root: out.to_path_buf(),
            records: Vec::new(),
        })
    }

    fn relative(&self, p: &Path) -> String {
        p.strip_prefix(&self.root).unwrap_or(p).to_string_lossy().into_owned()
    }

    /// Returns the output paths of `stage`, one per extension. A stored
    /// result is reused when every output still matches its recorded digest;
    /// otherwise `produce` writes the outputs to the given paths.
    pub fn run(
        &mut self,
        stage: &str,
        slice: &str,
        key: &KeyBuilder,
        exts: &[&str],
        produce: impl FnOnce(&[PathBuf]) -> Result<()>,
    ) -> Result<(Vec<PathBuf>, StageRecord)> {
        let started = Instant::now();
        let (digest, inputs) = key.finish();
        let base = self.root.join("cache").join(format!("{}-{}", stage, &digest[..16]));
        let paths: Vec<PathBuf> = exts.iter().map(|e| base.with_extension(e)).collect();
        let sidecar = base.with_extension("sha256");

        let stored = self.stored_digests(&paths, &sidecar);
        let (outputs, hit) = match stored {
            Some(outputs) => (outputs, true),
            None => {
                let fail = |e: Error| Error::Stage {
                    stage: stage.to_string(),
                    inputs: format!("slice {}; {}", slice, inputs),
                    source: Box::new(e),
                };
                let tmp: Vec<PathBuf> = paths
                    .iter()
                    .zip(exts)
                    .map(|(p, e)| p.with_extension(format!("{}.partial", e)))
                    .collect();
                produce(&tmp).map_err(fail)?;
                let mut outputs = BTreeMap::new();
                for (t, p) in tmp.iter().zip(&paths) {
                    std::fs::rename(t, p).map_err(|e| fail(Error::file(p, e)))?;
                    outputs.insert(self.relative(p), file_digest(p)?);
                }
                let text: String = outputs.iter().map(|(n, d)| format!("{} {}\n", d, n)).collect();
                std::fs::write(&sidecar, text).map_err(|e| Error::file(&sidecar, e))?;
                (outputs, false)
            }
        };
        let record = StageRecord {
            stage: stage.to_string(),
            slice: slice.to_string(),
            key: digest,
            outputs,
            cache_hit: hit,
            seconds: started.elapsed().as_secs_f64(),
        };
        log::info!(
            "{} {} [{}] {:.1}s",
            stage,
            slice,
            if hit { "cache hit" } else { "computed" },
            record.seconds
        );
        self.records.push(record.clone());
        Ok((paths, record))
    }

    fn stored_digests(&self, paths: &[PathBuf], sidecar: &Path) -> Option<BTreeMap<String, String>> {
        let text = std::fs::read_to_string(sidecar).ok()?;
        let recorded: BTreeMap<String, String> = text
            .lines()
            .filter_map(|l| l.split_once(' '))
            .map(|(d, n)| (n.to_string(), d.to_string()))
            .collect();
        if recorded.len() != paths.len() {
            return None;
        }
        for p in paths {
            let want = recorded.get(&self.relative(p))?;
            if file_digest(p).ok()? != *want {
                return None;
            }
        }
        Some(recorded)
    }
}

/// Creates `path` for buffered writing.
pub fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| Error::file(path, e))?;
    Ok(BufWriter::with_capacity(1 << 20, f))
}

pub fn open(path: &Path) -> Result<std::io::BufReader<File>> {
    let f = File::open(path).map_err(|e| Error::file(path, e))?;
    Ok(std::io::BufReader::with_capacity(1 << 20, f))
}
