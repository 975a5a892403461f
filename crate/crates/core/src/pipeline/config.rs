use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::registry::ModelKind;
use crate::error::{Error, Result};
use crate::evaluation::BenchmarkKind;

/// Everything a run depends on. Relative paths resolve against the
/// directory of the configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpus: PathBuf,
    pub out: PathBuf,
    /// Slice sizes in tokens, strictly increasing.
    pub slices: Vec<usize>,
    pub models: Vec<String>,
    pub seed: u64,
    /// 1 is required for bit-identical results.
    pub threads: usize,
    pub lowercase: bool,
    pub min_count: u64,
    pub window: usize,
    pub cross_document: bool,
    /// Context columns kept before factorization.
    pub prune: usize,
    pub svd: SvdSection,
    pub tsvd: TsvdSection,
    pub isvd: IsvdSection,
    pub ri: RiSection,
    pub neural: NeuralSection,
    pub benchmarks: Vec<BenchmarkSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvdSection {
    pub oversample: usize,
    pub power_iters: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TsvdSection {
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsvdSection {
    pub remove: usize,
    pub keep_through: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiSection {
    pub dim: usize,
    pub nnz: usize,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NeuralSection {
    pub dim: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub unigram_power: f64,
    /// Frequent-word subsampling threshold; 0 disables it.
    pub subsample: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub name: String,
    pub kind: BenchmarkKind,
    pub path: PathBuf,
}

impl Default for SvdSection {
    fn default() -> Self {
        SvdSection {
            oversample: 10,
            power_iters: 4,
        }
    }
}

impl Default for TsvdSection {
    fn default() -> Self {
        TsvdSection { dim: 200 }
    }
}

impl Default for IsvdSection {
    fn default() -> Self {
        IsvdSection {
            remove: 200,
            keep_through: 3000,
        }
    }
}

impl Default for RiSection {
    fn default() -> Self {
        RiSection {
            dim: 2000,
            nnz: 10,
            lambda: 60.0,
        }
    }
}

impl Default for NeuralSection {
    fn default() -> Self {
        NeuralSection {
            dim: 200,
            negatives: 5,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 0.0001,
            unigram_power: 0.75,
            subsample: 0.0,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let bench = |name: &str, kind| BenchmarkSpec {
            name: name.to_string(),
            kind,
            path: PathBuf::from(format!("{}.txt", name.to_lowercase())),
        };
        ExperimentConfig {
            corpus: PathBuf::from("corpus.txt"),
            out: PathBuf::from("run"),
            slices: vec![1_000_000, 10_000_000],
            models: ModelKind::ALL.iter().map(|m| m.name().to_string()).collect(),
            seed: 1,
            threads: 1,
            lowercase: true,
            min_count: 1,
            window: 2,
            cross_document: false,
            prune: 50_000,
            svd: SvdSection::default(),
            tsvd: TsvdSection::default(),
            isvd: IsvdSection::default(),
            ri: RiSection::default(),
            neural: NeuralSection::default(),
            benchmarks: vec![
                bench("TOEFL", BenchmarkKind::Choice),
                bench("ESL", BenchmarkKind::Choice),
                bench("SL", BenchmarkKind::Rating),
                bench("MEN", BenchmarkKind::Rating),
                bench("RW", BenchmarkKind::Rating),
            ],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Parses `path` and resolves its relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {}", path.display(), e)))?;
        let cfg = Self::from_toml(&text)?;
        Ok(cfg.resolved(path.parent().unwrap_or(Path::new("."))))
    }

    /// Joins every relative path onto `base`.
    pub fn resolved(mut self, base: &Path) -> Self {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.corpus);
        join(&mut self.out);
        for b in &mut self.benchmarks {
            join(&mut b.path);
        }
        self
    }

    pub fn model_kinds(&self) -> Result<Vec<ModelKind>> {
        self.models.iter().map(|m| ModelKind::lookup(m)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.slices.is_empty() || self.slices.contains(&0) {
            return bad("slice sizes must be positive and at least one is required".into());
        }
        if self.slices.windows(2).any(|w| w[0] >= w[1]) {
            return bad("slice sizes must be strictly increasing".into());
        }
        if self.models.is_empty() {
            return bad("no models selected".into());
        }
        self.model_kinds().map_err(|e| Error::Config(e.to_string()))?;
        if self.benchmarks.is_empty() {
            return bad("no benchmarks configured".into());
        }
        let mut names: Vec<&str> = self.benchmarks.iter().map(|b| b.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) || names.iter().any(|n| n.is_empty() || n.contains(char::is_whitespace)) {
            return bad("benchmark names must be unique, non-empty and free of whitespace".into());
        }
        if self.threads == 0 || self.window == 0 || self.prune == 0 || self.min_count == 0 {
            return bad("threads, window, prune and min_count must be positive".into());
        }
        if self.tsvd.dim == 0 || self.isvd.remove >= self.isvd.keep_through {
            return bad("need tsvd.dim >= 1 and isvd.remove < isvd.keep_through".into());
        }
        if self.ri.dim == 0 || self.ri.nnz % 2 != 0 || self.ri.nnz > self.ri.dim || !(self.ri.lambda >= 0.0) {
            return bad("RI needs an even nnz no larger than dim and a non-negative lambda".into());
        }
        let n = &self.neural;
        if n.dim == 0 || n.negatives == 0 || !(n.lr_start > 0.0) || !(n.lr_end >= 0.0) || !(n.subsample >= 0.0) {
            return bad("neural dim, negatives and lr_start must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        cfg.validate().unwrap();
    }

    #[test]
    fn partial_files_take_defaults() {
        let cfg = ExperimentConfig::from_toml("slices = [100]\nmodels = [\"co\"]\n[isvd]\nremove = 10\n").unwrap();
        assert_eq!(cfg.slices, [100]);
        assert_eq!(cfg.isvd.keep_through, 3000);
        assert_eq!(cfg.isvd.remove, 10);
    }

    #[test]
    fn validation() {
        let with = |f: &dyn Fn(&mut ExperimentConfig)| {
            let mut c = ExperimentConfig::default();
            f(&mut c);
            c.validate()
        };
        assert!(with(&|c| c.slices = vec![10, 5]).is_err());
        assert!(with(&|c| c.models = vec!["xyz".into()]).is_err());
        assert!(with(&|c| c.isvd.remove = 3000).is_err());
        assert!(matches!(with(&|c| c.ri.nnz = 3), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn relative_paths_resolve() {
        let cfg = ExperimentConfig::default().resolved(Path::new("/data"));
        assert_eq!(cfg.corpus, Path::new("/data/corpus.txt"));
        assert_eq!(cfg.benchmarks[0].path, Path::new("/data/toefl.txt"));
    }
}
