//! Full experiments: slice a corpus, build every requested model on every
//! slice, and score them on a benchmark suite overall and per frequency
//! class. Each stage's output is stored under a digest of its inputs and
//! reused when those inputs are unchanged.

mod cache;
mod config;
mod registry;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub use cache::{file_digest, KeyBuilder, RunManifest, StageCache, StageRecord};
pub use config::{
    BenchmarkSpec, ExperimentConfig, IsvdSection, NeuralSection, RiSection, SvdSection, TsvdSection,
};
pub use registry::ModelKind;

use crate::cooccurrence::{count_cooccurrences_sharded, prune_contexts, CoocMatrix, WindowConfig};
use crate::corpus::{Corpus, CorpusSlice, TokenizerConfig, Vocabulary};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::evaluation::{
    class_table, evaluate_suite, overall_table, partition_tests, records, Benchmark, EvalReport, Partition,
    SparseVectors,
};
use crate::factorization::{isvd_embed, svd_with, tsvd_embed, FactorizationResult, SvdConfig};
use crate::neural::{self, Mode, NeuralConfig};
use crate::random_indexing::{ri_train, RiConfig};
use crate::weighting::{apply_co, apply_ppmi, WeightedMatrix};

/// Short label for a token count: `1M`, `250k`, `1234`.
pub fn slice_label(n: usize) -> String {
    for (unit, suffix) in [(1_000_000_000, "G"), (1_000_000, "M"), (1_000, "k")] {
        if n >= unit && n % unit == 0 {
            return format!("{}{}", n / unit, suffix);
        }
    }
    n.to_string()
}

/// Scores of every model on one slice.
#[derive(Clone, Debug)]
pub struct SliceReport {
    pub label: String,
    pub tokens: usize,
    pub truncated: bool,
    pub reports: Vec<EvalReport>,
}

impl SliceReport {
    pub fn model(&self, name: &str) -> Option<&EvalReport> {
        self.reports.iter().find(|r| r.model == name)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub slices: Vec<SliceReport>,
    pub partition: Partition,
}

/// Loads every configured benchmark. A missing file is a configuration error.
pub fn load_benchmarks(cfg: &ExperimentConfig) -> Result<Vec<Benchmark>> {
    cfg.benchmarks
        .iter()
        .map(|b| {
            if !b.path.is_file() {
                return Err(Error::Config(format!("benchmark file {} not found", b.path.display())));
            }
            Benchmark::load(b.name.clone(), b.kind, &b.path)
        })
        .collect()
}

fn read_vectors(path: &Path, model: &str) -> Result<EmbeddingMatrix> {
    EmbeddingMatrix::read(cache::open(path)?, model)
}

fn read_weights(path: &Path) -> Result<WeightedMatrix> {
    WeightedMatrix::read(cache::open(path)?)
}

fn read_cooc(path: &Path) -> Result<CoocMatrix> {
    CoocMatrix::read(cache::open(path)?)
}

/// Links (or copies) a cached artifact to a stable name in the output tree.
fn publish(src: &Path, dst: &Path) -> Result<()> {
    if dst.exists() {
        std::fs::remove_file(dst).map_err(|e| Error::file(dst, e))?;
    }
    if std::fs::hard_link(src, dst).is_err() {
        std::fs::copy(src, dst).map_err(|e| Error::file(dst, e))?;
    }
    Ok(())
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    cache: StageCache,
    artifacts: BTreeMap<String, String>,
}

impl Runner<'_> {
    fn out(&self) -> &Path {
        &self.cfg.out
    }

    fn record_artifact(&mut self, path: &Path) -> Result<()> {
        let rel = path.strip_prefix(self.out()).unwrap_or(path).to_string_lossy().into_owned();
        let digest = file_digest(path)?;
        self.artifacts.insert(rel, digest);
        Ok(())
    }

    fn write_text(&mut self, path: &Path, text: &str) -> Result<()> {
        std::fs::write(path, text).map_err(|e| Error::file(path, e))?;
        self.record_artifact(path)
    }

    fn window(&self) -> Result<WindowConfig> {
        let mut w = WindowConfig::new(self.cfg.window)?;
        w.cross_document = self.cfg.cross_document;
        Ok(w)
    }

    /// Slice stage: vocabulary and re-mapped tokens of the first `n` tokens.
    fn slice_stage(&mut self, n: usize, corpus_digest: &str, corpus: &mut Option<Corpus>) -> Result<StageRecord> {
        let cfg = self.cfg;
        let mut key = KeyBuilder::new("slice");
        key.add("corpus", corpus_digest)
            .add("tokens", n)
            .add("min_count", cfg.min_count)
            .add("lowercase", cfg.lowercase);
        let max = *cfg.slices.last().expect("validated");
        let (_, rec) = self.cache.run("slice", &slice_label(n), &key, &["vocab", "tokens"], |p| {
            if corpus.is_none() {
                let tok = TokenizerConfig {
                    lowercase: cfg.lowercase,
                };
                let r = crate::corpus::open_text(&cfg.corpus)?;
                *corpus = Some(Corpus::read_limit(r, &tok, max)?);
            }
            let (vocab, slice) = corpus.as_ref().expect("loaded").slice_with_vocab(n, cfg.min_count)?;
            vocab.write(cache::create(&p[0])?)?;
            slice.write_binary(cache::create(&p[1])?)?;
            Ok(())
        })?;
        Ok(rec)
    }

    fn load_slice(&self, rec: &StageRecord) -> Result<(Vocabulary, CorpusSlice)> {
        let paths: Vec<PathBuf> = rec.outputs.keys().map(|k| self.out().join(k)).collect();
        let vocab_path = paths.iter().find(|p| p.extension().is_some_and(|e| e == "vocab")).expect("vocab output");
        let tok_path = paths.iter().find(|p| p.extension().is_some_and(|e| e == "tokens")).expect("tokens output");
        let vocab = Vocabulary::read(cache::open(vocab_path)?)?;
        let slice = CorpusSlice::read_binary(cache::open(tok_path)?)?;
        slice.check_ids(vocab.len())?;
        Ok((vocab, slice))
    }

    fn single(&mut self, stage: &str, label: &str, key: &KeyBuilder, ext: &str, produce: impl FnOnce(&Path) -> Result<()>) -> Result<(PathBuf, String)> {
        let (paths, rec) = self.cache.run(stage, label, key, &[ext], |p| produce(&p[0]))?;
        Ok((paths.into_iter().next().expect("one output"), rec.digest()))
    }

    fn run_slice(
        &mut self,
        n: usize,
        slice_rec: &StageRecord,
        kinds: &[ModelKind],
        suite: &[Benchmark],
        partition: &Partition,
    ) -> Result<SliceReport> {
        let cfg = self.cfg;
        let label = slice_label(n);
        let dir = self.out().join(&label);
        std::fs::create_dir_all(&dir).map_err(|e| Error::file(&dir, e))?;
        let (vocab, slice) = self.load_slice(slice_rec)?;
        let slice_digest = slice_rec.digest();
        let window = self.window()?;
        let mut reports = Vec::new();
        let mut notes = Vec::new();

        let needs_matrix = kinds.iter().any(|k| k.explicit() || k.factorized());
        let mut cooc: Option<(PathBuf, String)> = None;
        if needs_matrix {
            let mut key = KeyBuilder::new("cooc");
            key.add("slice", &slice_digest)
                .add("window", window.half_width)
                .add("cross_document", window.cross_document);
            let threads = cfg.threads;
            let (v, s) = (&vocab, &slice);
            cooc = Some(self.single("cooc", &label, &key, "cooc", |p| {
                count_cooccurrences_sharded(s, v, &window, threads)?.write(cache::create(p)?)
            })?);
        }

        for &kind in kinds.iter().filter(|k| k.explicit()) {
            let (cooc_path, cooc_digest) = cooc.clone().expect("counted");
            let mut key = KeyBuilder::new("weight");
            key.add("cooc", &cooc_digest).add("scheme", kind.name());
            let (path, _) = self.single("weight", &label, &key, "weights", |p| {
                let m = read_cooc(&cooc_path)?;
                let w = if kind == ModelKind::Co { apply_co(&m) } else { apply_ppmi(&m)? };
                w.write(cache::create(p)?)
            })?;
            let link = dir.join(format!("{}.weights", kind.name()));
            publish(&path, &link)?;
            self.record_artifact(&link)?;
            let space = SparseVectors::new(kind.name(), read_weights(&path)?, &vocab)?;
            reports.push((kind, evaluate_suite(&space, suite, Some(partition))));
        }

        let factorized: Vec<ModelKind> = kinds.iter().copied().filter(|k| k.factorized()).collect();
        if !factorized.is_empty() {
            let (cooc_path, cooc_digest) = cooc.clone().expect("counted");
            let mut key = KeyBuilder::new("prune");
            key.add("cooc", &cooc_digest).add("keep", cfg.prune);
            let prune = cfg.prune;
            let (pruned_path, pruned_digest) = self.single("prune", &label, &key, "cooc", |p| {
                prune_contexts(&read_cooc(&cooc_path)?, prune)?.write(cache::create(p)?)
            })?;
            let mut key = KeyBuilder::new("weight");
            key.add("cooc", &pruned_digest).add("scheme", "ppmi");
            let (ppmi_path, ppmi_digest) = self.single("weight", &label, &key, "weights", |p| {
                apply_ppmi(&read_cooc(&pruned_path)?)?.write(cache::create(p)?)
            })?;
            let (rows, cols) = {
                let m = read_weights(&ppmi_path)?;
                (m.rows(), m.cols())
            };
            let wanted = factorized
                .iter()
                .map(|k| if *k == ModelKind::Tsvd { cfg.tsvd.dim } else { cfg.isvd.keep_through })
                .max()
                .expect("non-empty");
            let rank = wanted.min(rows).min(cols);
            if rank < wanted {
                log::warn!("slice {}: factorization rank clamped from {} to {}", label, wanted, rank);
                notes.push(format!("factorization rank clamped from {} to {} by matrix shape {}x{}", wanted, rank, rows, cols));
            }
            let svd_cfg = SvdConfig {
                rank,
                oversample: cfg.svd.oversample,
                power_iters: cfg.svd.power_iters,
                seed: cfg.seed,
                threads: cfg.threads,
            };
            let mut key = KeyBuilder::new("svd");
            key.add("weights", &ppmi_digest)
                .add("rank", rank)
                .add("oversample", svd_cfg.oversample)
                .add("power_iters", svd_cfg.power_iters)
                .add("seed", svd_cfg.seed);
            let (svd_path, svd_digest) = self.single("svd", &label, &key, "svd", |p| {
                let m = read_weights(&ppmi_path)?;
                svd_with(&m, &svd_cfg)?.write(cache::create(p)?)
            })?;
            for kind in factorized {
                let (lo, hi) = match kind {
                    ModelKind::Tsvd => (0, cfg.tsvd.dim.min(rank)),
                    _ => {
                        let hi = cfg.isvd.keep_through.min(rank);
                        (cfg.isvd.remove.min(hi - 1), hi)
                    }
                };
                notes.push(format!("{}: latent dimensions {}..{}", kind, lo, hi));
                let mut key = KeyBuilder::new(kind.name());
                key.add("svd", &svd_digest).add("from", lo).add("to", hi);
                let words = vocab.words();
                let (path, _) = self.single(kind.name(), &label, &key, "vec", |p| {
                    let f = FactorizationResult::read(cache::open(&svd_path)?)?;
                    let e = if kind == ModelKind::Tsvd {
                        tsvd_embed(&f, hi, words)?
                    } else {
                        isvd_embed(&f, lo, hi, words)?
                    };
                    e.write(cache::create(p)?)
                })?;
                reports.push((kind, self.evaluate_vectors(kind, &path, &dir, suite, partition)?));
            }
        }

        if kinds.contains(&ModelKind::Ri) {
            let ri = RiConfig {
                dim: cfg.ri.dim,
                nnz: cfg.ri.nnz,
                lambda: cfg.ri.lambda,
                seed: cfg.seed,
            };
            let mut key = KeyBuilder::new("ri");
            key.add("slice", &slice_digest)
                .add("window", window.half_width)
                .add("cross_document", window.cross_document)
                .add("dim", ri.dim)
                .add("nnz", ri.nnz)
                .add("lambda", ri.lambda)
                .add("seed", ri.seed);
            let (v, s) = (&vocab, &slice);
            let (path, _) = self.single("ri", &label, &key, "vec", |p| {
                ri_train(s, v, &window, &ri)?.to_embedding(v)?.write(cache::create(p)?)
            })?;
            reports.push((ModelKind::Ri, self.evaluate_vectors(ModelKind::Ri, &path, &dir, suite, partition)?));
        }

        for (kind, mode) in [(ModelKind::Sgns, Mode::Sgns), (ModelKind::Cbow, Mode::Cbow)] {
            if !kinds.contains(&kind) {
                continue;
            }
            let n = &cfg.neural;
            let ncfg = NeuralConfig {
                mode,
                dim: n.dim,
                window: cfg.window,
                negatives: n.negatives,
                epochs: n.epochs,
                lr_start: n.lr_start,
                lr_end: n.lr_end,
                unigram_power: n.unigram_power,
                subsample: (n.subsample > 0.0).then_some(n.subsample),
                seed: cfg.seed,
                threads: cfg.threads,
            };
            let mut key = KeyBuilder::new(kind.name());
            key.add("slice", &slice_digest)
                .add("dim", ncfg.dim)
                .add("window", ncfg.window)
                .add("negatives", ncfg.negatives)
                .add("epochs", ncfg.epochs)
                .add("lr_start", ncfg.lr_start)
                .add("lr_end", ncfg.lr_end)
                .add("unigram_power", ncfg.unigram_power)
                .add("subsample", n.subsample)
                .add("seed", ncfg.seed)
                .add("threads", ncfg.threads);
            let (v, s) = (&vocab, &slice);
            let (path, _) = self.single(kind.name(), &label, &key, "vec", |p| {
                neural::train(s, v, &ncfg)?.0.write(cache::create(p)?)
            })?;
            reports.push((kind, self.evaluate_vectors(kind, &path, &dir, suite, partition)?));
        }

        // Report rows follow the registry order, whatever order models ran in.
        reports.sort_by_key(|(k, _)| *k);
        let reports: Vec<EvalReport> = reports.into_iter().map(|(_, r)| r).collect();
        let mut text = format!("slice {} tokens {}", label, slice.len());
        if slice.truncated {
            text += " (corpus shorter than requested)";
        }
        text += "\n";
        for note in &notes {
            let _ = writeln!(text, "# {}", note);
        }
        let _ = write!(text, "\n{}\n{}", overall_table(&reports), class_table(&reports));
        self.write_text(&dir.join("report.txt"), &text)?;
        self.write_text(&dir.join("records.txt"), &records(&reports))?;
        Ok(SliceReport {
            label,
            tokens: slice.len(),
            truncated: slice.truncated,
            reports,
        })
    }

    /// Publishes a vector file and scores its parsed contents, so cached
    /// and fresh runs see identical values.
    fn evaluate_vectors(
        &mut self,
        kind: ModelKind,
        path: &Path,
        dir: &Path,
        suite: &[Benchmark],
        partition: &Partition,
    ) -> Result<EvalReport> {
        let link = dir.join(format!("{}.vec", kind.name()));
        publish(path, &link)?;
        self.record_artifact(&link)?;
        let emb = read_vectors(path, kind.name())?;
        Ok(evaluate_suite(&emb, suite, Some(partition)))
    }
}

/// Runs every configured model on every slice and writes reports, vectors
/// and a manifest under `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let started = Instant::now();
    cfg.validate()?;
    let kinds = cfg.model_kinds()?;
    if !cfg.corpus.is_file() {
        return Err(Error::Config(format!("corpus {} not found", cfg.corpus.display())));
    }
    let suite = load_benchmarks(cfg)?;
    std::fs::create_dir_all(&cfg.out).map_err(|e| Error::file(&cfg.out, e))?;
    let mut runner = Runner {
        cfg,
        cache: StageCache::new(&cfg.out)?,
        artifacts: BTreeMap::new(),
    };

    let corpus_digest = file_digest(&cfg.corpus)?;
    let mut corpus = None;
    let mut slice_recs = Vec::new();
    for &n in &cfg.slices {
        slice_recs.push(runner.slice_stage(n, &corpus_digest, &mut corpus)?);
    }
    drop(corpus);

    // Frequency classes come from the largest slice.
    let (largest_vocab, _) = runner.load_slice(slice_recs.last().expect("validated"))?;
    let partition = partition_tests(&suite, &largest_vocab)?;
    drop(largest_vocab);
    runner.write_text(&cfg.out.join("partition.txt"), &partition.summary())?;

    let mut slices = Vec::new();
    for (&n, rec) in cfg.slices.iter().zip(&slice_recs) {
        slices.push(runner.run_slice(n, rec, &kinds, &suite, &partition)?);
    }

    let mut text = String::new();
    for s in &slices {
        let _ = writeln!(text, "slice {} ({} tokens)", s.label, s.tokens);
        text += &overall_table(&s.reports);
        text.push('\n');
    }
    runner.write_text(&cfg.out.join("report.txt"), &text)?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        stages: runner.cache.records,
        artifacts: runner.artifacts,
        seconds: started.elapsed().as_secs_f64(),
    };
    let path = cfg.out.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, json + "\n").map_err(|e| Error::file(&path, e))?;
    Ok(RunOutcome {
        manifest,
        slices,
        partition,
    })
}
