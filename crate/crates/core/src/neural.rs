//! Skip-gram and continuous bag-of-words training with negative sampling.
//!
//! Both models minimise `-log σ(b·h) - Σ log σ(-b'·h)`, where `b` is the
//! output vector of the predicted word, `b'` the output vectors of sampled
//! negatives and `h` the input representation: the target's input vector for
//! SGNS, the mean of the context input vectors for CBOW.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cooccurrence::WindowConfig;
use crate::corpus::{CorpusSlice, Vocabulary};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sgns,
    Cbow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NeuralConfig {
    pub mode: Mode,
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub unigram_power: f64,
    /// Frequent-word subsampling threshold; off when `None`.
    pub subsample: Option<f64>,
    pub seed: u64,
    /// 1 trains deterministically; more threads update the shared tables
    /// without locks and are not reproducible.
    pub threads: usize,
}

impl NeuralConfig {
    pub fn new(mode: Mode) -> Self {
        NeuralConfig {
            mode,
            dim: 200,
            window: 2,
            negatives: 5,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 0.0001,
            unigram_power: 0.75,
            subsample: None,
            seed: 1,
            threads: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::param("neural dimension must be at least 1"));
        }
        if self.window < 1 {
            return Err(Error::param("window half-width must be at least 1"));
        }
        if self.negatives < 1 {
            return Err(Error::param("at least one negative sample is required"));
        }
        if !(self.lr_start >= self.lr_end && self.lr_end > 0.0) {
            return Err(Error::param("learning rates must satisfy lr_start >= lr_end > 0"));
        }
        Ok(())
    }
}

/// Negative-sampling distribution `P(b) ∝ freq(b)^power`.
#[derive(Clone, Debug)]
pub struct UnigramTable {
    probs: Vec<f64>,
    sampler: WeightedIndex<f64>,
}

impl UnigramTable {
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.sampler.sample(rng) as u32
    }
}

pub fn build_unigram_table(vocab: &Vocabulary, power: f64) -> Result<UnigramTable> {
    if vocab.is_empty() {
        return Err(Error::param("unigram table over an empty vocabulary"));
    }
    let weights: Vec<f64> = vocab.freqs().iter().map(|&f| (f as f64).powf(power)).collect();
    let norm: f64 = weights.iter().sum();
    let sampler = WeightedIndex::new(&weights)
        .map_err(|e| Error::param(format!("unigram weights: {e}")))?;
    Ok(UnigramTable {
        probs: weights.iter().map(|w| w / norm).collect(),
        sampler,
    })
}

/// Input (published) and output (context-side) vectors, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPair {
    pub dim: usize,
    pub input: Vec<f64>,
    pub output: Vec<f64>,
}

impl EmbeddingPair {
    pub fn zeros(vocab_size: usize, dim: usize) -> Self {
        EmbeddingPair {
            dim,
            input: vec![0.0; vocab_size * dim],
            output: vec![0.0; vocab_size * dim],
        }
    }

    /// Input vectors uniform in `[-0.5/dim, 0.5/dim]`, output vectors zero.
    pub fn init<R: Rng + ?Sized>(vocab_size: usize, dim: usize, rng: &mut R) -> Self {
        let bound = 0.5 / dim as f64;
        let input = (0..vocab_size * dim)
            .map(|_| rng.random_range(-bound..=bound))
            .collect();
        EmbeddingPair {
            dim,
            input,
            output: vec![0.0; vocab_size * dim],
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.input.len() / self.dim
    }

    pub fn input_vector(&self, id: u32) -> &[f64] {
        &self.input[id as usize * self.dim..][..self.dim]
    }

    pub fn output_vector(&self, id: u32) -> &[f64] {
        &self.output[id as usize * self.dim..][..self.dim]
    }

    fn check_ids(&self, ids: impl IntoIterator<Item = u32>) -> Result<()> {
        let n = self.vocab_size();
        for id in ids {
            if id as usize >= n {
                return Err(Error::Integrity(format!(
                    "word id {} outside vocabulary of size {}",
                    id, n
                )));
            }
        }
        Ok(())
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row access shared by the sequential and the lock-free trainers.
trait RowStore {
    fn read_input(&self, id: u32, out: &mut [f64]);
    fn add_input_into(&self, id: u32, out: &mut [f64]);
    fn output_dot(&self, id: u32, v: &[f64]) -> f64;
    fn output_axpy_into(&self, id: u32, alpha: f64, out: &mut [f64]);
    fn input_axpy(&mut self, id: u32, alpha: f64, v: &[f64]);
    fn output_axpy(&mut self, id: u32, alpha: f64, v: &[f64]);
}

impl RowStore for EmbeddingPair {
    fn read_input(&self, id: u32, out: &mut [f64]) {
        out.copy_from_slice(self.input_vector(id));
    }

    fn add_input_into(&self, id: u32, out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(self.input_vector(id)) {
            *o += v;
        }
    }

    fn output_dot(&self, id: u32, v: &[f64]) -> f64 {
        dot(self.output_vector(id), v)
    }

    fn output_axpy_into(&self, id: u32, alpha: f64, out: &mut [f64]) {
        for (o, b) in out.iter_mut().zip(self.output_vector(id)) {
            *o += alpha * b;
        }
    }

    fn input_axpy(&mut self, id: u32, alpha: f64, v: &[f64]) {
        let row = &mut self.input[id as usize * self.dim..][..self.dim];
        for (r, x) in row.iter_mut().zip(v) {
            *r += alpha * x;
        }
    }

    fn output_axpy(&mut self, id: u32, alpha: f64, v: &[f64]) {
        let row = &mut self.output[id as usize * self.dim..][..self.dim];
        for (r, x) in row.iter_mut().zip(v) {
            *r += alpha * x;
        }
    }
}

/// Tables shared between threads; reads and writes are relaxed and updates
/// from concurrent workers may be lost.
struct SharedTables {
    dim: usize,
    input: Vec<AtomicU64>,
    output: Vec<AtomicU64>,
}

impl SharedTables {
    fn from_pair(pair: &EmbeddingPair) -> Self {
        let conv = |v: &[f64]| v.iter().map(|x| AtomicU64::new(x.to_bits())).collect();
        SharedTables {
            dim: pair.dim,
            input: conv(&pair.input),
            output: conv(&pair.output),
        }
    }

    fn into_pair(self) -> EmbeddingPair {
        let conv = |v: Vec<AtomicU64>| v.into_iter().map(|x| f64::from_bits(x.into_inner())).collect();
        EmbeddingPair {
            dim: self.dim,
            input: conv(self.input),
            output: conv(self.output),
        }
    }
}

struct SharedView<'a>(&'a SharedTables);

#[inline]
fn load(a: &AtomicU64) -> f64 {
    f64::from_bits(a.load(Ordering::Relaxed))
}

impl RowStore for SharedView<'_> {
    fn read_input(&self, id: u32, out: &mut [f64]) {
        let row = &self.0.input[id as usize * self.0.dim..][..self.0.dim];
        for (o, a) in out.iter_mut().zip(row) {
            *o = load(a);
        }
    }

    fn add_input_into(&self, id: u32, out: &mut [f64]) {
        let row = &self.0.input[id as usize * self.0.dim..][..self.0.dim];
        for (o, a) in out.iter_mut().zip(row) {
            *o += load(a);
        }
    }

    fn output_dot(&self, id: u32, v: &[f64]) -> f64 {
        let row = &self.0.output[id as usize * self.0.dim..][..self.0.dim];
        row.iter().zip(v).map(|(a, x)| load(a) * x).sum()
    }

    fn output_axpy_into(&self, id: u32, alpha: f64, out: &mut [f64]) {
        let row = &self.0.output[id as usize * self.0.dim..][..self.0.dim];
        for (o, a) in out.iter_mut().zip(row) {
            *o += alpha * load(a);
        }
    }

    fn input_axpy(&mut self, id: u32, alpha: f64, v: &[f64]) {
        let row = &self.0.input[id as usize * self.0.dim..][..self.0.dim];
        for (a, x) in row.iter().zip(v) {
            a.store((load(a) + alpha * x).to_bits(), Ordering::Relaxed);
        }
    }

    fn output_axpy(&mut self, id: u32, alpha: f64, v: &[f64]) {
        let row = &self.0.output[id as usize * self.0.dim..][..self.0.dim];
        for (a, x) in row.iter().zip(v) {
            a.store((load(a) + alpha * x).to_bits(), Ordering::Relaxed);
        }
    }
}

#[derive(Default)]
struct Scratch {
    h: Vec<f64>,
    delta: Vec<f64>,
    grads: Vec<f64>,
}

impl Scratch {
    fn new(dim: usize) -> Self {
        Scratch {
            h: vec![0.0; dim],
            delta: vec![0.0; dim],
            grads: Vec::new(),
        }
    }
}

/// Scores the predicted word and negatives against `scratch.h`, then updates
/// the output vectors and leaves `Σ g·b` (pre-update `b`) in `scratch.delta`.
/// Returns the loss before the update.
fn predict_and_update<S: RowStore>(
    store: &mut S,
    predicted: u32,
    negatives: &[u32],
    lr: f64,
    scratch: &mut Scratch,
) -> f64 {
    let outputs = std::iter::once((predicted, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)));
    let mut loss = 0.0;
    scratch.grads.clear();
    for (id, label) in outputs.clone() {
        let score = store.output_dot(id, &scratch.h);
        loss -= if label > 0.0 {
            log_sigmoid(score)
        } else {
            log_sigmoid(-score)
        };
        scratch.grads.push(label - sigmoid(score));
    }
    scratch.delta.iter_mut().for_each(|d| *d = 0.0);
    for ((id, _), &g) in outputs.clone().zip(&scratch.grads) {
        store.output_axpy_into(id, g, &mut scratch.delta);
    }
    for ((id, _), &g) in outputs.zip(&scratch.grads) {
        store.output_axpy(id, lr * g, &scratch.h);
    }
    loss
}

fn sgns_update<S: RowStore>(
    store: &mut S,
    target: u32,
    context: u32,
    negatives: &[u32],
    lr: f64,
    scratch: &mut Scratch,
) -> f64 {
    store.read_input(target, &mut scratch.h);
    let loss = predict_and_update(store, context, negatives, lr, scratch);
    store.input_axpy(target, lr, &scratch.delta);
    loss
}

fn cbow_update<S: RowStore>(
    store: &mut S,
    context: &[u32],
    target: u32,
    negatives: &[u32],
    lr: f64,
    scratch: &mut Scratch,
) -> f64 {
    let n = context.len() as f64;
    scratch.h.iter_mut().for_each(|x| *x = 0.0);
    for &c in context {
        store.add_input_into(c, &mut scratch.h);
    }
    scratch.h.iter_mut().for_each(|x| *x /= n);
    let loss = predict_and_update(store, target, negatives, lr, scratch);
    for &c in context {
        store.input_axpy(c, lr / n, &scratch.delta);
    }
    loss
}

fn check_loss(loss: f64, epoch: usize, position: usize) -> Result<f64> {
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::Divergence {
            epoch,
            position,
            detail: format!("loss {}", loss),
        })
    }
}

/// One gradient step predicting `context` from `target`. Returns the loss
/// before the update.
pub fn sgns_step(
    target: u32,
    context: u32,
    negatives: &[u32],
    pair: &mut EmbeddingPair,
    lr: f64,
) -> Result<f64> {
    pair.check_ids([target, context].into_iter().chain(negatives.iter().copied()))?;
    let mut scratch = Scratch::new(pair.dim);
    let loss = sgns_update(pair, target, context, negatives, lr, &mut scratch);
    check_loss(loss, 0, 0)?;
    if pair.input_vector(target).iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            epoch: 0,
            position: 0,
            detail: "non-finite input vector".into(),
        });
    }
    Ok(loss)
}

/// One gradient step predicting `target` from the mean of `context`.
pub fn cbow_step(
    context: &[u32],
    target: u32,
    negatives: &[u32],
    pair: &mut EmbeddingPair,
    lr: f64,
) -> Result<f64> {
    if context.is_empty() {
        return Err(Error::param("CBOW step with an empty context"));
    }
    pair.check_ids(
        context
            .iter()
            .copied()
            .chain([target])
            .chain(negatives.iter().copied()),
    )?;
    let mut scratch = Scratch::new(pair.dim);
    let loss = cbow_update(pair, context, target, negatives, lr, &mut scratch);
    check_loss(loss, 0, 0)
}

/// Loss value and its gradient with respect to every touched row.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub loss: f64,
    pub input: BTreeMap<u32, Vec<f64>>,
    pub output: BTreeMap<u32, Vec<f64>>,
}

fn loss_and_gradient(
    pair: &EmbeddingPair,
    h: &[f64],
    predicted: u32,
    negatives: &[u32],
) -> (f64, Vec<f64>, BTreeMap<u32, Vec<f64>>) {
    let dim = pair.dim;
    let mut loss = 0.0;
    let mut d_h = vec![0.0; dim];
    let mut d_out: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let outputs = std::iter::once((predicted, true)).chain(negatives.iter().map(|&n| (n, false)));
    for (id, positive) in outputs {
        let b = pair.output_vector(id);
        let s = dot(b, h);
        // d/ds of -ln σ(s) is σ(s) - 1; of -ln σ(-s) is σ(s)
        let (l, ds) = if positive {
            (-log_sigmoid(s), sigmoid(s) - 1.0)
        } else {
            (-log_sigmoid(-s), sigmoid(s))
        };
        loss += l;
        for (d, bv) in d_h.iter_mut().zip(b) {
            *d += ds * bv;
        }
        let g = d_out.entry(id).or_insert_with(|| vec![0.0; dim]);
        for (gv, hv) in g.iter_mut().zip(h) {
            *gv += ds * hv;
        }
    }
    (loss, d_h, d_out)
}

pub fn sgns_gradient(pair: &EmbeddingPair, target: u32, context: u32, negatives: &[u32]) -> Gradient {
    let h = pair.input_vector(target).to_vec();
    let (loss, d_h, output) = loss_and_gradient(pair, &h, context, negatives);
    Gradient {
        loss,
        input: BTreeMap::from([(target, d_h)]),
        output,
    }
}

pub fn cbow_gradient(pair: &EmbeddingPair, context: &[u32], target: u32, negatives: &[u32]) -> Gradient {
    let n = context.len() as f64;
    let mut h = vec![0.0; pair.dim];
    for &c in context {
        for (x, v) in h.iter_mut().zip(pair.input_vector(c)) {
            *x += v;
        }
    }
    h.iter_mut().for_each(|x| *x /= n);
    let (loss, d_h, output) = loss_and_gradient(pair, &h, target, negatives);
    let mut input: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for &c in context {
        let g = input.entry(c).or_insert_with(|| vec![0.0; pair.dim]);
        for (gv, d) in g.iter_mut().zip(&d_h) {
            *gv += d / n;
        }
    }
    Gradient { loss, input, output }
}

pub fn sgns_loss(pair: &EmbeddingPair, target: u32, context: u32, negatives: &[u32]) -> f64 {
    sgns_gradient(pair, target, context, negatives).loss
}

pub fn cbow_loss(pair: &EmbeddingPair, context: &[u32], target: u32, negatives: &[u32]) -> f64 {
    cbow_gradient(pair, context, target, negatives).loss
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingStats {
    /// Mean loss per update in each epoch.
    pub epoch_losses: Vec<f64>,
    pub updates: Vec<u64>,
}

struct Worker<'a> {
    cfg: &'a NeuralConfig,
    table: &'a UnigramTable,
    keep_prob: Option<&'a [f64]>,
    total_positions: f64,
    progress: &'a AtomicUsize,
    rng: ChaCha8Rng,
    scratch: Scratch,
    negatives: Vec<u32>,
    context: Vec<u32>,
    kept: Vec<u32>,
    loss_sum: f64,
    updates: u64,
}

impl Worker<'_> {
    fn lr(&self) -> f64 {
        let done = self.progress.load(Ordering::Relaxed) as f64;
        let frac = (done / self.total_positions).min(1.0);
        (self.cfg.lr_start - (self.cfg.lr_start - self.cfg.lr_end) * frac).max(self.cfg.lr_end)
    }

    fn draw_negatives(&mut self, avoid: u32, vocab_size: usize) {
        self.negatives.clear();
        for _ in 0..self.cfg.negatives {
            let mut n = self.table.sample(&mut self.rng);
            while n == avoid && vocab_size > 1 {
                n = self.table.sample(&mut self.rng);
            }
            self.negatives.push(n);
        }
    }

    fn run<S: RowStore>(
        &mut self,
        store: &mut S,
        segments: &[&[u32]],
        epoch: usize,
        vocab_size: usize,
    ) -> Result<()> {
        let c = self.cfg.window as isize;
        for seg in segments {
            self.kept.clear();
            match self.keep_prob {
                Some(p) => {
                    for &t in seg.iter() {
                        if self.rng.random::<f64>() < p[t as usize] {
                            self.kept.push(t);
                        }
                    }
                }
                None => self.kept.extend_from_slice(seg),
            }
            let kept = std::mem::take(&mut self.kept);
            for (i, &focus) in kept.iter().enumerate() {
                let lr = self.lr();
                let lo = (i as isize - c).max(0) as usize;
                let hi = (i + c as usize).min(kept.len() - 1);
                match self.cfg.mode {
                    Mode::Sgns => {
                        for k in lo..=hi {
                            if k == i {
                                continue;
                            }
                            let ctx = kept[k];
                            self.draw_negatives(ctx, vocab_size);
                            let loss = sgns_update(store, focus, ctx, &self.negatives, lr, &mut self.scratch);
                            self.loss_sum += check_loss(loss, epoch, i)?;
                            self.updates += 1;
                        }
                    }
                    Mode::Cbow => {
                        self.context.clear();
                        self.context
                            .extend((lo..=hi).filter(|&k| k != i).map(|k| kept[k]));
                        if !self.context.is_empty() {
                            self.draw_negatives(focus, vocab_size);
                            let loss = cbow_update(
                                store,
                                &self.context,
                                focus,
                                &self.negatives,
                                lr,
                                &mut self.scratch,
                            );
                            self.loss_sum += check_loss(loss, epoch, i)?;
                            self.updates += 1;
                        }
                    }
                }
            }
            self.progress.fetch_add(seg.len(), Ordering::Relaxed);
            self.kept = kept;
        }
        Ok(())
    }
}

fn keep_probabilities(vocab: &Vocabulary, threshold: f64) -> Vec<f64> {
    let total = vocab.total_tokens().max(1) as f64;
    vocab
        .freqs()
        .iter()
        .map(|&f| {
            let rel = f as f64 / total;
            ((threshold / rel).sqrt()).min(1.0)
        })
        .collect()
}

/// Trains input/output vectors over `cfg.epochs` passes with a linearly
/// decaying learning rate.
pub fn train_pair(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    cfg: &NeuralConfig,
) -> Result<(EmbeddingPair, TrainingStats)> {
    cfg.validate()?;
    slice.check_ids(vocab.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pair = EmbeddingPair::init(vocab.len(), cfg.dim, &mut rng);
    let mut stats = TrainingStats::default();
    if cfg.epochs == 0 || vocab.is_empty() {
        return Ok((pair, stats));
    }
    let table = build_unigram_table(vocab, cfg.unigram_power)?;
    let keep = cfg.subsample.map(|t| keep_probabilities(vocab, t));
    let window = WindowConfig::new(cfg.window)?;
    let segments = slice.segments(window.cross_document);
    let progress = AtomicUsize::new(0);
    let total_positions = (cfg.epochs * slice.len()).max(1) as f64;
    let threads = cfg.threads.max(1).min(segments.len().max(1));
    let worker = |seed: u64| Worker {
        cfg,
        table: &table,
        keep_prob: keep.as_deref(),
        total_positions,
        progress: &progress,
        rng: ChaCha8Rng::seed_from_u64(seed),
        scratch: Scratch::new(cfg.dim),
        negatives: Vec::with_capacity(cfg.negatives),
        context: Vec::with_capacity(2 * cfg.window),
        kept: Vec::new(),
        loss_sum: 0.0,
        updates: 0,
    };

    if threads == 1 {
        let mut w = worker(rng.random());
        for epoch in 0..cfg.epochs {
            w.loss_sum = 0.0;
            w.updates = 0;
            w.run(&mut pair, &segments, epoch, vocab.len())?;
            record_epoch(&mut stats, epoch, w.loss_sum, w.updates, w.lr());
        }
        return Ok((pair, stats));
    }

    let shared = SharedTables::from_pair(&pair);
    let chunk = segments.len().div_ceil(threads);
    let mut workers: Vec<Worker> = (0..threads).map(|_| worker(rng.random())).collect();
    for epoch in 0..cfg.epochs {
        let results: Vec<Result<()>> = std::thread::scope(|s| {
            let handles: Vec<_> = workers
                .iter_mut()
                .zip(segments.chunks(chunk))
                .map(|(w, part)| {
                    let shared = &shared;
                    s.spawn(move || {
                        w.loss_sum = 0.0;
                        w.updates = 0;
                        w.run(&mut SharedView(shared), part, epoch, vocab.len())
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        results.into_iter().collect::<Result<Vec<()>>>()?;
        let loss: f64 = workers.iter().map(|w| w.loss_sum).sum();
        let updates: u64 = workers.iter().map(|w| w.updates).sum();
        record_epoch(&mut stats, epoch, loss, updates, workers[0].lr());
    }
    Ok((shared.into_pair(), stats))
}

fn record_epoch(stats: &mut TrainingStats, epoch: usize, loss_sum: f64, updates: u64, lr: f64) {
    let mean = if updates > 0 { loss_sum / updates as f64 } else { 0.0 };
    log::info!("epoch {} loss {} lr {}", epoch + 1, mean, lr);
    stats.epoch_losses.push(mean);
    stats.updates.push(updates);
}

/// Trains and returns the input vectors as the embedding.
pub fn train(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    cfg: &NeuralConfig,
) -> Result<(EmbeddingMatrix, TrainingStats)> {
    let (pair, stats) = train_pair(slice, vocab, cfg)?;
    let name = match cfg.mode {
        Mode::Sgns => "sgns",
        Mode::Cbow => "cbow",
    };
    Ok((
        EmbeddingMatrix::new(name, vocab.words().to_vec(), cfg.dim, pair.input)?,
        stats,
    ))
}
