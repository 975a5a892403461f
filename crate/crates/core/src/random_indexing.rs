//! Random indexing: online accumulation of permuted, frequency-weighted
//! sparse ternary index vectors of context words.
//!
//! Conventions fixed here (single-threaded training is bit-reproducible):
//!
//! * At each position the focus token is counted first (its running
//!   frequency, and the running vocabulary size if it is new), then its
//!   contexts are added in offset order `-c..=-1, 1..=c`.
//! * The weight of a context word uses its running frequency at that moment,
//!   `exp(-lambda * f(b) / V)`; a word not yet seen as a focus has `f(b) = 0`.
//! * Offset `j` rotates the index vector by `j` positions, positive offsets
//!   to the right (position `p` moves to `(p + j) mod dim`).

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::cooccurrence::WindowConfig;
use crate::corpus::{CorpusSlice, Vocabulary};
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};

/// Sparse ternary vector: `+1` at `plus`, `-1` at `minus`, zero elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexVector {
    pub dim: usize,
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

impl IndexVector {
    pub fn nnz(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &p in &self.plus {
            v[p as usize] = 1.0;
        }
        for &p in &self.minus {
            v[p as usize] = -1.0;
        }
        v
    }
}

/// Deterministic index vector keyed by `(seed, word)`.
pub fn make_index_vector(word: &str, seed: u64, dim: usize, nnz: usize) -> Result<IndexVector> {
    if nnz % 2 != 0 {
        return Err(Error::param(format!("index vector nnz {} must be even", nnz)));
    }
    if nnz > dim {
        return Err(Error::param(format!(
            "index vector nnz {} exceeds dimension {}",
            nnz, dim
        )));
    }
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(word.as_bytes());
    let key: [u8; 32] = hasher.finalize().into();
    let mut rng = ChaCha8Rng::from_seed(key);
    let positions = sample(&mut rng, dim, nnz).into_vec();
    let mut plus: Vec<u32> = positions[..nnz / 2].iter().map(|&p| p as u32).collect();
    let mut minus: Vec<u32> = positions[nnz / 2..].iter().map(|&p| p as u32).collect();
    plus.sort_unstable();
    minus.sort_unstable();
    Ok(IndexVector { dim, plus, minus })
}

/// Rotates every position by `j` (modulo the dimension).
pub fn permute(v: &IndexVector, j: isize) -> IndexVector {
    let dim = v.dim as isize;
    let rot = |ps: &[u32]| {
        let mut out: Vec<u32> = ps
            .iter()
            .map(|&p| (p as isize + j).rem_euclid(dim) as u32)
            .collect();
        out.sort_unstable();
        out
    };
    IndexVector {
        dim: v.dim,
        plus: rot(&v.plus),
        minus: rot(&v.minus),
    }
}

/// `exp(-lambda * f_b / V)`.
pub fn context_weight(f_b: u64, vocab_size: u64, lambda: f64) -> Result<f64> {
    if vocab_size == 0 {
        return Err(Error::Degenerate(
            "context weight with an empty running vocabulary".into(),
        ));
    }
    Ok((-lambda * f_b as f64 / vocab_size as f64).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiConfig {
    pub dim: usize,
    pub nnz: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for RiConfig {
    fn default() -> Self {
        RiConfig {
            dim: 2000,
            nnz: 10,
            lambda: 60.0,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiModel {
    pub config: RiConfig,
    /// Row-major accumulators, one per vocabulary id.
    pub vectors: Vec<f64>,
    pub seen_freq: Vec<u64>,
    pub current_vocab_size: u64,
}

impl RiModel {
    fn new(config: RiConfig, vocab_size: usize) -> Self {
        RiModel {
            config,
            vectors: vec![0.0; vocab_size * config.dim],
            seen_freq: vec![0; vocab_size],
            current_vocab_size: 0,
        }
    }

    pub fn vector(&self, id: usize) -> &[f64] {
        &self.vectors[id * self.config.dim..(id + 1) * self.config.dim]
    }

    pub fn to_embedding(&self, vocab: &Vocabulary) -> Result<EmbeddingMatrix> {
        EmbeddingMatrix::new("ri", vocab.words().to_vec(), self.config.dim, self.vectors.clone())
    }

    /// One-line sidecar recording the index-vector generator state.
    pub fn write_manifest<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "ri seed={} dim={} nnz={} lambda={}",
            self.config.seed, self.config.dim, self.config.nnz, self.config.lambda
        )?;
        Ok(())
    }

    pub fn parse_manifest(line: &str) -> Result<RiConfig> {
        let mut cfg = RiConfig::default();
        let mut fields = line.split_whitespace();
        if fields.next() != Some("ri") {
            return Err(Error::format("ri manifest", 1, "expected leading `ri`"));
        }
        for field in fields {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::format("ri manifest", 1, "expected key=value"))?;
            let bad = || Error::format("ri manifest", 1, format!("bad value for {k}"));
            match k {
                "seed" => cfg.seed = v.parse().map_err(|_| bad())?,
                "dim" => cfg.dim = v.parse().map_err(|_| bad())?,
                "nnz" => cfg.nnz = v.parse().map_err(|_| bad())?,
                "lambda" => cfg.lambda = v.parse().map_err(|_| bad())?,
                _ => return Err(Error::format("ri manifest", 1, format!("unknown key {k}"))),
            }
        }
        Ok(cfg)
    }
}

struct IndexCache<'a> {
    vocab: &'a Vocabulary,
    cfg: RiConfig,
    vectors: Vec<Option<IndexVector>>,
}

impl<'a> IndexCache<'a> {
    fn get(&mut self, id: u32) -> Result<&IndexVector> {
        let slot = &mut self.vectors[id as usize];
        if slot.is_none() {
            *slot = Some(make_index_vector(
                self.vocab.word(id),
                self.cfg.seed,
                self.cfg.dim,
                self.cfg.nnz,
            )?);
        }
        Ok(slot.as_ref().unwrap())
    }
}

fn train_segments(
    segments: &[&[u32]],
    vocab: &Vocabulary,
    window: &WindowConfig,
    cfg: RiConfig,
) -> Result<RiModel> {
    let mut model = RiModel::new(cfg, vocab.len());
    let mut index = IndexCache {
        vocab,
        cfg,
        vectors: vec![None; vocab.len()],
    };
    let dim = cfg.dim as isize;
    for seg in segments {
        for (i, &focus) in seg.iter().enumerate() {
            let fi = focus as usize;
            if model.seen_freq[fi] == 0 {
                model.current_vocab_size += 1;
            }
            model.seen_freq[fi] += 1;
            for j in window.offsets() {
                let pos = i as isize + j;
                if pos < 0 || pos >= seg.len() as isize {
                    continue;
                }
                let ctx = seg[pos as usize];
                let w = context_weight(
                    model.seen_freq[ctx as usize],
                    model.current_vocab_size,
                    cfg.lambda,
                )?;
                let r = index.get(ctx)?;
                let acc = &mut model.vectors[fi * cfg.dim..(fi + 1) * cfg.dim];
                for &p in &r.plus {
                    acc[(p as isize + j).rem_euclid(dim) as usize] += w;
                }
                for &p in &r.minus {
                    acc[(p as isize + j).rem_euclid(dim) as usize] -= w;
                }
            }
        }
    }
    Ok(model)
}

fn check(window: &WindowConfig, cfg: &RiConfig) -> Result<()> {
    if window.half_width < 1 {
        return Err(Error::param("window half-width must be at least 1"));
    }
    if cfg.dim < 1 {
        return Err(Error::param("RI dimension must be at least 1"));
    }
    if cfg.nnz % 2 != 0 || cfg.nnz > cfg.dim {
        return Err(Error::param("RI nnz must be even and at most the dimension"));
    }
    Ok(())
}

/// Single sequential pass over the slice.
pub fn ri_train(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    window: &WindowConfig,
    cfg: &RiConfig,
) -> Result<RiModel> {
    check(window, cfg)?;
    slice.check_ids(vocab.len())?;
    train_segments(&slice.segments(window.cross_document), vocab, window, *cfg)
}

/// Trains document shards independently on `shards` threads and sums the
/// accumulators. Each shard starts from empty running frequencies, so the
/// weights differ from [`ri_train`]; this is an approximation.
pub fn ri_train_sharded(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    window: &WindowConfig,
    cfg: &RiConfig,
    shards: usize,
) -> Result<RiModel> {
    check(window, cfg)?;
    slice.check_ids(vocab.len())?;
    let segments = slice.segments(window.cross_document);
    if shards <= 1 || segments.len() < 2 {
        return train_segments(&segments, vocab, window, *cfg);
    }
    let chunk = segments.len().div_ceil(shards);
    let parts: Vec<Result<RiModel>> = std::thread::scope(|s| {
        let handles: Vec<_> = segments
            .chunks(chunk)
            .map(|part| s.spawn(move || train_segments(part, vocab, window, *cfg)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut model = RiModel::new(*cfg, vocab.len());
    for part in parts {
        let part = part?;
        for (a, b) in model.vectors.iter_mut().zip(&part.vectors) {
            *a += b;
        }
        for (a, b) in model.seen_freq.iter_mut().zip(&part.seen_freq) {
            *a += b;
        }
    }
    model.current_vocab_size = model.seen_freq.iter().filter(|&&f| f > 0).count() as u64;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocabulary;

    #[test]
    fn index_vectors_are_deterministic_and_balanced() {
        let a = make_index_vector("word", 7, 2000, 10).unwrap();
        let b = make_index_vector("word", 7, 2000, 10).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.plus.len(), 5);
        assert_eq!(a.minus.len(), 5);
        assert!(a.plus.iter().all(|p| !a.minus.contains(p)));
        assert_ne!(a, make_index_vector("word", 8, 2000, 10).unwrap());
        assert!(make_index_vector("w", 1, 10, 3).is_err());
        assert!(make_index_vector("w", 1, 4, 6).is_err());
    }

    #[test]
    fn permute_wraps_and_inverts() {
        let v = IndexVector {
            dim: 4,
            plus: vec![3],
            minus: vec![1],
        };
        let r = permute(&v, 1);
        assert_eq!(r.plus, [0]);
        assert_eq!(r.minus, [2]);
        assert_eq!(permute(&v, 0), v);
        assert_eq!(permute(&permute(&v, -7), 7), v);
    }

    #[test]
    fn weights() {
        assert_eq!(context_weight(0, 5, 60.0).unwrap(), 1.0);
        assert_eq!(context_weight(9, 5, 0.0).unwrap(), 1.0);
        let w = context_weight(10, 10, 60.0).unwrap();
        assert!((w - 8.756510762696521e-27).abs() < 1e-38);
        assert!(context_weight(1, 0, 60.0).is_err());
        let mut prev = 2.0;
        for f in 0..20 {
            let w = context_weight(f, 7, 60.0).unwrap();
            assert!(w < prev);
            prev = w;
        }
    }

    #[test]
    fn single_token_has_zero_vector() {
        let vocab = build_vocabulary(["a"], 1).unwrap();
        let slice = CorpusSlice::new(vec![0], vec![]).unwrap();
        let m = ri_train(&slice, &vocab, &WindowConfig::new(2).unwrap(), &RiConfig::default()).unwrap();
        assert!(m.vector(0).iter().all(|&v| v == 0.0));
        assert_eq!(m.current_vocab_size, 1);
    }

    #[test]
    fn two_token_unrolling() {
        let vocab = build_vocabulary(["a", "b"], 1).unwrap();
        let (a, b) = (vocab.id("a").unwrap(), vocab.id("b").unwrap());
        let slice = CorpusSlice::new(vec![a, b], vec![]).unwrap();
        let cfg = RiConfig {
            dim: 50,
            nnz: 4,
            lambda: 60.0,
            seed: 3,
        };
        let m = ri_train(&slice, &vocab, &WindowConfig::new(1).unwrap(), &cfg).unwrap();
        // at position 0: f(a)=1, V=1, f(b)=0 -> w(b)=1
        let rb = permute(&make_index_vector("b", 3, 50, 4).unwrap(), 1).to_dense();
        assert_eq!(m.vector(a as usize), &rb[..]);
        // at position 1: f(b)=1, V=2, f(a)=1 -> w(a)=exp(-30)
        let wa = (-30.0f64).exp();
        let ra = permute(&make_index_vector("a", 3, 50, 4).unwrap(), -1).to_dense();
        let expect: Vec<f64> = ra.iter().map(|x| x * wa).collect();
        assert_eq!(m.vector(b as usize), &expect[..]);
        assert_eq!(m.current_vocab_size, 2);
    }

    #[test]
    fn manifest_round_trip() {
        let vocab = build_vocabulary(["a"], 1).unwrap();
        let slice = CorpusSlice::new(vec![0], vec![]).unwrap();
        let cfg = RiConfig {
            dim: 16,
            nnz: 2,
            lambda: 12.5,
            seed: 99,
        };
        let m = ri_train(&slice, &vocab, &WindowConfig::default(), &cfg).unwrap();
        let mut buf = Vec::new();
        m.write_manifest(&mut buf).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert_eq!(line, "ri seed=99 dim=16 nnz=2 lambda=12.5\n");
        assert_eq!(RiModel::parse_manifest(line.trim()).unwrap(), cfg);
    }
}
