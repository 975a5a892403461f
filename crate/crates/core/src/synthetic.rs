//! Deterministic synthetic corpus with matching benchmark suites.
//!
//! Content words sit in a three-level hierarchy: superclusters contain
//! clusters, clusters contain subclusters of near-synonyms. Each cluster also
//! has a partner cluster in another supercluster whose words co-occur with it
//! without being similar. Every sentence picks one subcluster and draws its
//! content words mostly from that subcluster, less often from the rest of the
//! cluster, the partner, a sibling cluster, or anywhere. Frequent function
//! words with no topical preference fill the gaps. Word frequencies follow a
//! Zipf law over a random ranking, so every cluster has frequent and rare
//! members.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{Benchmark, BenchmarkKind, MultipleChoiceItem, RatingPair};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub tokens: usize,
    pub superclusters: usize,
    pub clusters_per_super: usize,
    pub subclusters: usize,
    pub subcluster_size: usize,
    pub function_words: usize,
    pub zipf_exponent: f64,
    pub sentences_per_document: usize,
    pub seed: u64,
    pub toefl_items: usize,
    pub esl_items: usize,
    pub sl_pairs: usize,
    pub men_pairs: usize,
    pub rw_pairs: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            tokens: 10_000_000,
            superclusters: 25,
            clusters_per_super: 10,
            subclusters: 4,
            subcluster_size: 6,
            function_words: 60,
            zipf_exponent: 1.0,
            sentences_per_document: 20,
            seed: 1,
            toefl_items: 80,
            esl_items: 50,
            sl_pairs: 999,
            men_pairs: 3000,
            rw_pairs: 2034,
        }
    }
}

/// Where a content word is drawn from, with its probability.
const SOURCES: [(Source, f64); 5] = [
    (Source::Subcluster, 0.45),
    (Source::Cluster, 0.20),
    (Source::Partner, 0.15),
    (Source::Sibling, 0.05),
    (Source::Anywhere, 0.15),
];

#[derive(Clone, Copy)]
enum Source {
    Subcluster,
    Cluster,
    Partner,
    Sibling,
    Anywhere,
}

/// The vocabulary and its latent structure.
pub struct Lexicon {
    pub content: Vec<String>,
    pub function: Vec<String>,
    weights: Vec<f64>,
    function_weights: Vec<f64>,
    subcluster_of: Vec<usize>,
    partner: Vec<usize>,
    cfg: SynthConfig,
}

impl Lexicon {
    pub fn new(cfg: &SynthConfig) -> Result<Self> {
        let clusters = cfg.superclusters * cfg.clusters_per_super;
        if cfg.superclusters < 2 || cfg.clusters_per_super < 2 || cfg.subclusters < 2 || cfg.subcluster_size < 2 {
            return Err(Error::param(
                "need at least two superclusters, clusters per supercluster, subclusters and words per subcluster",
            ));
        }
        if cfg.function_words == 0 || cfg.zipf_exponent <= 0.0 || cfg.sentences_per_document == 0 {
            return Err(Error::param("function words, Zipf exponent and document length must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let n = clusters * cfg.subclusters * cfg.subcluster_size;
        let mut names = word_names(n + cfg.function_words, &mut rng);
        let function: Vec<String> = names.split_off(n);
        let mut ranks: Vec<usize> = (0..n).collect();
        ranks.shuffle(&mut rng);
        let weights = ranks
            .iter()
            .map(|&r| 1.0 / ((r + 1) as f64).powf(cfg.zipf_exponent))
            .collect();
        let function_weights = (0..cfg.function_words).map(|r| 1.0 / (r + 1) as f64).collect();
        let subcluster_of = (0..n).map(|w| w / cfg.subcluster_size).collect();
        // Partners pair cluster i of one supercluster with cluster i of the next.
        let partner = (0..clusters)
            .map(|c| {
                let (s, i) = (c / cfg.clusters_per_super, c % cfg.clusters_per_super);
                ((s + 1) % cfg.superclusters) * cfg.clusters_per_super + i
            })
            .collect();
        Ok(Lexicon {
            content: names,
            function,
            weights,
            function_weights,
            subcluster_of,
            partner,
            cfg: cfg.clone(),
        })
    }

    fn words_per_cluster(&self) -> usize {
        self.cfg.subclusters * self.cfg.subcluster_size
    }

    pub fn subcluster(&self, w: usize) -> usize {
        self.subcluster_of[w]
    }

    pub fn cluster(&self, w: usize) -> usize {
        w / self.words_per_cluster()
    }

    pub fn supercluster(&self, w: usize) -> usize {
        self.cluster(w) / self.cfg.clusters_per_super
    }

    pub fn partners(&self, a: usize, b: usize) -> bool {
        let (ca, cb) = (self.cluster(a), self.cluster(b));
        self.partner[ca] == cb || self.partner[cb] == ca
    }

    /// Zipf weight of a content word; larger is more frequent.
    pub fn weight(&self, w: usize) -> f64 {
        self.weights[w]
    }

    /// Graded similarity on a 1–4 scale: same subcluster, same cluster,
    /// same supercluster, unrelated.
    pub fn similarity_level(&self, a: usize, b: usize) -> f64 {
        if self.subcluster(a) == self.subcluster(b) {
            4.0
        } else if self.cluster(a) == self.cluster(b) {
            3.0
        } else if self.supercluster(a) == self.supercluster(b) {
            2.0
        } else {
            1.0
        }
    }

    /// Like the similarity level, but partner clusters count as related.
    pub fn relatedness_level(&self, a: usize, b: usize) -> f64 {
        let s = self.similarity_level(a, b);
        if s < 3.0 && self.partners(a, b) {
            3.0
        } else {
            s
        }
    }

    fn range(&self, first: usize, len: usize) -> std::ops::Range<usize> {
        first..first + len
    }

    fn subcluster_words(&self, s: usize) -> std::ops::Range<usize> {
        self.range(s * self.cfg.subcluster_size, self.cfg.subcluster_size)
    }

    fn cluster_words(&self, c: usize) -> std::ops::Range<usize> {
        let n = self.words_per_cluster();
        self.range(c * n, n)
    }
}

fn word_names(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    const ONSETS: [&str; 18] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "tr", "kl"];
    const VOWELS: [&str; 6] = ["a", "e", "i", "o", "u", "ai"];
    let mut seen = std::collections::HashSet::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(2..=4);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            w.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
        }
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

struct Sampler {
    clusters: WeightedIndex<f64>,
    per_cluster: Vec<WeightedIndex<f64>>,
    per_subcluster: Vec<WeightedIndex<f64>>,
    subcluster_choice: Vec<WeightedIndex<f64>>,
    anywhere: WeightedIndex<f64>,
    function: WeightedIndex<f64>,
    source: WeightedIndex<f64>,
}

fn weighted(w: impl IntoIterator<Item = f64>) -> WeightedIndex<f64> {
    WeightedIndex::new(w).expect("positive weights")
}

impl Sampler {
    fn new(lex: &Lexicon) -> Self {
        let clusters = lex.cfg.superclusters * lex.cfg.clusters_per_super;
        let subs = clusters * lex.cfg.subclusters;
        let sub_mass: Vec<f64> = (0..subs)
            .map(|s| lex.subcluster_words(s).map(|w| lex.weights[w]).sum())
            .collect();
        Sampler {
            clusters: weighted((0..clusters).map(|c| {
                let k = lex.cfg.subclusters;
                sub_mass[c * k..(c + 1) * k].iter().sum::<f64>()
            })),
            per_cluster: (0..clusters)
                .map(|c| weighted(lex.cluster_words(c).map(|w| lex.weights[w])))
                .collect(),
            per_subcluster: (0..subs)
                .map(|s| weighted(lex.subcluster_words(s).map(|w| lex.weights[w])))
                .collect(),
            subcluster_choice: (0..clusters)
                .map(|c| {
                    let k = lex.cfg.subclusters;
                    weighted(sub_mass[c * k..(c + 1) * k].iter().copied())
                })
                .collect(),
            anywhere: weighted(lex.weights.iter().copied()),
            function: weighted(lex.function_weights.iter().copied()),
            source: weighted(SOURCES.iter().map(|s| s.1)),
        }
    }

    /// Appends one sentence; returns the number of tokens added.
    fn sentence(&self, lex: &Lexicon, rng: &mut ChaCha8Rng, out: &mut String) -> usize {
        let k = lex.cfg.subclusters;
        let wpc = lex.words_per_cluster();
        let c = self.clusters.sample(rng);
        let s = c * k + self.subcluster_choice[c].sample(rng);
        let content = rng.random_range(6..=12);
        let mut tokens = 0;
        let mut push = |w: &str, out: &mut String| {
            if !out.is_empty() && !out.ends_with('\n') {
                out.push(' ');
            }
            out.push_str(w);
            tokens += 1;
        };
        for _ in 0..content {
            let fillers = match rng.random_range(0..20) {
                0..=5 => 0,
                6..=14 => 1,
                _ => 2,
            };
            for _ in 0..fillers {
                push(&lex.function[self.function.sample(rng)], out);
            }
            let w = match SOURCES[self.source.sample(rng)].0 {
                Source::Subcluster => s * lex.cfg.subcluster_size + self.per_subcluster[s].sample(rng),
                Source::Cluster => c * wpc + self.per_cluster[c].sample(rng),
                Source::Partner => {
                    let p = lex.partner[c];
                    p * wpc + self.per_cluster[p].sample(rng)
                }
                Source::Sibling => {
                    let per = lex.cfg.clusters_per_super;
                    let base = (c / per) * per;
                    let mut sib = base + rng.random_range(0..per - 1);
                    if sib >= c {
                        sib += 1;
                    }
                    sib * wpc + self.per_cluster[sib].sample(rng)
                }
                Source::Anywhere => self.anywhere.sample(rng),
            };
            push(&lex.content[w], out);
        }
        out.push('\n');
        tokens
    }
}

/// Writes at least `cfg.tokens` tokens: one sentence per line, documents
/// separated by blank lines. Returns the token count.
pub fn write_corpus<W: Write>(lex: &Lexicon, mut w: W) -> Result<usize> {
    let sampler = Sampler::new(lex);
    let mut rng = ChaCha8Rng::seed_from_u64(lex.cfg.seed ^ 0x636f_7270_7573);
    let mut written = 0;
    let mut buf = String::new();
    while written < lex.cfg.tokens {
        buf.clear();
        for _ in 0..lex.cfg.sentences_per_document {
            written += sampler.sentence(lex, &mut rng, &mut buf);
        }
        buf.push('\n');
        w.write_all(buf.as_bytes())?;
    }
    w.flush()?;
    Ok(written)
}

/// Picks a word whose frequency rank lies in `ranks` (fractions of the
/// vocabulary, most frequent first).
fn pick(by_rank: &[usize], ranks: (f64, f64), rng: &mut ChaCha8Rng) -> usize {
    let n = by_rank.len() as f64;
    let lo = ((ranks.0 * n) as usize).min(by_rank.len() - 1);
    let hi = ((ranks.1 * n) as usize).clamp(lo + 1, by_rank.len());
    by_rank[rng.random_range(lo..hi)]
}

fn pick_in(range: std::ops::Range<usize>, exclude: &[usize], rng: &mut ChaCha8Rng) -> usize {
    loop {
        let w = rng.random_range(range.clone());
        if !exclude.contains(&w) {
            return w;
        }
    }
}

/// Word pairs with graded gold scores, stratified over relation levels.
fn rating_pairs(
    lex: &Lexicon,
    by_rank: &[usize],
    n: usize,
    ranks: (f64, f64),
    relatedness: bool,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RatingPair>> {
    let wpc = lex.words_per_cluster();
    let per = lex.cfg.clusters_per_super;
    let mut pairs = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    while pairs.len() < n {
        let a = pick(by_rank, ranks, rng);
        let c = lex.cluster(a);
        let b = match rng.random_range(0..20) {
            0..=4 => pick_in(lex.subcluster_words(lex.subcluster(a)), &[a], rng),
            5..=9 => pick_in(lex.cluster_words(c), &[a], rng),
            10..=12 => {
                let sup = lex.supercluster(a);
                pick_in(sup * per * wpc..(sup + 1) * per * wpc, &[a], rng)
            }
            13..=15 => pick_in(lex.cluster_words(lex.partner[c]), &[], rng),
            _ => pick_in(0..lex.content.len(), &[a], rng),
        };
        if !seen.insert((a.min(b), a.max(b))) {
            continue;
        }
        let level = if relatedness {
            lex.relatedness_level(a, b)
        } else {
            lex.similarity_level(a, b)
        };
        // Gold on a 0–10 scale with jitter that breaks ties.
        let gold = 2.5 * (level - 1.0) + rng.random_range(0.0..2.5);
        let gold = (gold * 100.0).round() / 100.0;
        pairs.push(RatingPair::new(lex.content[a].clone(), lex.content[b].clone(), gold)?);
    }
    Ok(pairs)
}

/// Synonym questions: the answer shares the target's subcluster; distractors
/// come from other clusters, or from nearby clusters when `hard`.
fn choice_items(lex: &Lexicon, by_rank: &[usize], n: usize, hard: bool, rng: &mut ChaCha8Rng) -> Result<Vec<MultipleChoiceItem>> {
    let wpc = lex.words_per_cluster();
    let per = lex.cfg.clusters_per_super;
    let mut items = Vec::with_capacity(n);
    while items.len() < n {
        let t = pick(by_rank, (0.0, 0.9), rng);
        let answer = pick_in(lex.subcluster_words(lex.subcluster(t)), &[t], rng);
        let mut alts = vec![answer];
        while alts.len() < 4 {
            let d = if hard && alts.len() == 1 {
                let c = lex.cluster(t);
                let sub = lex.subcluster_words(lex.subcluster(t));
                let mut w;
                loop {
                    w = pick_in(lex.cluster_words(c), &[t], rng);
                    if !sub.contains(&w) {
                        break;
                    }
                }
                w
            } else if hard {
                let sup = lex.supercluster(t);
                pick_in(sup * per * wpc..(sup + 1) * per * wpc, &[t], rng)
            } else {
                pick_in(0..lex.content.len(), &[t], rng)
            };
            if lex.subcluster(d) != lex.subcluster(t) && !alts.contains(&d) {
                alts.push(d);
            }
        }
        alts.shuffle(rng);
        let idx = alts.iter().position(|&w| w == answer).expect("answer present");
        let words = alts.iter().map(|&w| lex.content[w].clone()).collect();
        items.push(MultipleChoiceItem::new(lex.content[t].clone(), words, idx)?);
    }
    Ok(items)
}

/// The five test sets: two synonym tests, a similarity test, a relatedness
/// test and a rare-word similarity test.
pub fn benchmarks(lex: &Lexicon) -> Result<Vec<Benchmark>> {
    let cfg = &lex.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x7465_7374);
    let mut by_rank: Vec<usize> = (0..lex.content.len()).collect();
    by_rank.sort_by(|&a, &b| lex.weights[b].total_cmp(&lex.weights[a]));
    Ok(vec![
        Benchmark::choice("TOEFL", choice_items(lex, &by_rank, cfg.toefl_items, false, &mut rng)?),
        Benchmark::choice("ESL", choice_items(lex, &by_rank, cfg.esl_items, true, &mut rng)?),
        Benchmark::rating("SL", rating_pairs(lex, &by_rank, cfg.sl_pairs, (0.0, 0.8), false, &mut rng)?),
        Benchmark::rating("MEN", rating_pairs(lex, &by_rank, cfg.men_pairs, (0.0, 0.5), true, &mut rng)?),
        Benchmark::rating("RW", rating_pairs(lex, &by_rank, cfg.rw_pairs, (0.6, 1.0), false, &mut rng)?),
    ])
}

/// Files written by [`generate`].
#[derive(Clone, Debug)]
pub struct SynthOutput {
    pub corpus: PathBuf,
    pub tokens: usize,
    pub benchmarks: Vec<(String, BenchmarkKind, PathBuf)>,
}

/// Writes `corpus.txt` and one file per benchmark into `dir`.
pub fn generate(cfg: &SynthConfig, dir: &Path) -> Result<SynthOutput> {
    std::fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    let lex = Lexicon::new(cfg)?;
    let corpus = dir.join("corpus.txt");
    let f = File::create(&corpus).map_err(|e| Error::file(&corpus, e))?;
    let tokens = write_corpus(&lex, BufWriter::with_capacity(1 << 20, f))?;
    let mut files = Vec::new();
    for b in benchmarks(&lex)? {
        let path = dir.join(format!("{}.txt", b.name.to_lowercase()));
        let f = File::create(&path).map_err(|e| Error::file(&path, e))?;
        b.write(BufWriter::new(f))?;
        files.push((b.name.clone(), b.kind(), path));
    }
    Ok(SynthOutput {
        corpus,
        tokens,
        benchmarks: files,
    })
}
