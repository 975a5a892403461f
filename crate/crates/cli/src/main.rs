use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dsmkit::cooccurrence::{count_cooccurrences_sharded, prune_contexts, CoocMatrix, WindowConfig};
use dsmkit::corpus::{open_text, Corpus, CorpusSlice, Token, Tokenizer, TokenizerConfig, Vocabulary};
use dsmkit::embedding::EmbeddingMatrix;
use dsmkit::evaluation::{
    class_table, evaluate_suite, overall_table, partition_tests, records, Benchmark, BenchmarkKind, EvalReport,
    SparseVectors,
};
use dsmkit::factorization::{isvd_embed, svd_with, tsvd_embed, SvdConfig};
use dsmkit::neural::{self, Mode, NeuralConfig};
use dsmkit::pipeline::{load_benchmarks, run_experiment, BenchmarkSpec, ExperimentConfig};
use dsmkit::random_indexing::{ri_train, RiConfig};
use dsmkit::synthetic::{generate, SynthConfig};
use dsmkit::weighting::{apply_co, apply_ppmi, apply_smoothed_ppmi, WeightedMatrix};
use dsmkit::{Error, Result};

#[derive(Parser)]
#[command(name = "dsmkit", version, about = "Build and evaluate distributional word vectors")]
struct Cli {
    /// Experiment configuration (TOML); built-in defaults otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 1 gives bit-identical results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file or directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Writes the corpus as normalized tokens, one document per line.
    Tokenize {
        input: PathBuf,
        #[arg(long)]
        keep_case: bool,
    },
    /// Takes the first N tokens; writes `vocab.txt` and `slice.tokens`.
    Slice {
        input: PathBuf,
        #[arg(long)]
        tokens: usize,
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        #[arg(long)]
        keep_case: bool,
    },
    /// Counts windowed co-occurrences of a slice.
    Cooc {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, default_value_t = 2)]
        window: usize,
        #[arg(long)]
        cross_document: bool,
        /// Keep only this many most frequent context columns.
        #[arg(long)]
        prune: Option<usize>,
    },
    /// Weights a co-occurrence matrix.
    Weight {
        #[arg(long)]
        cooc: PathBuf,
        #[arg(long, value_enum, default_value_t = SchemeArg::Ppmi)]
        scheme: SchemeArg,
        /// Context smoothing exponent for `sppmi`.
        #[arg(long, default_value_t = 0.75)]
        alpha: f64,
    },
    /// Randomized SVD of a weighted matrix; writes `svd.bin`, `tsvd.vec`, `isvd.vec`.
    Factorize {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value_t = 3000)]
        rank: usize,
        #[arg(long, default_value_t = 10)]
        oversample: usize,
        #[arg(long, default_value_t = 4)]
        power_iters: usize,
        #[arg(long, default_value_t = 200)]
        tsvd_dim: usize,
        #[arg(long, default_value_t = 200)]
        isvd_remove: usize,
        #[arg(long, default_value_t = 3000)]
        isvd_keep_through: usize,
    },
    /// Random indexing over a slice.
    Ri {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, default_value_t = 2)]
        window: usize,
        #[arg(long, default_value_t = 2000)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        nnz: usize,
        #[arg(long, default_value_t = 60.0)]
        lambda: f64,
    },
    /// Trains skip-gram or CBOW vectors with negative sampling.
    Train {
        #[command(flatten)]
        slice: SliceArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Sgns)]
        mode: ModeArg,
        #[arg(long, default_value_t = 200)]
        dim: usize,
        #[arg(long, default_value_t = 2)]
        window: usize,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 5)]
        epochs: usize,
        #[arg(long, default_value_t = 0.025)]
        lr: f64,
        /// Frequent-word subsampling threshold.
        #[arg(long)]
        subsample: Option<f64>,
    },
    /// Scores vectors (or weighted rows) on benchmarks, overall and per class.
    Eval {
        /// Word vector file.
        #[arg(long, conflicts_with = "weights")]
        vectors: Option<PathBuf>,
        /// Weighted matrix evaluated row-wise; needs `--vocab`.
        #[arg(long, requires = "vocab")]
        weights: Option<PathBuf>,
        #[arg(long)]
        vocab: Option<PathBuf>,
        /// Frequencies for the class split (a vocabulary file).
        #[arg(long)]
        freqs: Option<PathBuf>,
        /// `NAME:choice|rating:PATH`; repeatable. Defaults to the configured suite.
        #[arg(long = "benchmark")]
        benchmarks: Vec<String>,
        /// Model name shown in the report.
        #[arg(long, default_value = "model")]
        name: String,
    },
    /// Splits benchmark items into frequency classes.
    Freqsplit {
        /// Vocabulary file holding corpus frequencies.
        #[arg(long)]
        freqs: PathBuf,
        #[arg(long = "benchmark")]
        benchmarks: Vec<String>,
    },
    /// Runs the full experiment described by the configuration.
    Run,
    /// Prints the effective configuration, defaults included.
    PrintConfig,
    /// Generates the synthetic corpus and benchmark suite.
    Synth {
        /// Corpus length in tokens (default 10,000,000).
        #[arg(long)]
        tokens: Option<usize>,
    },
}

#[derive(Args)]
struct SliceArgs {
    /// Vocabulary file written by `slice`.
    #[arg(long)]
    vocab: PathBuf,
    /// Token file written by `slice`.
    #[arg(long)]
    slice: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Co,
    Ppmi,
    Sppmi,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sgns,
    Cbow,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| data_file(path, e))
}

/// A missing input is a configuration problem; other I/O failures are data errors.
fn data_file(path: &Path, e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::NotFound {
        Error::Config(format!("{}: {}", path.display(), e))
    } else {
        Error::File {
            path: path.to_path_buf(),
            source: e,
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn out_file(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn load_slice(a: &SliceArgs) -> Result<(Vocabulary, CorpusSlice)> {
    let vocab = Vocabulary::read(open(&a.vocab)?)?;
    let slice = CorpusSlice::read_binary(open(&a.slice)?)?;
    slice.check_ids(vocab.len())?;
    Ok((vocab, slice))
}

fn config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            if !p.is_file() {
                return Err(Error::Config(format!("configuration {} not found", p.display())));
            }
            ExperimentConfig::load(p)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn parse_benchmark(spec: &str) -> Result<BenchmarkSpec> {
    let mut parts = spec.splitn(3, ':');
    let (Some(name), Some(kind), Some(path)) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Config(format!("benchmark `{}` is not NAME:KIND:PATH", spec)));
    };
    let kind = match kind {
        "choice" => BenchmarkKind::Choice,
        "rating" => BenchmarkKind::Rating,
        k => return Err(Error::Config(format!("benchmark kind `{}` is not choice or rating", k))),
    };
    Ok(BenchmarkSpec {
        name: name.to_string(),
        kind,
        path: PathBuf::from(path),
    })
}

fn suite(cli: &Cli, specs: &[String]) -> Result<Vec<Benchmark>> {
    let mut cfg = config(cli)?;
    if !specs.is_empty() {
        cfg.benchmarks = specs.iter().map(|s| parse_benchmark(s)).collect::<Result<_>>()?;
    }
    load_benchmarks(&cfg)
}

fn write_report(reports: &[EvalReport]) -> Result<()> {
    let mut out = io::stdout().lock();
    write!(out, "{}\n{}\n{}", overall_table(reports), class_table(reports), records(reports))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let threads = cli.threads.unwrap_or(1).max(1);
    let seed = cli.seed.unwrap_or(1);
    match &cli.command {
        Command::Tokenize { input, keep_case } => {
            let tok = TokenizerConfig { lowercase: !keep_case };
            let mut w: Box<dyn Write> = match &cli.out {
                Some(p) => Box::new(create(p)?),
                None => Box::new(BufWriter::new(io::stdout().lock())),
            };
            if !input.is_file() {
                return Err(Error::Config(format!("corpus {} not found", input.display())));
            }
            let mut first = true;
            for t in Tokenizer::new(open_text(input)?, tok) {
                match t? {
                    Token::Word(word) => {
                        if !first {
                            w.write_all(b" ")?;
                        }
                        w.write_all(word.as_bytes())?;
                        first = false;
                    }
                    Token::DocBreak => {
                        w.write_all(b"\n")?;
                        first = true;
                    }
                }
            }
            if !first {
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
        Command::Slice {
            input,
            tokens,
            min_count,
            keep_case,
        } => {
            if !input.is_file() {
                return Err(Error::Config(format!("corpus {} not found", input.display())));
            }
            let tok = TokenizerConfig { lowercase: !keep_case };
            let corpus = Corpus::read_limit(open_text(input)?, &tok, *tokens)?;
            let (vocab, slice) = corpus.slice_with_vocab(*tokens, *min_count)?;
            if slice.truncated {
                log::warn!("corpus holds only {} tokens", slice.len());
            }
            let dir = out_file(cli, ".");
            vocab.write(create(&dir.join("vocab.txt"))?)?;
            slice.write_binary(create(&dir.join("slice.tokens"))?)?;
            eprintln!("{} tokens, {} types", slice.len(), vocab.len());
        }
        Command::Cooc {
            slice,
            window,
            cross_document,
            prune,
        } => {
            let (vocab, s) = load_slice(slice)?;
            let mut w = WindowConfig::new(*window)?;
            w.cross_document = *cross_document;
            let mut m = count_cooccurrences_sharded(&s, &vocab, &w, threads)?;
            if let Some(k) = prune {
                m = prune_contexts(&m, *k)?;
            }
            m.write(create(&out_file(cli, "cooc.txt"))?)?;
        }
        Command::Weight { cooc, scheme, alpha } => {
            let m = CoocMatrix::read(open(cooc)?)?;
            let w = match scheme {
                SchemeArg::Co => apply_co(&m),
                SchemeArg::Ppmi => apply_ppmi(&m)?,
                SchemeArg::Sppmi => apply_smoothed_ppmi(&m, *alpha)?,
            };
            w.write(create(&out_file(cli, "weights.txt"))?)?;
        }
        Command::Factorize {
            weights,
            vocab,
            rank,
            oversample,
            power_iters,
            tsvd_dim,
            isvd_remove,
            isvd_keep_through,
        } => {
            let m = WeightedMatrix::read(open(weights)?)?;
            let vocab = Vocabulary::read(open(vocab)?)?;
            if vocab.len() != m.rows() {
                return Err(Error::Integrity(format!(
                    "vocabulary of {} words for a matrix of {} rows",
                    vocab.len(),
                    m.rows()
                )));
            }
            let k = (*rank).min(m.rows()).min(m.cols());
            if k < *rank {
                log::warn!("rank clamped to {} by the matrix shape", k);
            }
            let f = svd_with(
                &m,
                &SvdConfig {
                    rank: k,
                    oversample: *oversample,
                    power_iters: *power_iters,
                    seed,
                    threads,
                },
            )?;
            let dir = out_file(cli, ".");
            f.write(create(&dir.join("svd.bin"))?)?;
            let hi = (*isvd_keep_through).min(k);
            tsvd_embed(&f, (*tsvd_dim).min(k), vocab.words())?.write(create(&dir.join("tsvd.vec"))?)?;
            isvd_embed(&f, *isvd_remove, hi, vocab.words())?.write(create(&dir.join("isvd.vec"))?)?;
        }
        Command::Ri {
            slice,
            window,
            dim,
            nnz,
            lambda,
        } => {
            let (vocab, s) = load_slice(slice)?;
            let cfg = RiConfig {
                dim: *dim,
                nnz: *nnz,
                lambda: *lambda,
                seed,
            };
            let model = ri_train(&s, &vocab, &WindowConfig::new(*window)?, &cfg)?;
            let path = out_file(cli, "ri.vec");
            model.to_embedding(&vocab)?.write(create(&path)?)?;
            model.write_manifest(create(&path.with_extension("manifest"))?)?;
        }
        Command::Train {
            slice,
            mode,
            dim,
            window,
            negatives,
            epochs,
            lr,
            subsample,
        } => {
            let (vocab, s) = load_slice(slice)?;
            let mut cfg = NeuralConfig::new(match mode {
                ModeArg::Sgns => Mode::Sgns,
                ModeArg::Cbow => Mode::Cbow,
            });
            cfg.dim = *dim;
            cfg.window = *window;
            cfg.negatives = *negatives;
            cfg.epochs = *epochs;
            cfg.lr_start = *lr;
            cfg.subsample = *subsample;
            cfg.seed = seed;
            cfg.threads = threads;
            let (emb, stats) = neural::train(&s, &vocab, &cfg)?;
            emb.write(create(&out_file(cli, "vectors.vec"))?)?;
            for (e, loss) in stats.epoch_losses.iter().enumerate() {
                eprintln!("epoch {} mean loss {:.6}", e + 1, loss);
            }
        }
        Command::Eval {
            vectors,
            weights,
            vocab,
            freqs,
            benchmarks,
            name,
        } => {
            let suite = suite(cli, benchmarks)?;
            let partition = match freqs {
                Some(p) => Some(partition_tests(&suite, &Vocabulary::read(open(p)?)?)?),
                None => None,
            };
            let report = match (vectors, weights) {
                (Some(v), _) => {
                    let emb = EmbeddingMatrix::read(open(v)?, name.clone())?;
                    evaluate_suite(&emb, &suite, partition.as_ref())
                }
                (None, Some(w)) => {
                    let vocab = Vocabulary::read(open(vocab.as_ref().expect("required by clap"))?)?;
                    let space = SparseVectors::new(name.clone(), WeightedMatrix::read(open(w)?)?, &vocab)?;
                    evaluate_suite(&space, &suite, partition.as_ref())
                }
                (None, None) => return Err(Error::Config("eval needs --vectors or --weights".into())),
            };
            write_report(&[report])?;
        }
        Command::Freqsplit { freqs, benchmarks } => {
            let suite = suite(cli, benchmarks)?;
            let p = partition_tests(&suite, &Vocabulary::read(open(freqs)?)?)?;
            print!("{}", p.summary());
        }
        Command::Run => {
            let cfg = config(cli)?;
            let outcome = run_experiment(&cfg)?;
            let m = &outcome.manifest;
            print!("{}", std::fs::read_to_string(cfg.out.join("report.txt"))?);
            eprintln!(
                "{} stages, {} cache hits, {:.1}s; manifest at {}",
                m.stages.len(),
                m.cache_hits(),
                m.seconds,
                cfg.out.join("manifest.json").display()
            );
        }
        Command::PrintConfig => {
            print!("{}", config(cli)?.to_toml());
        }
        Command::Synth { tokens } => {
            let mut cfg = SynthConfig {
                seed,
                ..SynthConfig::default()
            };
            if let Some(t) = tokens {
                cfg.tokens = *t;
            }
            let out = generate(&cfg, &out_file(cli, "synthetic"))?;
            eprintln!("{} tokens written to {}", out.tokens, out.corpus.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn })
        .parse_default_env()
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
