//! Corpus streaming: tokenization, vocabulary construction and prefix slicing.
//!
//! Text is lowercased and split on anything that is not alphanumeric. A line
//! containing only whitespace ends the current document; a file without
//! blank lines is a single document.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig { lowercase: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Word(String),
    /// Separates two non-empty documents.
    DocBreak,
}

/// Streaming tokenizer over a buffered byte reader.
pub struct Tokenizer<R> {
    reader: R,
    config: TokenizerConfig,
    line: Vec<u8>,
    offset: u64,
    pending: std::collections::VecDeque<String>,
    words_in_doc: bool,
    break_pending: bool,
    done: bool,
}

impl<R: BufRead> Tokenizer<R> {
    pub fn new(reader: R, config: TokenizerConfig) -> Self {
        Tokenizer {
            reader,
            config,
            line: Vec::new(),
            offset: 0,
            pending: Default::default(),
            words_in_doc: false,
            break_pending: false,
            done: false,
        }
    }

    fn fill(&mut self) -> Result<bool> {
        loop {
            self.line.clear();
            let n = self.reader.read_until(b'\n', &mut self.line)?;
            if n == 0 {
                return Ok(false);
            }
            let line_start = self.offset;
            self.offset += n as u64;
            let text = std::str::from_utf8(&self.line).map_err(|e| Error::Decode {
                offset: line_start + e.valid_up_to() as u64,
            })?;
            if text.trim().is_empty() {
                if self.words_in_doc {
                    self.break_pending = true;
                }
                continue;
            }
            for piece in text.split(|c: char| !c.is_alphanumeric()) {
                if piece.is_empty() {
                    continue;
                }
                let word = if self.config.lowercase {
                    piece.to_lowercase()
                } else {
                    piece.to_string()
                };
                self.pending.push_back(word);
            }
            if !self.pending.is_empty() {
                return Ok(true);
            }
        }
    }
}

impl<R: BufRead> Iterator for Tokenizer<R> {
    type Item = Result<Token>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.pending.is_empty() {
            match self.fill() {
                Ok(true) => {}
                Ok(false) => {
                    self.done = true;
                    return None;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        if self.break_pending {
            self.break_pending = false;
            return Some(Ok(Token::DocBreak));
        }
        let word = self.pending.pop_front()?;
        self.words_in_doc = true;
        Some(Ok(Token::Word(word)))
    }
}

/// Tokenizes an in-memory string.
pub fn tokenize_str(text: &str, config: &TokenizerConfig) -> Vec<Token> {
    Tokenizer::new(text.as_bytes(), config.clone())
        .collect::<Result<Vec<_>>>()
        .expect("a &str is valid UTF-8")
}

/// Opens a text file, transparently decompressing gzip input.
pub fn open_text(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path).map_err(|e| Error::file(path, e))?;
    let mut magic = [0u8; 2];
    let n = read_up_to(&mut file, &mut magic)?;
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn read_up_to(r: &mut impl Read, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        let n = r.read(&mut buf[filled..])?;
        if n == 0 {
            break;
        }
        filled += n;
    }
    Ok(filled)
}

/// Word/id map with corpus frequencies.
///
/// Ids are dense and ordered by descending frequency (ties lexicographic), so
/// the K most frequent words are exactly the ids `0..K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
    freqs: Vec<u64>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from a type→count map. `total_tokens` counts every
    /// token, including types dropped by `min_count`.
    pub fn from_counts(
        counts: impl IntoIterator<Item = (String, u64)>,
        total_tokens: u64,
        min_count: u64,
    ) -> Result<Self> {
        if min_count < 1 {
            return Err(Error::param("min_count must be at least 1"));
        }
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|(_, c)| *c >= min_count)
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut words = Vec::with_capacity(entries.len());
        let mut freqs = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (id, (word, count)) in entries.into_iter().enumerate() {
            index.insert(word.clone(), id as u32);
            words.push(word);
            freqs.push(count);
        }
        Ok(Vocabulary {
            words,
            index,
            freqs,
            total_tokens,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn freq(&self, id: u32) -> u64 {
        self.freqs[id as usize]
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    /// Corpus frequency of a surface form, 0 when absent.
    pub fn freq_of(&self, word: &str) -> u64 {
        self.id(word).map_or(0, |id| self.freq(id))
    }

    /// Writes `vocab <N> <T>` followed by `word<TAB>frequency` lines in id order.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "vocab {} {}", self.len(), self.total_tokens)?;
        for (word, freq) in self.words.iter().zip(&self.freqs) {
            writeln!(w, "{}\t{}", word, freq)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format("vocabulary", 1, "missing header"))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "vocab" {
            return Err(Error::format("vocabulary", 1, "expected `vocab <N> <T>`"));
        }
        let n: usize = parse_field(fields[1], "vocabulary", 1)?;
        let total: u64 = parse_field(fields[2], "vocabulary", 1)?;
        let mut words = Vec::with_capacity(n);
        let mut freqs = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            let (word, freq) = line
                .split_once('\t')
                .ok_or_else(|| Error::format("vocabulary", lineno, "expected word<TAB>frequency"))?;
            let freq: u64 = parse_field(freq, "vocabulary", lineno)?;
            if index.insert(word.to_string(), words.len() as u32).is_some() {
                return Err(Error::format("vocabulary", lineno, "duplicate word"));
            }
            words.push(word.to_string());
            freqs.push(freq);
        }
        if words.len() != n {
            return Err(Error::format(
                "vocabulary",
                words.len() + 1,
                format!("header announces {} words, found {}", n, words.len()),
            ));
        }
        Ok(Vocabulary {
            words,
            index,
            freqs,
            total_tokens: total,
        })
    }
}

pub(crate) fn parse_field<T: std::str::FromStr>(
    s: &str,
    what: &'static str,
    line: usize,
) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::format(what, line, format!("cannot parse `{}`", s)))
}

/// Builds a vocabulary from a stream of word tokens.
pub fn build_vocabulary<I, S>(tokens: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for token in tokens {
        total += 1;
        let token = token.as_ref();
        match counts.get_mut(token) {
            Some(c) => *c += 1,
            None => {
                counts.insert(token.to_string(), 1);
            }
        }
    }
    Vocabulary::from_counts(counts, total, min_count)
}

const SLICE_MAGIC: &[u8; 8] = b"DSMTOK1\n";

/// A prefix of a tokenized corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSlice {
    pub tokens: Vec<u32>,
    /// Positions `b` (0 < b < len) where a new document starts.
    pub boundaries: Vec<usize>,
    /// Set when the source had fewer tokens than requested.
    pub truncated: bool,
}

impl CorpusSlice {
    pub fn new(tokens: Vec<u32>, boundaries: Vec<usize>) -> Result<Self> {
        let len = tokens.len();
        if boundaries.windows(2).any(|w| w[0] >= w[1]) || boundaries.iter().any(|&b| b > len) {
            return Err(Error::Integrity(
                "document boundaries must be strictly increasing and within the slice".into(),
            ));
        }
        Ok(CorpusSlice {
            tokens,
            boundaries,
            truncated: false,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Document segments in order; never yields empty segments.
    pub fn documents(&self) -> impl Iterator<Item = &[u32]> + '_ {
        let mut starts = Vec::with_capacity(self.boundaries.len() + 2);
        starts.push(0);
        starts.extend(self.boundaries.iter().copied());
        starts.push(self.tokens.len());
        (0..starts.len() - 1)
            .map(move |i| &self.tokens[starts[i]..starts[i + 1]])
            .filter(|d| !d.is_empty())
    }

    /// Segments to use for windowing: documents, or the whole slice when
    /// windows may cross documents.
    pub fn segments(&self, cross_document: bool) -> Vec<&[u32]> {
        if cross_document {
            if self.tokens.is_empty() {
                Vec::new()
            } else {
                vec![&self.tokens[..]]
            }
        } else {
            self.documents().collect()
        }
    }

    /// Binary form: magic, token count, boundary count, truncation flag,
    /// then little-endian `u32` tokens and `u64` boundaries.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(SLICE_MAGIC)?;
        w.write_all(&(self.tokens.len() as u64).to_le_bytes())?;
        w.write_all(&(self.boundaries.len() as u64).to_le_bytes())?;
        w.write_all(&[self.truncated as u8])?;
        let mut buf = Vec::with_capacity(self.tokens.len() * 4);
        for t in &self.tokens {
            buf.extend_from_slice(&t.to_le_bytes());
        }
        for &b in &self.boundaries {
            buf.extend_from_slice(&(b as u64).to_le_bytes());
        }
        w.write_all(&buf)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != SLICE_MAGIC {
            return Err(Error::Integrity("not a binary corpus slice".into()));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        r.read_exact(&mut word)?;
        let nb = u64::from_le_bytes(word) as usize;
        let mut flag = [0u8; 1];
        r.read_exact(&mut flag)?;
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() != n * 4 + nb * 8 {
            return Err(Error::Integrity(format!(
                "binary slice holds {} bytes, expected {}",
                buf.len(),
                n * 4 + nb * 8
            )));
        }
        let (tok, bnd) = buf.split_at(n * 4);
        let tokens = tok
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let boundaries = bnd
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")) as usize)
            .collect();
        let mut slice = CorpusSlice::new(tokens, boundaries)?;
        slice.truncated = flag[0] != 0;
        Ok(slice)
    }

    pub fn check_ids(&self, vocab_size: usize) -> Result<()> {
        if let Some((pos, &id)) = self
            .tokens
            .iter()
            .enumerate()
            .find(|(_, &id)| id as usize >= vocab_size)
        {
            return Err(Error::Integrity(format!(
                "token id {} at position {} outside vocabulary of size {}",
                id, pos, vocab_size
            )));
        }
        Ok(())
    }
}

/// Takes the first `min(n, len)` tokens, keeping document boundaries.
pub fn slice_corpus(tokens: &[u32], boundaries: &[usize], n: usize) -> CorpusSlice {
    let len = n.min(tokens.len());
    CorpusSlice {
        tokens: tokens[..len].to_vec(),
        boundaries: boundaries
            .iter()
            .copied()
            .filter(|&b| b > 0 && b < len)
            .collect(),
        truncated: n > tokens.len(),
    }
}

/// A whole tokenized corpus with ids interned in first-seen order.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub types: Vec<String>,
    pub tokens: Vec<u32>,
    pub boundaries: Vec<usize>,
}

impl Corpus {
    pub fn read<R: BufRead>(reader: R, config: &TokenizerConfig) -> Result<Self> {
        Self::read_limit(reader, config, usize::MAX)
    }

    /// Reads at most `limit` word tokens.
    pub fn read_limit<R: BufRead>(
        reader: R,
        config: &TokenizerConfig,
        limit: usize,
    ) -> Result<Self> {
        let mut corpus = Corpus::default();
        let mut index: HashMap<String, u32> = HashMap::new();
        for token in Tokenizer::new(reader, config.clone()) {
            if corpus.tokens.len() >= limit {
                break;
            }
            match token? {
                Token::DocBreak => corpus.boundaries.push(corpus.tokens.len()),
                Token::Word(w) => {
                    let id = match index.get(&w) {
                        Some(&id) => id,
                        None => {
                            let id = corpus.types.len() as u32;
                            index.insert(w.clone(), id);
                            corpus.types.push(w);
                            id
                        }
                    };
                    corpus.tokens.push(id);
                }
            }
        }
        Ok(corpus)
    }

    pub fn from_path(path: &Path, config: &TokenizerConfig) -> Result<Self> {
        Self::read(open_text(path)?, config)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn slice(&self, n: usize) -> CorpusSlice {
        slice_corpus(&self.tokens, &self.boundaries, n)
    }

    /// Slices the first `n` tokens, builds the vocabulary over that slice and
    /// re-maps the slice onto vocabulary ids. Tokens of types below
    /// `min_count` are removed from the slice.
    pub fn slice_with_vocab(&self, n: usize, min_count: u64) -> Result<(Vocabulary, CorpusSlice)> {
        let raw = self.slice(n);
        let mut counts = vec![0u64; self.types.len()];
        for &t in &raw.tokens {
            counts[t as usize] += 1;
        }
        let vocab = Vocabulary::from_counts(
            self.types
                .iter()
                .zip(&counts)
                .filter(|(_, &c)| c > 0)
                .map(|(w, &c)| (w.clone(), c)),
            raw.len() as u64,
            min_count,
        )?;
        let remap: Vec<Option<u32>> = self.types.iter().map(|w| vocab.id(w)).collect();
        let mut tokens = Vec::with_capacity(raw.len());
        let mut boundaries = Vec::new();
        for doc in raw.documents() {
            let start = tokens.len();
            tokens.extend(doc.iter().filter_map(|&t| remap[t as usize]));
            if tokens.len() > start && start > 0 {
                boundaries.push(start);
            }
        }
        let slice = CorpusSlice {
            tokens,
            boundaries,
            truncated: raw.truncated,
        };
        Ok((vocab, slice))
    }
}

/// Writes a slice back as text: one document per line, blank line between
/// documents. The output tokenizes back to the same slice.
pub fn write_slice_text<W: Write>(slice: &CorpusSlice, vocab: &Vocabulary, mut w: W) -> Result<()> {
    for (i, doc) in slice.documents().enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        let mut first = true;
        for &t in doc {
            if !first {
                w.write_all(b" ")?;
            }
            w.write_all(vocab.word(t).as_bytes())?;
            first = false;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}
