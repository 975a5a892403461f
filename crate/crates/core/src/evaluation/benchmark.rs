use std::collections::HashSet;
use std::io::BufRead;
use std::path::Path;

use crate::corpus::parse_field;
use crate::error::{Error, Result};

/// A synonym question: which alternative is closest in meaning to `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipleChoiceItem {
    target: String,
    alternatives: Vec<String>,
    answer: usize,
}

impl MultipleChoiceItem {
    pub fn new(target: impl Into<String>, alternatives: Vec<String>, answer: usize) -> Result<Self> {
        if alternatives.is_empty() {
            return Err(Error::param("multiple-choice item without alternatives"));
        }
        if answer >= alternatives.len() {
            return Err(Error::param(format!(
                "answer index {} out of {} alternatives",
                answer,
                alternatives.len()
            )));
        }
        let distinct: HashSet<&String> = alternatives.iter().collect();
        if distinct.len() != alternatives.len() {
            return Err(Error::param("repeated alternative"));
        }
        Ok(MultipleChoiceItem {
            target: target.into(),
            alternatives,
            answer,
        })
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn answer_index(&self) -> usize {
        self.answer
    }

    pub fn answer(&self) -> &str {
        &self.alternatives[self.answer]
    }
}

/// Two words with a gold similarity or relatedness score.
#[derive(Clone, Debug, PartialEq)]
pub struct RatingPair {
    pub word1: String,
    pub word2: String,
    pub gold: f64,
}

impl RatingPair {
    pub fn new(word1: impl Into<String>, word2: impl Into<String>, gold: f64) -> Result<Self> {
        if !gold.is_finite() {
            return Err(Error::param("non-finite gold score"));
        }
        Ok(RatingPair {
            word1: word1.into(),
            word2: word2.into(),
            gold,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Items {
    Choice(Vec<MultipleChoiceItem>),
    Rating(Vec<RatingPair>),
}

/// A named test set.
#[derive(Clone, Debug, PartialEq)]
pub struct Benchmark {
    pub name: String,
    pub items: Items,
}

impl Benchmark {
    pub fn choice(name: impl Into<String>, items: Vec<MultipleChoiceItem>) -> Self {
        Benchmark {
            name: name.into(),
            items: Items::Choice(items),
        }
    }

    pub fn rating(name: impl Into<String>, pairs: Vec<RatingPair>) -> Self {
        Benchmark {
            name: name.into(),
            items: Items::Rating(pairs),
        }
    }

    pub fn len(&self) -> usize {
        match &self.items {
            Items::Choice(v) => v.len(),
            Items::Rating(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The two words that decide an item's frequency class: target and
    /// correct answer, or both rated words.
    pub fn item_words(&self, i: usize) -> (&str, &str) {
        match &self.items {
            Items::Choice(v) => (v[i].target(), v[i].answer()),
            Items::Rating(v) => (&v[i].word1, &v[i].word2),
        }
    }

    /// Every word mentioned by the test, alternatives included.
    pub fn words(&self) -> Vec<&str> {
        match &self.items {
            Items::Choice(v) => v
                .iter()
                .flat_map(|it| std::iter::once(it.target()).chain(it.alternatives().iter().map(|s| s.as_str())))
                .collect(),
            Items::Rating(v) => v.iter().flat_map(|p| [p.word1.as_str(), p.word2.as_str()]).collect(),
        }
    }

    /// The items at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Benchmark {
        let items = match &self.items {
            Items::Choice(v) => Items::Choice(indices.iter().map(|&i| v[i].clone()).collect()),
            Items::Rating(v) => Items::Rating(indices.iter().map(|&i| v[i].clone()).collect()),
        };
        Benchmark {
            name: self.name.clone(),
            items,
        }
    }

    /// Reads `target alt1 .. altN answer_index` lines (0-based answer).
    pub fn read_choice<R: BufRead>(name: impl Into<String>, r: R) -> Result<Self> {
        const WHAT: &str = "multiple-choice test";
        let mut items = Vec::new();
        for (lineno, fields) in data_lines(r)? {
            if fields.len() < 3 {
                return Err(Error::format(WHAT, lineno, "expected `target alt.. answer_index`"));
            }
            let answer: usize = parse_field(&fields[fields.len() - 1], WHAT, lineno)?;
            let alts = fields[1..fields.len() - 1].iter().map(|s| s.to_string()).collect();
            let item = MultipleChoiceItem::new(fields[0].as_str(), alts, answer)
                .map_err(|e| Error::format(WHAT, lineno, e.to_string()))?;
            items.push(item);
        }
        Ok(Self::choice(name, items))
    }

    /// Reads `word1 word2 score` lines. A first line whose score does not
    /// parse is taken as a column header.
    pub fn read_rating<R: BufRead>(name: impl Into<String>, r: R) -> Result<Self> {
        const WHAT: &str = "rating test";
        let mut pairs = Vec::new();
        for (n, (lineno, fields)) in data_lines(r)?.into_iter().enumerate() {
            if fields.len() < 3 {
                return Err(Error::format(WHAT, lineno, "expected `word1 word2 score`"));
            }
            let gold = match fields[2].parse::<f64>() {
                Ok(g) => g,
                Err(_) if n == 0 => continue,
                Err(_) => return Err(Error::format(WHAT, lineno, format!("bad score `{}`", fields[2]))),
            };
            let pair = RatingPair::new(fields[0].as_str(), fields[1].as_str(), gold)
                .map_err(|e| Error::format(WHAT, lineno, e.to_string()))?;
            pairs.push(pair);
        }
        Ok(Self::rating(name, pairs))
    }

    pub fn load(name: impl Into<String>, kind: BenchmarkKind, path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
        let r = std::io::BufReader::new(file);
        match kind {
            BenchmarkKind::Choice => Self::read_choice(name, r),
            BenchmarkKind::Rating => Self::read_rating(name, r),
        }
    }

    pub fn kind(&self) -> BenchmarkKind {
        match self.items {
            Items::Choice(_) => BenchmarkKind::Choice,
            Items::Rating(_) => BenchmarkKind::Rating,
        }
    }

    /// Writes the test in the format its loader reads.
    pub fn write<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        match &self.items {
            Items::Choice(v) => {
                for it in v {
                    writeln!(w, "{}\t{}\t{}", it.target(), it.alternatives().join("\t"), it.answer_index())?;
                }
            }
            Items::Rating(v) => {
                for p in v {
                    writeln!(w, "{}\t{}\t{}", p.word1, p.word2, p.gold)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkKind {
    Choice,
    Rating,
}

/// Non-blank, non-`#` lines split on tabs or whitespace, with 1-based numbers.
fn data_lines<R: BufRead>(r: R) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = if t.contains('\t') {
            t.split('\t').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
        } else {
            t.split_whitespace().map(str::to_string).collect()
        };
        out.push((i + 1, fields));
    }
    Ok(out)
}
