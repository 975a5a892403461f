use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::benchmark::Benchmark;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FrequencyClass {
    High,
    Medium,
    Low,
    Mixed,
}

impl FrequencyClass {
    pub const ALL: [FrequencyClass; 4] = [Self::High, Self::Medium, Self::Low, Self::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            Self::High => "HIGH",
            Self::Medium => "MEDIUM",
            Self::Low => "LOW",
            Self::Mixed => "MIXED",
        }
    }
}

impl fmt::Display for FrequencyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Corpus frequency of a word; 0 when unseen.
pub trait FrequencyLookup {
    fn frequency(&self, word: &str) -> u64;
}

impl FrequencyLookup for Vocabulary {
    fn frequency(&self, word: &str) -> u64 {
        self.freq_of(word)
    }
}

impl FrequencyLookup for HashMap<String, u64> {
    fn frequency(&self, word: &str) -> u64 {
        self.get(word).copied().unwrap_or(0)
    }
}

impl FrequencyLookup for BTreeMap<String, u64> {
    fn frequency(&self, word: &str) -> u64 {
        self.get(word).copied().unwrap_or(0)
    }
}

/// Lower bounds of the HIGH and MEDIUM ranges. Frequencies at or above
/// `high_min` are HIGH, at or above `med_min` MEDIUM, otherwise LOW.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrequencyThresholds {
    pub high_min: u64,
    pub med_min: u64,
}

impl FrequencyThresholds {
    pub fn new(high_min: u64, med_min: u64) -> Result<Self> {
        if med_min < 1 || high_min < med_min {
            return Err(Error::param(format!(
                "thresholds need high_min >= med_min >= 1, got {} and {}",
                high_min, med_min
            )));
        }
        Ok(FrequencyThresholds { high_min, med_min })
    }

    /// Thresholds from the four published range endpoints, which must satisfy
    /// `high_min > med_max >= med_min > low_max >= 1`. A frequency between
    /// `med_max` and `high_min` classifies as MEDIUM.
    pub fn from_endpoints(high_min: u64, med_max: u64, med_min: u64, low_max: u64) -> Result<Self> {
        if !(high_min > med_max && med_max >= med_min && med_min > low_max && low_max >= 1) {
            return Err(Error::param(format!(
                "range endpoints {} > {} >= {} > {} >= 1 do not hold",
                high_min, med_max, med_min, low_max
            )));
        }
        Self::new(high_min, med_min)
    }

    /// The single-word range of `f`; `None` for unseen words.
    pub fn band(&self, f: u64) -> Option<FrequencyClass> {
        match f {
            0 => None,
            f if f >= self.high_min => Some(FrequencyClass::High),
            f if f >= self.med_min => Some(FrequencyClass::Medium),
            _ => Some(FrequencyClass::Low),
        }
    }
}

/// The class of an item whose deciding words are `word1` and `word2`;
/// `None` when either word is unseen.
pub fn assign_frequency_class<F: FrequencyLookup + ?Sized>(
    word1: &str,
    word2: &str,
    freqs: &F,
    t: &FrequencyThresholds,
) -> Option<FrequencyClass> {
    let a = t.band(freqs.frequency(word1))?;
    let b = t.band(freqs.frequency(word2))?;
    Some(if a == b { a } else { FrequencyClass::Mixed })
}

/// Observed frequency span of one range of the test vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObservedRange {
    pub words: usize,
    pub max: u64,
    pub min: u64,
}

/// Item indices of one test, per class.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TestPartition {
    pub name: String,
    pub classes: BTreeMap<FrequencyClass, Vec<usize>>,
    pub excluded: Vec<usize>,
}

impl TestPartition {
    pub fn items(&self, class: FrequencyClass) -> &[usize] {
        self.classes.get(&class).map_or(&[], |v| v.as_slice())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub thresholds: FrequencyThresholds,
    /// HIGH, MEDIUM, LOW order; `None` for an empty range.
    pub ranges: [Option<ObservedRange>; 3],
    pub tests: Vec<TestPartition>,
}

impl Partition {
    pub fn class_size(&self, class: FrequencyClass) -> usize {
        self.tests.iter().map(|t| t.items(class).len()).sum()
    }

    pub fn excluded(&self) -> usize {
        self.tests.iter().map(|t| t.excluded.len()).sum()
    }

    /// Plain-text summary of thresholds, ranges and class sizes.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "thresholds high_min={} med_min={}\n",
            self.thresholds.high_min, self.thresholds.med_min
        );
        for (c, r) in FrequencyClass::ALL[..3].iter().zip(&self.ranges) {
            match r {
                Some(r) => s += &format!("range {} words={} max={} min={}\n", c, r.words, r.max, r.min),
                None => s += &format!("range {} words=0\n", c),
            }
        }
        for t in &self.tests {
            s += &format!("test {}", t.name);
            for c in FrequencyClass::ALL {
                s += &format!(" {}={}", c, t.items(c).len());
            }
            s += &format!(" excluded={}\n", t.excluded.len());
        }
        s
    }
}

/// Splits the seen test vocabulary, sorted by descending frequency, into
/// three equal parts; words tied with a cut frequency join the higher part.
/// Every item is then classified by its deciding pair of words.
pub fn partition_tests<F: FrequencyLookup + ?Sized>(suite: &[Benchmark], freqs: &F) -> Result<Partition> {
    if suite.iter().all(|b| b.is_empty()) {
        return Err(Error::param("empty test suite"));
    }
    let vocab: BTreeSet<&str> = suite
        .iter()
        .flat_map(|b| (0..b.len()).flat_map(move |i| <[&str; 2]>::from(b.item_words(i))))
        .collect();
    let mut fs: Vec<u64> = vocab.iter().map(|w| freqs.frequency(w)).filter(|&f| f > 0).collect();
    fs.sort_unstable_by(|a, b| b.cmp(a));

    let thresholds = if fs.is_empty() {
        FrequencyThresholds::new(1, 1)?
    } else {
        let n = fs.len();
        let cut1 = n.div_ceil(3);
        let cut2 = (2 * n).div_ceil(3).max(cut1);
        FrequencyThresholds::new(fs[cut1 - 1], fs[cut2 - 1])?
    };

    let mut ranges = [None; 3];
    for &f in &fs {
        let slot = thresholds.band(f).expect("seen word") as usize;
        let r = ranges[slot].get_or_insert(ObservedRange { words: 0, max: f, min: f });
        r.words += 1;
        r.min = f;
    }

    let tests = suite
        .iter()
        .map(|b| {
            let mut tp = TestPartition {
                name: b.name.clone(),
                ..Default::default()
            };
            for i in 0..b.len() {
                let (w1, w2) = b.item_words(i);
                match assign_frequency_class(w1, w2, freqs, &thresholds) {
                    Some(c) => tp.classes.entry(c).or_default().push(i),
                    None => tp.excluded.push(i),
                }
            }
            tp
        })
        .collect();
    Ok(Partition {
        thresholds,
        ranges,
        tests,
    })
}
