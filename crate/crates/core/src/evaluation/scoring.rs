use super::benchmark::{Benchmark, Items, MultipleChoiceItem, RatingPair};
use super::similarity::VectorSpace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// Percentage of correctly answered items.
    Accuracy,
    /// Spearman rank correlation.
    Spearman,
}

/// Accuracy with its coverage. `scored + skipped == total`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiceScore {
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub scored: usize,
    pub skipped: usize,
}

/// Items with an unknown target, or with no known alternative, count as
/// incorrect and are reported as skipped. Unknown alternatives cannot be
/// chosen; ties go to the lower index.
pub fn eval_multiple_choice<S: VectorSpace + ?Sized>(space: &S, items: &[MultipleChoiceItem]) -> Result<ChoiceScore> {
    if items.is_empty() {
        return Err(Error::param("no multiple-choice items"));
    }
    let (mut correct, mut scored) = (0, 0);
    for item in items {
        let Some(t) = space.lookup(item.target()) else {
            continue;
        };
        let mut best: Option<(usize, f64)> = None;
        let mut any_known = false;
        for (i, alt) in item.alternatives().iter().enumerate() {
            let Some(a) = space.lookup(alt) else {
                continue;
            };
            any_known = true;
            // An undefined cosine ranks below every defined one.
            let s = space.cosine_ids(t, a).unwrap_or(f64::NEG_INFINITY);
            if best.map_or(true, |(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        if !any_known {
            continue;
        }
        scored += 1;
        if best.map(|(i, _)| i) == Some(item.answer_index()) {
            correct += 1;
        }
    }
    let total = items.len();
    Ok(ChoiceScore {
        accuracy: 100.0 * correct as f64 / total as f64,
        correct,
        total,
        scored,
        skipped: total - scored,
    })
}

/// 1-based ranks; tied values share the mean of their positions.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    ranks
}

/// Pearson correlation; `None` when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rho with average ranks for ties. `None` for fewer than two
/// values or a constant list.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// `rho` is `None` when fewer than two pairs are covered or the ranks are
/// constant. `scored + skipped == total`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatingScore {
    pub rho: Option<f64>,
    pub total: usize,
    pub scored: usize,
    pub skipped: usize,
}

/// Pairs with an unknown word or an undefined cosine are skipped.
pub fn eval_similarity<S: VectorSpace + ?Sized>(space: &S, pairs: &[RatingPair]) -> Result<RatingScore> {
    if pairs.len() < 2 {
        return Err(Error::param("similarity test needs at least two pairs"));
    }
    let (mut model, mut gold) = (Vec::new(), Vec::new());
    for p in pairs {
        if let Some(s) = space.similarity(&p.word1, &p.word2) {
            model.push(s);
            gold.push(p.gold);
        }
    }
    Ok(RatingScore {
        rho: spearman(&model, &gold),
        total: pairs.len(),
        scored: model.len(),
        skipped: pairs.len() - model.len(),
    })
}

/// One model's result on one test (or one frequency class of a test).
#[derive(Clone, Debug, PartialEq)]
pub struct TestScore {
    pub test: String,
    pub metric: Metric,
    /// Accuracy in percent or rho; `None` when undefined.
    pub score: Option<f64>,
    pub scored: usize,
    pub skipped: usize,
}

impl TestScore {
    /// The score on the common 0–100 scale (rho × 100).
    pub fn scaled(&self) -> Option<f64> {
        match self.metric {
            Metric::Accuracy => self.score,
            Metric::Spearman => self.score.map(|r| 100.0 * r),
        }
    }

    pub fn total(&self) -> usize {
        self.scored + self.skipped
    }
}

/// Scores `space` on a whole test. An empty test yields an undefined score.
pub fn evaluate<S: VectorSpace + ?Sized>(space: &S, bench: &Benchmark) -> TestScore {
    let test = bench.name.clone();
    match &bench.items {
        Items::Choice(items) => match eval_multiple_choice(space, items) {
            Ok(s) => TestScore {
                test,
                metric: Metric::Accuracy,
                score: Some(s.accuracy),
                scored: s.scored,
                skipped: s.skipped,
            },
            Err(_) => TestScore {
                test,
                metric: Metric::Accuracy,
                score: None,
                scored: 0,
                skipped: 0,
            },
        },
        Items::Rating(pairs) => match eval_similarity(space, pairs) {
            Ok(s) => TestScore {
                test,
                metric: Metric::Spearman,
                score: s.rho,
                scored: s.scored,
                skipped: s.skipped,
            },
            // Fewer than two pairs: nothing is scored.
            Err(_) => TestScore {
                test,
                metric: Metric::Spearman,
                score: None,
                scored: 0,
                skipped: pairs.len(),
            },
        },
    }
}
