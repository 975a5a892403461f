use std::fmt::Write as _;

use super::benchmark::Benchmark;
use super::frequency::{FrequencyClass, Partition};
use super::scoring::{evaluate, TestScore};
use super::similarity::VectorSpace;
use crate::error::{Error, Result};

/// Summary of per-test scores on the 0–100 scale. `stddev` is the
/// population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    pub stddev: f64,
    pub max: f64,
    pub min: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("nothing to aggregate"));
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Ok(Aggregate {
            count: values.len(),
            mean,
            stddev: var.sqrt(),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }

    /// `mean (↑max, ↓min)`: the mean to two decimals, the extremes cut
    /// (not rounded) to one decimal and zero-padded to two integer digits.
    pub fn annotated(&self) -> String {
        format!(
            "{:.2} (↑{}, ↓{})",
            self.mean,
            one_decimal_cut(self.max),
            one_decimal_cut(self.min)
        )
    }
}

fn one_decimal_cut(v: f64) -> String {
    // The epsilon keeps decimal inputs such as 88.8 from flooring to 88.7.
    let cut = (v * 10.0 + 1e-9).floor() / 10.0;
    format!("{:04.1}", cut)
}

/// Aggregates the defined scores among `results`.
pub fn aggregate_report(results: &[TestScore]) -> Result<Aggregate> {
    if results.is_empty() {
        return Err(Error::param("no test results"));
    }
    let values: Vec<f64> = results.iter().filter_map(TestScore::scaled).collect();
    if values.is_empty() {
        return Err(Error::Undefined("every test score is undefined".into()));
    }
    Aggregate::of(&values)
}

/// One model's scores overall and per frequency class.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub model: String,
    pub tests: Vec<TestScore>,
    pub overall: Option<Aggregate>,
    pub classes: Vec<ClassReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassReport {
    pub class: FrequencyClass,
    pub tests: Vec<TestScore>,
    pub aggregate: Option<Aggregate>,
}

/// Scores `space` on every test, and on every class of `partition` when given.
pub fn evaluate_suite<S: VectorSpace + ?Sized>(
    space: &S,
    suite: &[Benchmark],
    partition: Option<&Partition>,
) -> EvalReport {
    let tests: Vec<TestScore> = suite.iter().map(|b| evaluate(space, b)).collect();
    let overall = aggregate_report(&tests).ok();
    let classes = match partition {
        None => Vec::new(),
        Some(p) => FrequencyClass::ALL
            .iter()
            .map(|&class| {
                let tests: Vec<TestScore> = suite
                    .iter()
                    .zip(&p.tests)
                    .map(|(b, tp)| evaluate(space, &b.subset(tp.items(class))))
                    .collect();
                let aggregate = aggregate_report(&tests).ok();
                ClassReport { class, tests, aggregate }
            })
            .collect(),
    };
    EvalReport {
        model: space.name().to_string(),
        tests,
        overall,
        classes,
    }
}

const SCALE_NOTE: &str = "# scores on a common 0-100 scale: accuracy in percent, Spearman rho x 100; \
means mix both metrics";

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{:.2}", v))
}

fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, s) in r.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{:<w$}", s, w = widths[c]);
            } else {
                let _ = write!(line, "  {:>w$}", s, w = widths[c]);
            }
        }
        out += line.trim_end();
        out.push('\n');
    }
    out
}

/// Models as rows, tests as columns, then mean and standard deviation.
pub fn overall_table(reports: &[EvalReport]) -> String {
    let mut rows = Vec::new();
    let mut header = vec!["model".to_string()];
    if let Some(r) = reports.first() {
        header.extend(r.tests.iter().map(|t| t.test.clone()));
    }
    header.extend(["mean".to_string(), "std".to_string()]);
    rows.push(header);
    for r in reports {
        let mut row = vec![r.model.clone()];
        row.extend(r.tests.iter().map(|t| cell(t.scaled())));
        row.push(cell(r.overall.map(|a| a.mean)));
        row.push(cell(r.overall.map(|a| a.stddev)));
        rows.push(row);
    }
    format!("{}\n{}", SCALE_NOTE, aligned(&rows))
}

/// Models as rows, frequency classes as columns, each cell `mean (↑max, ↓min)`.
pub fn class_table(reports: &[EvalReport]) -> String {
    let mut rows = vec![std::iter::once("model".to_string())
        .chain(FrequencyClass::ALL.iter().map(|c| c.to_string()))
        .collect::<Vec<_>>()];
    for r in reports {
        let mut row = vec![r.model.clone()];
        for c in FrequencyClass::ALL {
            let a = r.classes.iter().find(|cr| cr.class == c).and_then(|cr| cr.aggregate);
            row.push(a.map_or_else(|| "-".to_string(), |a| a.annotated()));
        }
        rows.push(row);
    }
    format!("{}\n{}", SCALE_NOTE, aligned(&rows))
}

/// One `model test class score covered skipped` line per model, test and
/// class; `ALL` marks whole-test scores. Scores are on their native scale.
pub fn records(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let mut line = |model: &str, class: &str, t: &TestScore| {
        let score = t.score.map_or_else(|| "nan".to_string(), |s| format!("{:.6}", s));
        let _ = writeln!(out, "{} {} {} {} {} {}", model, t.test, class, score, t.scored, t.skipped);
    };
    for r in reports {
        for t in &r.tests {
            line(&r.model, "ALL", t);
        }
        for cr in &r.classes {
            for t in &cr.tests {
                line(&r.model, cr.class.name(), t);
            }
        }
    }
    out
}
