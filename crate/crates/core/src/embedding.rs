//! Dense word vectors and the word-vector text format.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::corpus::parse_field;
use crate::error::{Error, Result};

/// Dense per-word vectors of one dimensionality.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix {
    model: String,
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    /// `data` is row-major, `words.len() × dim`.
    pub fn new(model: impl Into<String>, words: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != words.len() * dim {
            return Err(Error::Integrity(format!(
                "{} values for {} words of dimension {}",
                data.len(),
                words.len(),
                dim
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Integrity(format!(
                "non-finite value in vector of `{}`",
                words[pos / dim.max(1)]
            )));
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::Integrity(format!("duplicate word `{}`", w)));
            }
        }
        Ok(EmbeddingMatrix {
            model: model.into(),
            words,
            index,
            dim,
            data,
        })
    }

    pub fn model(&self) -> &str {
        &self.model
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.id(word).map(|i| self.vector(i))
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Multiplies every vector by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.model.clone(),
            self.words.clone(),
            self.dim,
            self.data.iter().map(|v| v * factor).collect(),
        )
    }

    /// Writes the header `<V> <D>` and one `word v1 ... vD` line per word,
    /// values with six significant digits.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.len(), self.dim)?;
        let mut line = String::new();
        for (i, word) in self.words.iter().enumerate() {
            line.clear();
            line.push_str(word);
            for &v in self.vector(i) {
                line.push(' ');
                line.push_str(&format_g6(v));
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R, model: impl Into<String>) -> Result<Self> {
        const WHAT: &str = "word vectors";
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format(WHAT, 1, "missing header"))??;
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 2 {
            return Err(Error::format(WHAT, 1, "expected `<V> <D>`"));
        }
        let n: usize = parse_field(f[0], WHAT, 1)?;
        let dim: usize = parse_field(f[1], WHAT, 1)?;
        let mut words = Vec::with_capacity(n);
        let mut data = Vec::with_capacity(n * dim);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            let mut parts = line.split(' ');
            let word = parts
                .next()
                .filter(|w| !w.is_empty())
                .ok_or_else(|| Error::format(WHAT, lineno, "missing word"))?;
            let before = data.len();
            for p in parts.filter(|p| !p.is_empty()) {
                data.push(parse_field::<f64>(p, WHAT, lineno)?);
            }
            if data.len() - before != dim {
                return Err(Error::format(
                    WHAT,
                    lineno,
                    format!("expected {} values, found {}", dim, data.len() - before),
                ));
            }
            words.push(word.to_string());
        }
        if words.len() != n {
            return Err(Error::format(
                WHAT,
                words.len() + 2,
                format!("header announces {} words, found {}", n, words.len()),
            ));
        }
        Self::new(model, words, dim, data)
    }
}

/// Formats like C's `%g`: six significant digits, trailing zeros trimmed,
/// exponent notation outside `1e-4 ..= 1e6`.
pub fn format_g6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.5e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g6_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (0.1234567, "0.123457"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234567, "1.23457e-05"),
            (999999.5, "1e+06"),
            (9.999996, "10"),
            (1e-300, "1e-300"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g6(v), want, "formatting {v}");
        }
    }

    #[test]
    fn write_and_read() {
        let e = EmbeddingMatrix::new(
            "t",
            vec!["a".into(), "b".into()],
            2,
            vec![1.0, 0.5, -0.25, 1234567.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        e.write(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "2 2\na 1 0.5\nb -0.25 1.23457e+06\n"
        );
        let back = EmbeddingMatrix::read(&buf[..], "t").unwrap();
        assert_eq!(back.get("a").unwrap(), [1.0, 0.5]);
        assert_eq!(back.get("b").unwrap()[1], 1234570.0);
    }

    #[test]
    fn rejects_non_finite() {
        let err = EmbeddingMatrix::new("t", vec!["a".into()], 1, vec![f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }
}
