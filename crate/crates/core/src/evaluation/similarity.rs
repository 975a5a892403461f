use std::collections::HashMap;

use crate::corpus::Vocabulary;
use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::weighting::WeightedMatrix;

/// `u·v / (|u| |v|)`. A zero vector makes the similarity undefined.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::param(format!(
            "cosine of vectors with {} and {} entries",
            u.len(),
            v.len()
        )));
    }
    let (mut uv, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        uv += a * b;
        uu += a * a;
        vv += b * b;
    }
    ratio(uv, uu, vv)
}

fn ratio(uv: f64, uu: f64, vv: f64) -> Result<f64> {
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::Undefined("cosine with a zero vector".into()));
    }
    Ok((uv / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

/// Cosine of two sparse vectors given as sorted index/value lists.
pub fn sparse_cosine(ia: &[u32], va: &[f64], ib: &[u32], vb: &[f64]) -> Result<f64> {
    let uu: f64 = va.iter().map(|x| x * x).sum();
    let vv: f64 = vb.iter().map(|x| x * x).sum();
    ratio(sparse_dot(ia, va, ib, vb), uu, vv)
}

fn sparse_dot(ia: &[u32], va: &[f64], ib: &[u32], vb: &[f64]) -> f64 {
    let (mut i, mut j, mut acc) = (0, 0, 0.0);
    while i < ia.len() && j < ib.len() {
        match ia[i].cmp(&ib[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += va[i] * vb[j];
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

/// Anything words can be looked up in and compared by cosine.
pub trait VectorSpace {
    fn name(&self) -> &str;

    fn lookup(&self, word: &str) -> Option<usize>;

    /// `None` when either vector is zero.
    fn cosine_ids(&self, a: usize, b: usize) -> Option<f64>;

    fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        self.cosine_ids(self.lookup(a)?, self.lookup(b)?)
    }
}

impl VectorSpace for EmbeddingMatrix {
    fn name(&self) -> &str {
        self.model()
    }

    fn lookup(&self, word: &str) -> Option<usize> {
        self.id(word)
    }

    fn cosine_ids(&self, a: usize, b: usize) -> Option<f64> {
        cosine(self.vector(a), self.vector(b)).ok()
    }
}

/// Rows of a weighted matrix used directly as explicit word vectors.
pub struct SparseVectors {
    name: String,
    index: HashMap<String, usize>,
    matrix: WeightedMatrix,
    norms: Vec<f64>,
}

impl SparseVectors {
    pub fn new(name: impl Into<String>, matrix: WeightedMatrix, vocab: &Vocabulary) -> Result<Self> {
        if matrix.rows() != vocab.len() {
            return Err(Error::param(format!(
                "matrix has {} rows for a vocabulary of {}",
                matrix.rows(),
                vocab.len()
            )));
        }
        let norms = (0..matrix.rows())
            .map(|r| matrix.row(r).1.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        let index = vocab
            .words()
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(SparseVectors {
            name: name.into(),
            index,
            matrix,
            norms,
        })
    }

    pub fn matrix(&self) -> &WeightedMatrix {
        &self.matrix
    }
}

impl VectorSpace for SparseVectors {
    fn name(&self) -> &str {
        &self.name
    }

    fn lookup(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    fn cosine_ids(&self, a: usize, b: usize) -> Option<f64> {
        let (na, nb) = (self.norms[a], self.norms[b]);
        if na == 0.0 || nb == 0.0 {
            return None;
        }
        let (ia, va) = self.matrix.row(a);
        let (ib, vb) = self.matrix.row(b);
        Some((sparse_dot(ia, va, ib, vb) / (na * nb)).clamp(-1.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighting::Scheme;
    use approx::assert_relative_eq;

    #[test]
    fn cosine_cases() {
        assert_relative_eq!(cosine(&[3.0, -1.0], &[3.0, -1.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert_relative_eq!(
            cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-15
        );
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Undefined(_))));
        assert!(matches!(cosine(&[1.0], &[1.0, 0.0]), Err(Error::Parameter(_))));
    }

    #[test]
    fn sparse_matches_dense() {
        let a = [0.0, 2.0, 0.0, -1.0, 3.0];
        let b = [1.0, 0.5, 0.0, 0.0, 2.0];
        let dense = cosine(&a, &b).unwrap();
        let sp = sparse_cosine(&[1, 3, 4], &[2.0, -1.0, 3.0], &[0, 1, 4], &[1.0, 0.5, 2.0]).unwrap();
        assert_relative_eq!(dense, sp, epsilon = 1e-15);
    }

    #[test]
    fn sparse_vectors_space() {
        let vocab = crate::corpus::build_vocabulary(["x", "y", "z", "x"], 1).unwrap();
        let m = WeightedMatrix::from_triples(
            Scheme::Ppmi,
            3,
            3,
            [(0, 0, 1.0), (0, 2, 1.0), (1, 0, 2.0), (1, 2, 2.0)],
        )
        .unwrap();
        let s = SparseVectors::new("ppmi", m, &vocab).unwrap();
        assert_relative_eq!(s.similarity("x", "y").unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(s.similarity("x", "z"), None);
        assert_eq!(s.similarity("x", "nope"), None);
    }
}
