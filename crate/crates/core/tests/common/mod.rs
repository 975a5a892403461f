//! Independent reference implementations used as test oracles. Each one is
//! written the slow, obvious way and shares no code with the library beyond
//! the data types it reads.

#![allow(dead_code)]

use dsmkit::corpus::{build_vocabulary, CorpusSlice, Vocabulary};
use dsmkit::random_indexing::make_index_vector;
use rand::Rng;

/// A random corpus over `types` word forms with skewed frequencies, split
/// into up to `docs` documents.
pub struct Fixture {
    pub words: Vec<String>,
    pub vocab: Vocabulary,
    pub slice: CorpusSlice,
}

pub fn random_fixture<R: Rng>(rng: &mut R, tokens: usize, types: usize, docs: usize) -> Fixture {
    let tokens = tokens.max(1);
    let words: Vec<String> = (0..tokens)
        .map(|_| {
            // squaring a uniform skews mass toward low ranks
            let u: f64 = rng.random();
            format!("w{}", ((u * u) * types as f64) as usize)
        })
        .collect();
    let vocab = build_vocabulary(&words, 1).unwrap();
    let ids: Vec<u32> = words.iter().map(|w| vocab.id(w).unwrap()).collect();
    let mut boundaries: Vec<usize> = (1..docs.max(1))
        .map(|_| rng.random_range(1..tokens.max(2)))
        .filter(|&b| b < tokens)
        .collect();
    boundaries.sort_unstable();
    boundaries.dedup();
    let slice = CorpusSlice::new(ids, boundaries).unwrap();
    Fixture { words, vocab, slice }
}

/// Document index of every token position.
fn document_of(slice: &CorpusSlice, cross_document: bool) -> Vec<usize> {
    let mut doc = vec![0; slice.tokens.len()];
    if !cross_document {
        let mut d = 0;
        for (i, slot) in doc.iter_mut().enumerate() {
            if slice.boundaries.contains(&i) {
                d += 1;
            }
            *slot = d;
        }
    }
    doc
}

/// Dense counts from a double loop over token positions and their
/// neighbours.
pub fn brute_cooc(slice: &CorpusSlice, size: usize, half_width: usize, cross_document: bool) -> Vec<Vec<u64>> {
    let doc = document_of(slice, cross_document);
    let n = slice.tokens.len();
    let mut m = vec![vec![0u64; size]; size];
    for i in 0..n {
        for j in i.saturating_sub(half_width)..n.min(i + half_width + 1) {
            if i != j && doc[i] == doc[j] {
                m[slice.tokens[i] as usize][slice.tokens[j] as usize] += 1;
            }
        }
    }
    m
}

/// Positive PMI of a dense count matrix, marginals from its own sums.
pub fn brute_ppmi(counts: &[Vec<u64>]) -> Vec<Vec<f64>> {
    let rows = counts.len();
    let cols = counts.first().map_or(0, |r| r.len());
    let row_sum: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sum: Vec<u64> = (0..cols).map(|c| counts.iter().map(|r| r[c]).sum()).collect();
    let t: u64 = row_sum.iter().sum();
    let mut out = vec![vec![0.0; cols]; rows];
    for a in 0..rows {
        for b in 0..cols {
            let fab = counts[a][b];
            if fab > 0 {
                let pmi = (fab as f64 * t as f64 / (row_sum[a] as f64 * col_sum[b] as f64)).ln();
                out[a][b] = if pmi > 0.0 { pmi } else { 0.0 };
            }
        }
    }
    out
}

/// Dense column-major view: `cols[j][i]` is entry `(i, j)`.
pub type Columns = Vec<Vec<f64>>;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// One-sided Jacobi SVD. Returns singular values in descending order and
/// the matching unit left singular vectors, for columns of nonzero norm.
pub fn jacobi_svd(mut cols: Columns) -> (Vec<f64>, Columns) {
    let n = cols.len();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma.abs() <= 1e-14 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let (a, b) = (&mut left[p], &mut right[0]);
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = cols
        .into_iter()
        .map(|c| {
            let s = norm(&c);
            (s, c)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut sigma = Vec::new();
    let mut u = Vec::new();
    for (s, c) in pairs {
        sigma.push(s);
        if s > 0.0 {
            u.push(c.iter().map(|v| v / s).collect());
        }
    }
    (sigma, u)
}

/// Largest principal angle between the column spans of two orthonormal
/// bases, from the spectral norm of `(I - A Aᵀ) B`.
pub fn max_principal_angle(a: &Columns, b: &Columns) -> f64 {
    let residual: Columns = b
        .iter()
        .map(|bc| {
            let mut r = bc.clone();
            for ac in a {
                let p = dot(ac, bc);
                for (x, y) in r.iter_mut().zip(ac) {
                    *x -= p * y;
                }
            }
            r
        })
        .collect();
    let (s, _) = jacobi_svd(residual);
    s.first().copied().unwrap_or(0.0).min(1.0).asin()
}

/// `max |UᵀU - I|` over a column set.
pub fn orthonormality_residual(u: &Columns) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..u.len() {
        for j in 0..u.len() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&u[i], &u[j]) - want).abs());
        }
    }
    worst
}

/// Dense rotation: entry `p` moves to `(p + j) mod dim`.
pub fn rotate(v: &[f64], j: isize) -> Vec<f64> {
    let d = v.len() as isize;
    let mut out = vec![0.0; v.len()];
    for (p, &x) in v.iter().enumerate() {
        out[(p as isize + j).rem_euclid(d) as usize] = x;
    }
    out
}

/// Random indexing written as a literal transcription of the update rule:
/// walk the tokens in order, count the focus word, then for every in-window
/// context add its rotated index vector scaled by `exp(-lambda f / V)`.
pub fn ri_reference(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    half_width: usize,
    cross_document: bool,
    dim: usize,
    nnz: usize,
    lambda: f64,
    seed: u64,
) -> Vec<Vec<f64>> {
    let doc = document_of(slice, cross_document);
    let n = slice.tokens.len();
    let mut acc = vec![vec![0.0; dim]; vocab.len()];
    let mut freq = vec![0u64; vocab.len()];
    let mut v_size = 0u64;
    for i in 0..n {
        let a = slice.tokens[i] as usize;
        if freq[a] == 0 {
            v_size += 1;
        }
        freq[a] += 1;
        let c = half_width as isize;
        for j in (-c..=-1).chain(1..=c) {
            let k = i as isize + j;
            if k < 0 || k >= n as isize || doc[k as usize] != doc[i] {
                continue;
            }
            let b = slice.tokens[k as usize];
            let w = (-lambda * freq[b as usize] as f64 / v_size as f64).exp();
            let r = make_index_vector(vocab.word(b), seed, dim, nnz).unwrap().to_dense();
            for (x, y) in acc[a].iter_mut().zip(rotate(&r, j)) {
                *x += w * y;
            }
        }
    }
    acc
}

/// Ranks from pairwise comparisons: one plus the number of strictly smaller
/// values plus half the number of other equal values.
pub fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn brute_pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

pub fn brute_spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    brute_pearson(&brute_ranks(xs), &brute_ranks(ys))
}

/// Central-difference derivative of `f` along each coordinate of `x`.
pub fn central_differences(x: &mut [f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + h;
            let up = f(x);
            x[i] = orig - h;
            let down = f(x);
            x[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `‖a - b‖ / max(‖a‖, ‖b‖)`, zero when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale == 0.0 {
        0.0
    } else {
        norm(&diff) / scale
    }
}
