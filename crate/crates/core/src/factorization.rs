//! Truncated SVD of a weighted matrix by randomized range finding, and the
//! truncated (TSVD) and inverted (ISVD) embeddings cut from it.

use std::io::{Read, Write};

use ndarray::{s, Array2, ArrayView2, Axis};
use ndarray_linalg::{QR, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use crate::embedding::EmbeddingMatrix;
use crate::error::{Error, Result};
use crate::weighting::WeightedMatrix;

/// Left singular vectors and singular values; the right factor is not kept.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationResult {
    /// `rows × k`, orthonormal columns.
    pub u: Array2<f64>,
    /// Descending, non-negative.
    pub sigma: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SvdConfig {
    pub rank: usize,
    pub oversample: usize,
    pub power_iters: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for SvdConfig {
    fn default() -> Self {
        SvdConfig {
            rank: 3000,
            oversample: 10,
            power_iters: 4,
            seed: 1,
            threads: 1,
        }
    }
}

impl FactorizationResult {
    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    const MAGIC: &'static [u8; 8] = b"DSMSVD1\n";

    /// Little-endian binary dump: magic, rows, k, sigma, then U row-major.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(Self::MAGIC)?;
        w.write_all(&(self.rows() as u64).to_le_bytes())?;
        w.write_all(&(self.k() as u64).to_le_bytes())?;
        for s in &self.sigma {
            w.write_all(&s.to_le_bytes())?;
        }
        for v in self.u.iter() {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != Self::MAGIC {
            return Err(Error::format("factorization", 1, "bad magic"));
        }
        let mut word = [0u8; 8];
        let mut next_u64 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let rows = next_u64(&mut r)? as usize;
        let k = next_u64(&mut r)? as usize;
        let mut buf = vec![0u8; 8 * (k + rows * k)];
        r.read_exact(&mut buf)?;
        let vals: Vec<f64> = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let sigma = vals[..k].to_vec();
        let u = Array2::from_shape_vec((rows, k), vals[k..].to_vec())
            .map_err(|e| Error::format("factorization", 1, e.to_string()))?;
        Ok(FactorizationResult { u, sigma })
    }
}

/// Sparse operand in both row and column compressed form.
struct SparseOperand {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
    t_ptr: Vec<usize>,
    t_idx: Vec<u32>,
    t_values: Vec<f64>,
}

impl SparseOperand {
    fn new(m: &WeightedMatrix) -> Result<Self> {
        let (row_ptr, col_idx, values) = m.csr();
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Integrity(format!(
                "non-finite cell at column {}",
                col_idx[k]
            )));
        }
        let cols = m.cols();
        let mut t_ptr = vec![0usize; cols + 1];
        for &c in col_idx {
            t_ptr[c as usize + 1] += 1;
        }
        for c in 0..cols {
            t_ptr[c + 1] += t_ptr[c];
        }
        let mut fill = t_ptr.clone();
        let mut t_idx = vec![0u32; values.len()];
        let mut t_values = vec![0f64; values.len()];
        for r in 0..m.rows() {
            for k in row_ptr[r]..row_ptr[r + 1] {
                let c = col_idx[k] as usize;
                t_idx[fill[c]] = r as u32;
                t_values[fill[c]] = values[k];
                fill[c] += 1;
            }
        }
        Ok(SparseOperand {
            rows: m.rows(),
            cols,
            row_ptr: row_ptr.to_vec(),
            col_idx: col_idx.to_vec(),
            values: values.to_vec(),
            t_ptr,
            t_idx,
            t_values,
        })
    }

    /// `A·x` (`transpose == false`) or `Aᵀ·x`.
    fn mul(&self, x: ArrayView2<f64>, transpose: bool, threads: usize) -> Array2<f64> {
        let (out_rows, ptr, idx, vals) = if transpose {
            (self.cols, &self.t_ptr, &self.t_idx, &self.t_values)
        } else {
            (self.rows, &self.row_ptr, &self.col_idx, &self.values)
        };
        let width = x.ncols();
        let x = x.as_standard_layout();
        let xs = x.as_slice().expect("standard layout");
        let mut out = vec![0f64; out_rows * width];
        let fill = |first_row: usize, chunk: &mut [f64]| {
            for (i, dst) in chunk.chunks_mut(width).enumerate() {
                let r = first_row + i;
                for k in ptr[r]..ptr[r + 1] {
                    let v = vals[k];
                    let src = &xs[idx[k] as usize * width..][..width];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += v * s;
                    }
                }
            }
        };
        if threads <= 1 || out_rows < 2 * threads || width == 0 {
            fill(0, &mut out);
        } else {
            let rows_per = out_rows.div_ceil(threads);
            std::thread::scope(|s| {
                for (t, chunk) in out.chunks_mut(rows_per * width).enumerate() {
                    let fill = &fill;
                    s.spawn(move || fill(t * rows_per, chunk));
                }
            });
        }
        Array2::from_shape_vec((out_rows, width), out).expect("shape")
    }
}

fn orthonormal_basis(y: &Array2<f64>) -> Result<Array2<f64>> {
    let (q, _) = y.qr().map_err(|e| Error::Linalg(e.to_string()))?;
    Ok(q)
}

/// Top-`k` left singular vectors and values of `m`.
pub fn svd(
    m: &WeightedMatrix,
    k: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<FactorizationResult> {
    svd_with(
        m,
        &SvdConfig {
            rank: k,
            oversample,
            power_iters,
            seed,
            threads: 1,
        },
    )
}

pub fn svd_with(m: &WeightedMatrix, cfg: &SvdConfig) -> Result<FactorizationResult> {
    let a = SparseOperand::new(m)?;
    let max_rank = a.rows.min(a.cols);
    if cfg.rank < 1 || cfg.rank > max_rank {
        return Err(Error::param(format!(
            "rank {} outside 1..={} for a {}x{} matrix",
            cfg.rank, max_rank, a.rows, a.cols
        )));
    }
    let k = cfg.rank;
    let l = (k + cfg.oversample).min(max_rank);
    let threads = cfg.threads.max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let omega = Array2::from_shape_simple_fn((a.cols, l), || StandardNormal.sample(&mut rng));

    let mut q = orthonormal_basis(&a.mul(omega.view(), false, threads))?;
    for _ in 0..cfg.power_iters {
        let z = orthonormal_basis(&a.mul(q.view(), true, threads))?;
        q = orthonormal_basis(&a.mul(z.view(), false, threads))?;
    }

    // B = Qᵀ A = Rᵀ Zᵀ with Aᵀ Q = Z R, so the left factor of B is that of Rᵀ.
    let bt = a.mul(q.view(), true, threads);
    let (_, r) = bt.qr().map_err(|e| Error::Linalg(e.to_string()))?;
    let (ur, sv, _) = r
        .t()
        .to_owned()
        .svd(true, false)
        .map_err(|e| Error::Linalg(e.to_string()))?;
    let ur = ur.ok_or_else(|| Error::Linalg("missing left singular vectors".into()))?;

    let mut u = q.dot(&ur.slice(s![.., ..k]));
    let sigma: Vec<f64> = sv.iter().take(k).copied().collect();
    fix_signs(&mut u);
    if u.iter().any(|v| !v.is_finite()) || sigma.iter().any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite factorization".into()));
    }
    Ok(FactorizationResult { u, sigma })
}

/// Makes the largest-magnitude entry of every column positive.
pub fn fix_signs(u: &mut Array2<f64>) {
    for mut col in u.axis_iter_mut(Axis(1)) {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &v in col.iter() {
            if v.abs() > best {
                best = v.abs();
                sign = v.signum();
            }
        }
        if sign < 0.0 {
            col.mapv_inplace(|v| -v);
        }
    }
}

/// Rows of `U[:, from..to] · diag(sigma[from..to])`.
fn band_embedding(
    f: &FactorizationResult,
    from: usize,
    to: usize,
    words: &[String],
    model: &str,
) -> Result<EmbeddingMatrix> {
    if words.len() != f.rows() {
        return Err(Error::param(format!(
            "{} words for a factorization of {} rows",
            words.len(),
            f.rows()
        )));
    }
    let dim = to - from;
    let mut data = Vec::with_capacity(f.rows() * dim);
    for row in f.u.rows() {
        for j in from..to {
            data.push(row[j] * f.sigma[j]);
        }
    }
    EmbeddingMatrix::new(model, words.to_vec(), dim, data)
}

/// The first `d` latent dimensions scaled by their singular values.
pub fn tsvd_embed(f: &FactorizationResult, d: usize, words: &[String]) -> Result<EmbeddingMatrix> {
    if d < 1 || d > f.k() {
        return Err(Error::param(format!(
            "TSVD dimension {} outside 1..={}",
            d,
            f.k()
        )));
    }
    band_embedding(f, 0, d, words, "tsvd")
}

/// Latent dimensions `remove..keep_through` scaled by their singular values.
pub fn isvd_embed(
    f: &FactorizationResult,
    remove: usize,
    keep_through: usize,
    words: &[String],
) -> Result<EmbeddingMatrix> {
    if remove >= keep_through || keep_through > f.k() {
        return Err(Error::param(format!(
            "ISVD band {}..{} invalid for rank {}",
            remove,
            keep_through,
            f.k()
        )));
    }
    band_embedding(f, remove, keep_through, words, "isvd")
}
