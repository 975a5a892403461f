//! Association weightings of raw co-occurrence counts.

use std::fmt;
use std::io::{BufRead, Write};

use crate::cooccurrence::{read_contexts_line, write_contexts_line, CoocMatrix};
use crate::corpus::parse_field;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    /// Raw counts.
    Co,
    /// Positive pointwise mutual information.
    Ppmi,
    /// PPMI with the context distribution smoothed by `alpha`.
    Sppmi { alpha: f64 },
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Co => write!(f, "co"),
            Scheme::Ppmi => write!(f, "ppmi"),
            Scheme::Sppmi { .. } => write!(f, "sppmi"),
        }
    }
}

/// Real-valued sparse matrix with the shape of its source counts.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedMatrix {
    scheme: Scheme,
    rows: usize,
    context_ids: Vec<u32>,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
    total: u64,
}

impl WeightedMatrix {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.context_ids.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn context_ids(&self) -> &[u32] {
        &self.context_ids
    }

    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&(c as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn triples(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals)
                .map(move |(&c, &v)| (r as u32, c, v))
        })
    }

    pub(crate) fn csr(&self) -> (&[usize], &[u32], &[f64]) {
        (&self.row_ptr, &self.col_idx, &self.values)
    }

    /// Builds a matrix directly from triples (sorted, deduplicated by the
    /// caller's contract); used for dense test fixtures.
    pub fn from_triples(
        scheme: Scheme,
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (u32, u32, f64)>,
    ) -> Result<Self> {
        let mut by_row: Vec<Vec<(u32, f64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triples {
            if r as usize >= rows || c as usize >= cols {
                return Err(Error::Integrity(format!("cell ({r}, {c}) outside matrix")));
            }
            by_row[r as usize].push((c, v));
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for mut cells in by_row {
            cells.sort_by_key(|&(c, _)| c);
            for w in cells.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::Integrity("duplicate cell".into()));
                }
            }
            for (c, v) in cells {
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(WeightedMatrix {
            scheme,
            rows,
            context_ids: (0..cols as u32).collect(),
            row_ptr,
            col_idx,
            values,
            total: 0,
        })
    }

    /// Writes the same triple layout as [`CoocMatrix::write`], tagged with the
    /// scheme; values use the shortest representation that parses back
    /// exactly.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        write!(
            w,
            "{} {} {} {} {}",
            self.scheme,
            self.rows,
            self.cols(),
            self.nnz(),
            self.total
        )?;
        if let Scheme::Sppmi { alpha } = self.scheme {
            write!(w, " {}", alpha)?;
        }
        writeln!(w)?;
        write_contexts_line(&mut w, &self.context_ids)?;
        for (r, c, v) in self.triples() {
            writeln!(w, "{} {} {}", r, c, v)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        const WHAT: &str = "weighted matrix";
        let mut lines = r.lines().enumerate().peekable();
        let header = match lines.next() {
            Some((_, l)) => l?,
            None => return Err(Error::format(WHAT, 1, "missing header")),
        };
        let f: Vec<&str> = header.split_whitespace().collect();
        let scheme = match (f.first().copied(), f.len()) {
            (Some("co"), 5) => Scheme::Co,
            (Some("ppmi"), 5) => Scheme::Ppmi,
            (Some("sppmi"), 6) => Scheme::Sppmi {
                alpha: parse_field(f[5], WHAT, 1)?,
            },
            _ => {
                return Err(Error::format(
                    WHAT,
                    1,
                    "expected `<co|ppmi|sppmi> <rows> <cols> <nnz> <T> [alpha]`",
                ))
            }
        };
        let rows: usize = parse_field(f[1], WHAT, 1)?;
        let cols: usize = parse_field(f[2], WHAT, 1)?;
        let nnz: usize = parse_field(f[3], WHAT, 1)?;
        let total: u64 = parse_field(f[4], WHAT, 1)?;
        let context_ids = read_contexts_line(&mut lines, cols, WHAT)?;
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        let mut current = 0usize;
        let mut last: Option<(u32, u32)> = None;
        for (i, line) in lines {
            let line = line?;
            let lineno = i + 1;
            let p: Vec<&str> = line.split_whitespace().collect();
            if p.len() != 3 {
                return Err(Error::format(WHAT, lineno, "expected 3 fields"));
            }
            let r: u32 = parse_field(p[0], WHAT, lineno)?;
            let c: u32 = parse_field(p[1], WHAT, lineno)?;
            let v: f64 = parse_field(p[2], WHAT, lineno)?;
            if r as usize >= rows || c as usize >= cols {
                return Err(Error::format(WHAT, lineno, "cell outside matrix"));
            }
            if last.is_some_and(|l| l >= (r, c)) {
                return Err(Error::format(WHAT, lineno, "cells not sorted by (row, col)"));
            }
            last = Some((r, c));
            while current < r as usize {
                current += 1;
                row_ptr[current] = col_idx.len();
            }
            col_idx.push(c);
            values.push(v);
        }
        while current < rows {
            current += 1;
            row_ptr[current] = col_idx.len();
        }
        if values.len() != nnz {
            return Err(Error::format(
                WHAT,
                values.len() + 1,
                format!("header announces {} cells, found {}", nnz, values.len()),
            ));
        }
        Ok(WeightedMatrix {
            scheme,
            rows,
            context_ids,
            row_ptr,
            col_idx,
            values,
            total,
        })
    }
}

fn map_cells(
    m: &CoocMatrix,
    scheme: Scheme,
    mut cell: impl FnMut(usize, usize, u64) -> f64,
) -> Result<WeightedMatrix> {
    let (row_ptr, col_idx, counts) = m.csr();
    let mut out_ptr = Vec::with_capacity(m.rows() + 1);
    let mut out_cols = Vec::with_capacity(counts.len());
    let mut out_vals = Vec::with_capacity(counts.len());
    out_ptr.push(0);
    for r in 0..m.rows() {
        for k in row_ptr[r]..row_ptr[r + 1] {
            let v = cell(r, col_idx[k] as usize, counts[k]);
            if !v.is_finite() {
                return Err(Error::Degenerate(format!(
                    "non-finite weight at ({}, {})",
                    r, col_idx[k]
                )));
            }
            if v > 0.0 || matches!(scheme, Scheme::Co) {
                out_cols.push(col_idx[k]);
                out_vals.push(v);
            }
        }
        out_ptr.push(out_cols.len());
    }
    Ok(WeightedMatrix {
        scheme,
        rows: m.rows(),
        context_ids: m.context_ids().to_vec(),
        row_ptr: out_ptr,
        col_idx: out_cols,
        values: out_vals,
        total: m.total(),
    })
}

pub fn apply_co(m: &CoocMatrix) -> WeightedMatrix {
    map_cells(m, Scheme::Co, |_, _, f| f as f64).expect("counts are finite")
}

/// `max(0, ln(f_ab·T / (f_a·f_b)))` over stored cells, with marginals and `T`
/// taken from the matrix itself. Cells clipped to zero are not stored.
pub fn apply_ppmi(m: &CoocMatrix) -> Result<WeightedMatrix> {
    if m.total() == 0 {
        return Err(Error::Degenerate("PPMI of a matrix with T = 0".into()));
    }
    let t = m.total() as f64;
    let fa = m.row_marginals();
    let fb = m.col_marginals();
    map_cells(m, Scheme::Ppmi, |a, b, fab| {
        ppmi_cell(fab as f64, fa[a] as f64, fb[b] as f64, t)
    })
}

#[inline]
pub fn ppmi_cell(fab: f64, fa: f64, fb: f64, t: f64) -> f64 {
    ((fab * t) / (fa * fb)).ln().max(0.0)
}

/// PPMI with the context probability replaced by `f_b^α / Σ f_b^α`.
pub fn apply_smoothed_ppmi(m: &CoocMatrix, alpha: f64) -> Result<WeightedMatrix> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("smoothing exponent must be positive"));
    }
    if m.total() == 0 {
        return Err(Error::Degenerate("PPMI of a matrix with T = 0".into()));
    }
    let t = m.total() as f64;
    let fa = m.row_marginals();
    let smoothed: Vec<f64> = m.col_marginals().iter().map(|&f| (f as f64).powf(alpha)).collect();
    let norm: f64 = smoothed.iter().sum();
    map_cells(m, Scheme::Sppmi { alpha }, |a, b, fab| {
        let p_ab = fab as f64 / t;
        let p_a = fa[a] as f64 / t;
        let p_b = smoothed[b] / norm;
        (p_ab / (p_a * p_b)).ln().max(0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn co_is_identity() {
        let m = CoocMatrix::from_triples(2, 2, [(0, 0, 3), (1, 1, 1)]).unwrap();
        let w = apply_co(&m);
        assert_eq!(w.get(0, 0), 3.0);
        assert_eq!(w.get(1, 1), 1.0);
        assert_eq!(w.nnz(), 2);
        let empty = CoocMatrix::from_triples(0, 0, []).unwrap();
        assert_eq!(apply_co(&empty).nnz(), 0);
    }

    #[test]
    fn ppmi_cell_values() {
        assert_eq!(ppmi_cell(2.0, 4.0, 10.0, 20.0), 0.0);
        assert_relative_eq!(ppmi_cell(2.0, 4.0, 5.0, 20.0), 2f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(ppmi_cell(2.0, 4.0, 5.0, 20.0), 0.6931, epsilon = 1e-4);
        assert_eq!(ppmi_cell(1.0, 10.0, 10.0, 20.0), 0.0);
    }

    #[test]
    fn ppmi_rejects_empty_total() {
        let m = CoocMatrix::from_triples(1, 1, []).unwrap();
        assert!(matches!(apply_ppmi(&m), Err(Error::Degenerate(_))));
    }

    #[test]
    fn sppmi_alpha_one_matches_ppmi() {
        let m = CoocMatrix::from_triples(
            3,
            3,
            [(0, 1, 5), (1, 0, 5), (1, 2, 1), (2, 1, 1), (2, 2, 7), (0, 0, 2)],
        )
        .unwrap();
        let p = apply_ppmi(&m).unwrap();
        let s = apply_smoothed_ppmi(&m, 1.0).unwrap();
        assert_eq!(p.nnz(), s.nnz());
        for (a, b) in p.triples().zip(s.triples()) {
            assert_eq!((a.0, a.1), (b.0, b.1));
            assert_relative_eq!(a.2, b.2, max_relative = 1e-12);
        }
        assert!(apply_smoothed_ppmi(&m, 0.0).is_err());
    }

    #[test]
    fn sppmi_single_context_reduces() {
        let m = CoocMatrix::from_triples(2, 1, [(0, 0, 3), (1, 0, 1)]).unwrap();
        for alpha in [0.25, 0.75, 2.0] {
            let s = apply_smoothed_ppmi(&m, alpha).unwrap();
            // f(b) = 1, so the cell is ln(f_ab / f_a) = ln 1 = 0
            assert_eq!(s.nnz(), 0);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let m = CoocMatrix::from_triples(
            3,
            3,
            [(0, 1, 5), (1, 0, 5), (1, 2, 1), (2, 1, 1), (2, 2, 7), (0, 0, 2)],
        )
        .unwrap();
        for w in [apply_co(&m), apply_ppmi(&m).unwrap(), apply_smoothed_ppmi(&m, 0.75).unwrap()] {
            let mut buf = Vec::new();
            w.write(&mut buf).unwrap();
            let back = WeightedMatrix::read(&buf[..]).unwrap();
            assert_eq!(back, w);
        }
    }
}
