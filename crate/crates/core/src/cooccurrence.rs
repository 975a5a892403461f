//! Sparse target×context co-occurrence counts over a symmetric window.

use std::io::{BufRead, Write};

use ahash::AHashMap;

use crate::corpus::{parse_field, CorpusSlice, Vocabulary};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowConfig {
    pub half_width: usize,
    pub cross_document: bool,
}

impl WindowConfig {
    pub fn new(half_width: usize) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::param("window half-width must be at least 1"));
        }
        Ok(WindowConfig {
            half_width,
            cross_document: false,
        })
    }

    /// Offsets in application order: `-c..=-1`, then `1..=c`.
    pub fn offsets(&self) -> impl Iterator<Item = isize> {
        let c = self.half_width as isize;
        (-c..=-1).chain(1..=c)
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            half_width: 2,
            cross_document: false,
        }
    }
}

/// Compressed-row count matrix. Rows are target ids; columns are context
/// slots, each mapped back to a vocabulary id through `context_ids`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoocMatrix {
    rows: usize,
    context_ids: Vec<u32>,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    counts: Vec<u64>,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
    total: u64,
}

impl CoocMatrix {
    /// Builds a matrix from `(row, col, count)` triples; duplicates are summed
    /// and zero counts dropped.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        triples: impl IntoIterator<Item = (u32, u32, u64)>,
    ) -> Result<Self> {
        let mut by_row: Vec<Vec<(u32, u64)>> = vec![Vec::new(); rows];
        for (r, c, v) in triples {
            if r as usize >= rows || c as usize >= cols {
                return Err(Error::Integrity(format!(
                    "cell ({}, {}) outside {}x{} matrix",
                    r, c, rows, cols
                )));
            }
            by_row[r as usize].push((c, v));
        }
        Ok(Self::from_rows(rows, (0..cols as u32).collect(), by_row))
    }

    fn from_rows(rows: usize, context_ids: Vec<u32>, by_row: Vec<Vec<(u32, u64)>>) -> Self {
        let cols = context_ids.len();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut counts = Vec::new();
        row_ptr.push(0);
        for mut cells in by_row {
            cells.sort_unstable_by_key(|&(c, _)| c);
            let mut last: Option<u32> = None;
            for (c, v) in cells {
                if last == Some(c) {
                    *counts.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    counts.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let mut m = CoocMatrix {
            rows,
            context_ids,
            row_ptr,
            col_idx,
            counts,
            row_marginals: Vec::new(),
            col_marginals: vec![0; cols],
            total: 0,
        };
        m.drop_zeros();
        m.recompute_marginals();
        m
    }

    fn drop_zeros(&mut self) {
        if self.counts.iter().all(|&v| v > 0) {
            return;
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut counts = Vec::new();
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.counts[k] > 0 {
                    col_idx.push(self.col_idx[k]);
                    counts.push(self.counts[k]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.counts = counts;
    }

    fn recompute_marginals(&mut self) {
        self.row_marginals = (0..self.rows)
            .map(|r| self.counts[self.row_ptr[r]..self.row_ptr[r + 1]].iter().sum())
            .collect();
        self.col_marginals = vec![0; self.context_ids.len()];
        for (&c, &v) in self.col_idx.iter().zip(&self.counts) {
            self.col_marginals[c as usize] += v;
        }
        self.total = self.row_marginals.iter().sum();
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.context_ids.len()
    }

    pub fn nnz(&self) -> usize {
        self.counts.len()
    }

    /// Total cell mass, the `T` used by the association weightings.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn row_marginals(&self) -> &[u64] {
        &self.row_marginals
    }

    pub fn col_marginals(&self) -> &[u64] {
        &self.col_marginals
    }

    /// Vocabulary id of each context column.
    pub fn context_ids(&self) -> &[u32] {
        &self.context_ids
    }

    pub fn row(&self, r: usize) -> (&[u32], &[u64]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.counts[span])
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&(c as u32)) {
            Ok(k) => vals[k],
            Err(_) => 0,
        }
    }

    /// All stored cells in (row, col) order.
    pub fn triples(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter()
                .zip(vals)
                .map(move |(&c, &v)| (r as u32, c, v))
        })
    }

    pub(crate) fn csr(&self) -> (&[usize], &[u32], &[u64]) {
        (&self.row_ptr, &self.col_idx, &self.counts)
    }

    /// Verifies that stored marginals and total match the cells.
    pub fn check_marginals(&self) -> Result<()> {
        let mut copy = self.clone();
        copy.recompute_marginals();
        if copy.row_marginals != self.row_marginals
            || copy.col_marginals != self.col_marginals
            || copy.total != self.total
        {
            return Err(Error::Integrity("marginals disagree with cells".into()));
        }
        Ok(())
    }

    /// Writes `cooc <rows> <cols> <nnz> <T>`, an optional `contexts` line when
    /// columns are not the identity mapping, then `target context count` lines.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "cooc {} {} {} {}",
            self.rows,
            self.cols(),
            self.nnz(),
            self.total
        )?;
        write_contexts_line(&mut w, &self.context_ids)?;
        for (r, c, v) in self.triples() {
            writeln!(w, "{} {} {}", r, c, v)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().peekable();
        let header = match lines.next() {
            Some((_, l)) => l?,
            None => return Err(Error::format("cooc matrix", 1, "missing header")),
        };
        let f: Vec<&str> = header.split_whitespace().collect();
        if f.len() != 5 || f[0] != "cooc" {
            return Err(Error::format(
                "cooc matrix",
                1,
                "expected `cooc <rows> <cols> <nnz> <T>`",
            ));
        }
        let rows: usize = parse_field(f[1], "cooc matrix", 1)?;
        let cols: usize = parse_field(f[2], "cooc matrix", 1)?;
        let nnz: usize = parse_field(f[3], "cooc matrix", 1)?;
        let total: u64 = parse_field(f[4], "cooc matrix", 1)?;
        let context_ids = read_contexts_line(&mut lines, cols, "cooc matrix")?;
        let mut by_row: Vec<Vec<(u32, u64)>> = vec![Vec::new(); rows];
        let mut seen = 0;
        for (i, line) in lines {
            let line = line?;
            let lineno = i + 1;
            let p: Vec<&str> = line.split_whitespace().collect();
            if p.len() != 3 {
                return Err(Error::format("cooc matrix", lineno, "expected 3 fields"));
            }
            let r: u32 = parse_field(p[0], "cooc matrix", lineno)?;
            let c: u32 = parse_field(p[1], "cooc matrix", lineno)?;
            let v: u64 = parse_field(p[2], "cooc matrix", lineno)?;
            if r as usize >= rows || c as usize >= cols {
                return Err(Error::format("cooc matrix", lineno, "cell outside matrix"));
            }
            by_row[r as usize].push((c, v));
            seen += 1;
        }
        if seen != nnz {
            return Err(Error::format(
                "cooc matrix",
                seen + 1,
                format!("header announces {} cells, found {}", nnz, seen),
            ));
        }
        let m = Self::from_rows(rows, context_ids, by_row);
        if m.total != total {
            return Err(Error::Integrity(format!(
                "stored total {} disagrees with cell mass {}",
                total, m.total
            )));
        }
        Ok(m)
    }

    /// Dense copy, for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut d = vec![vec![0; self.cols()]; self.rows];
        for (r, c, v) in self.triples() {
            d[r as usize][c as usize] = v;
        }
        d
    }
}

pub(crate) fn write_contexts_line<W: Write>(w: &mut W, context_ids: &[u32]) -> Result<()> {
    if context_ids.iter().enumerate().any(|(i, &c)| i as u32 != c) {
        write!(w, "contexts")?;
        for c in context_ids {
            write!(w, " {}", c)?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub(crate) fn read_contexts_line<I>(
    lines: &mut std::iter::Peekable<I>,
    cols: usize,
    what: &'static str,
) -> Result<Vec<u32>>
where
    I: Iterator<Item = (usize, std::io::Result<String>)>,
{
    let is_contexts = matches!(lines.peek(), Some((_, Ok(l))) if l.starts_with("contexts"));
    if !is_contexts {
        return Ok((0..cols as u32).collect());
    }
    let (i, line) = lines.next().unwrap();
    let line = line?;
    let ids = line
        .split_whitespace()
        .skip(1)
        .map(|s| parse_field::<u32>(s, what, i + 1))
        .collect::<Result<Vec<_>>>()?;
    if ids.len() != cols {
        return Err(Error::format(what, i + 1, "contexts line length differs from cols"));
    }
    Ok(ids)
}

fn count_segments(segments: &[&[u32]], rows: usize, window: &WindowConfig) -> Vec<AHashMap<u32, u64>> {
    let mut acc: Vec<AHashMap<u32, u64>> = vec![AHashMap::new(); rows];
    let c = window.half_width;
    for seg in segments {
        for (i, &focus) in seg.iter().enumerate() {
            let lo = i.saturating_sub(c);
            let hi = (i + c).min(seg.len() - 1);
            let row = &mut acc[focus as usize];
            for (k, &ctx) in seg.iter().enumerate().take(hi + 1).skip(lo) {
                if k != i {
                    *row.entry(ctx).or_insert(0) += 1;
                }
            }
        }
    }
    acc
}

/// Counts co-occurrences of every focus token with its in-window neighbours.
pub fn count_cooccurrences(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    window: &WindowConfig,
) -> Result<CoocMatrix> {
    count_cooccurrences_sharded(slice, vocab, window, 1)
}

/// As [`count_cooccurrences`], splitting documents over `shards` threads and
/// merging the partial counts by addition. The result does not depend on
/// the shard count.
pub fn count_cooccurrences_sharded(
    slice: &CorpusSlice,
    vocab: &Vocabulary,
    window: &WindowConfig,
    shards: usize,
) -> Result<CoocMatrix> {
    if window.half_width < 1 {
        return Err(Error::param("window half-width must be at least 1"));
    }
    let rows = vocab.len();
    slice.check_ids(rows)?;
    let segments = slice.segments(window.cross_document);
    let shards = shards.max(1).min(segments.len().max(1));
    let partials: Vec<Vec<AHashMap<u32, u64>>> = if shards == 1 {
        vec![count_segments(&segments, rows, window)]
    } else {
        let chunk = segments.len().div_ceil(shards);
        std::thread::scope(|s| {
            let handles: Vec<_> = segments
                .chunks(chunk)
                .map(|part| s.spawn(move || count_segments(part, rows, window)))
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        })
    };
    let mut by_row: Vec<Vec<(u32, u64)>> = vec![Vec::new(); rows];
    for partial in partials {
        for (r, cells) in partial.into_iter().enumerate() {
            by_row[r].extend(cells);
        }
    }
    Ok(CoocMatrix::from_rows(rows, (0..rows as u32).collect(), by_row))
}

/// Keeps the `k` context columns with the largest marginals (ties to the
/// lower column). Surviving columns keep their relative order; marginals and
/// total are recomputed over the surviving cells.
pub fn prune_contexts(m: &CoocMatrix, k: usize) -> Result<CoocMatrix> {
    if k < 1 {
        return Err(Error::param("context column count must be at least 1"));
    }
    if k >= m.cols() {
        return Ok(m.clone());
    }
    let mut order: Vec<usize> = (0..m.cols()).collect();
    order.sort_by(|&a, &b| m.col_marginals[b].cmp(&m.col_marginals[a]).then(a.cmp(&b)));
    let mut keep: Vec<usize> = order[..k].to_vec();
    keep.sort_unstable();
    let mut new_col = vec![u32::MAX; m.cols()];
    for (i, &c) in keep.iter().enumerate() {
        new_col[c] = i as u32;
    }
    let context_ids = keep.iter().map(|&c| m.context_ids[c]).collect();
    let by_row = (0..m.rows)
        .map(|r| {
            let (cols, vals) = m.row(r);
            cols.iter()
                .zip(vals)
                .filter(|(&c, _)| new_col[c as usize] != u32::MAX)
                .map(|(&c, &v)| (new_col[c as usize], v))
                .collect()
        })
        .collect();
    Ok(CoocMatrix::from_rows(m.rows, context_ids, by_row))
}
