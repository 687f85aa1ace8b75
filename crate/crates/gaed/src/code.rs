//! Linear block codes, Tanner graphs, and parity-check-matrix file formats.
//!
//! Two interchange formats are supported: the alist format used by public
//! code databases, and a dense 0/1 text format (`"m n"` header followed by
//! `m` space-separated rows) used for transformation matrices and as an
//! alternative PCM format.

use crate::gf2::{BitMatrix, BitVector};
use crate::Error;

/// A binary linear code given by a parity-check matrix.
///
/// The dimension `k` is derived from the rank of `h`, never from file
/// metadata, so PCMs with redundant rows are handled correctly.
#[derive(Clone, Debug)]
pub struct LinearCode {
    h: BitMatrix,
    rank: usize,
    generator: Vec<BitVector>,
}

impl LinearCode {
    pub fn from_pcm(h: BitMatrix) -> Result<Self, Error> {
        let rank = h.rank();
        let k = h.cols() - rank;
        if k == 0 {
            return Err(Error::InvalidCode(format!(
                "PCM has full column rank {rank}; the code contains only the zero word"
            )));
        }
        let generator = h.null_space_basis();
        debug_assert_eq!(generator.len(), k);
        Ok(LinearCode { h, rank, generator })
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Code dimension, `n - rank(h)`.
    pub fn k(&self) -> usize {
        self.n() - self.rank
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Basis of the null space of `h`.
    pub fn generator(&self) -> &[BitVector] {
        &self.generator
    }

    pub fn is_codeword(&self, x: &BitVector) -> bool {
        syndrome(&self.h, x).is_zero()
    }

    /// Codeword for an information word expressed in the generator basis.
    pub fn encode(&self, info_bits: &BitVector) -> BitVector {
        assert_eq!(info_bits.len(), self.k(), "information word length mismatch");
        let mut x = BitVector::zeros(self.n());
        for i in info_bits.ones() {
            x.xor_assign(&self.generator[i]);
        }
        x
    }

    /// Minimum distance by brute-force enumeration; refuses k above the
    /// enumeration cap.
    pub fn min_distance(&self) -> Result<usize, Error> {
        crate::gf2::min_distance_bruteforce(&self.generator)
    }
}

/// Syndrome `h * x` over GF(2); `x` is a codeword iff the result is zero.
pub fn syndrome(h: &BitMatrix, x: &BitVector) -> BitVector {
    h.mul_vec(x)
}

/// Bipartite check/variable adjacency of a parity-check matrix.
///
/// Edges are numbered in check-node-major order so that each check node owns
/// a contiguous edge range; both adjacency lists are sorted ascending.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    vn_count: usize,
    cn_count: usize,
    cn_neighbors: Vec<Vec<usize>>,
    vn_neighbors: Vec<Vec<usize>>,
    cn_edge_start: Vec<usize>,
    vn_edges: Vec<Vec<usize>>,
    edge_vn: Vec<usize>,
}

impl TannerGraph {
    pub fn from_pcm(h: &BitMatrix) -> Self {
        let cn_count = h.rows();
        let vn_count = h.cols();
        let mut cn_neighbors = Vec::with_capacity(cn_count);
        let mut vn_neighbors = vec![Vec::new(); vn_count];
        for c in 0..cn_count {
            let support = h.row_support(c);
            for &v in &support {
                vn_neighbors[v].push(c);
            }
            cn_neighbors.push(support);
        }
        let mut cn_edge_start = Vec::with_capacity(cn_count + 1);
        let mut edge_vn = Vec::new();
        let mut vn_edges = vec![Vec::new(); vn_count];
        let mut next = 0;
        for c in 0..cn_count {
            cn_edge_start.push(next);
            for &v in &cn_neighbors[c] {
                vn_edges[v].push(next);
                edge_vn.push(v);
                next += 1;
            }
        }
        cn_edge_start.push(next);
        TannerGraph {
            vn_count,
            cn_count,
            cn_neighbors,
            vn_neighbors,
            cn_edge_start,
            vn_edges,
            edge_vn,
        }
    }

    pub fn vn_count(&self) -> usize {
        self.vn_count
    }

    pub fn cn_count(&self) -> usize {
        self.cn_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_vn.len()
    }

    /// Variable nodes incident to check node `c`, ascending.
    pub fn cn_neighbors(&self, c: usize) -> &[usize] {
        &self.cn_neighbors[c]
    }

    /// Check nodes incident to variable node `v`, ascending.
    pub fn vn_neighbors(&self, v: usize) -> &[usize] {
        &self.vn_neighbors[v]
    }

    /// Edge ids owned by check node `c` (contiguous, one per neighbor).
    pub fn cn_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.cn_edge_start[c]..self.cn_edge_start[c + 1]
    }

    /// Edge ids incident to variable node `v`.
    pub fn vn_edges(&self, v: usize) -> &[usize] {
        &self.vn_edges[v]
    }

    /// Variable node at the far end of edge `e`.
    pub fn edge_vn(&self, e: usize) -> usize {
        self.edge_vn[e]
    }

    /// Edge id for the pair `(c, v)`, if present.
    pub fn edge_index(&self, c: usize, v: usize) -> Option<usize> {
        let pos = self.cn_neighbors[c].binary_search(&v).ok()?;
        Some(self.cn_edge_start[c] + pos)
    }

    /// Rebuilds the parity-check matrix this graph was built from.
    pub fn to_pcm(&self) -> BitMatrix {
        let mut h = BitMatrix::zeros(self.cn_count.max(1), self.vn_count.max(1));
        for c in 0..self.cn_count {
            for &v in &self.cn_neighbors[c] {
                h.set(c, v, true);
            }
        }
        h
    }
}

struct Lines<'a> {
    inner: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines(),
            line_no: 0,
        }
    }

    /// Next non-blank line as whitespace-separated numbers.
    fn numbers(&mut self, what: &str) -> Result<(usize, Vec<usize>), Error> {
        loop {
            let line = self.inner.next().ok_or_else(|| {
                Error::parse(self.line_no + 1, format!("unexpected end of file, expected {what}"))
            })?;
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut values = Vec::new();
            for tok in line.split_whitespace() {
                let v = tok.parse::<usize>().map_err(|_| {
                    Error::parse(self.line_no, format!("expected {what}, found {tok:?}"))
                })?;
                values.push(v);
            }
            return Ok((self.line_no, values));
        }
    }
}

/// Parses a parity-check matrix in alist format.
///
/// Layout: `n m`, max column/row degrees, the column then row degree lists,
/// `n` per-column neighbor lists and `m` per-row neighbor lists (1-based;
/// zero entries are padding). Column and row lists are cross-validated.
pub fn parse_alist(text: &str) -> Result<BitMatrix, Error> {
    let mut lines = Lines::new(text);

    let (ln, header) = lines.numbers("the 'n m' header")?;
    if header.len() != 2 {
        return Err(Error::parse(ln, "header must contain exactly 'n m'"));
    }
    let (n, m) = (header[0], header[1]);
    if n == 0 || m == 0 {
        return Err(Error::parse(ln, "matrix dimensions must be positive"));
    }

    let (ln, max_degs) = lines.numbers("the max degree line")?;
    if max_degs.len() != 2 {
        return Err(Error::parse(ln, "expected two max degrees"));
    }

    let (ln, col_degs) = lines.numbers("column degrees")?;
    if col_degs.len() != n {
        return Err(Error::parse(ln, format!("expected {n} column degrees, found {}", col_degs.len())));
    }
    let (ln, row_degs) = lines.numbers("row degrees")?;
    if row_degs.len() != m {
        return Err(Error::parse(ln, format!("expected {m} row degrees, found {}", row_degs.len())));
    }

    let mut h = BitMatrix::zeros(m, n);
    for (col, &deg) in col_degs.iter().enumerate() {
        let (ln, entries) = lines.numbers("a column neighbor list")?;
        let rows: Vec<usize> = entries.iter().copied().filter(|&e| e != 0).collect();
        if rows.len() != deg {
            return Err(Error::parse(
                ln,
                format!("column {} lists {} neighbors but declares degree {deg}", col + 1, rows.len()),
            ));
        }
        for r in rows {
            if r > m {
                return Err(Error::parse(ln, format!("row index {r} out of range 1..={m}")));
            }
            h.set(r - 1, col, true);
        }
    }

    for (row, &deg) in row_degs.iter().enumerate() {
        let (ln, entries) = lines.numbers("a row neighbor list")?;
        let cols: Vec<usize> = entries.iter().copied().filter(|&e| e != 0).collect();
        if cols.len() != deg {
            return Err(Error::parse(
                ln,
                format!("row {} lists {} neighbors but declares degree {deg}", row + 1, cols.len()),
            ));
        }
        let mut seen = vec![false; n];
        for c in &cols {
            if *c > n {
                return Err(Error::parse(ln, format!("column index {c} out of range 1..={n}")));
            }
            seen[c - 1] = true;
        }
        for c in 0..n {
            if h.get(row, c) != seen[c] {
                return Err(Error::parse(
                    ln,
                    format!(
                        "row {} disagrees with the column lists at column {}",
                        row + 1,
                        c + 1
                    ),
                ));
            }
        }
    }

    Ok(h)
}

/// Serializes a matrix to alist text (column lists padded with zeros).
pub fn write_alist(h: &BitMatrix) -> String {
    let (m, n) = (h.rows(), h.cols());
    let col_support: Vec<Vec<usize>> = (0..n)
        .map(|c| (0..m).filter(|&r| h.get(r, c)).collect())
        .collect();
    let row_support: Vec<Vec<usize>> = (0..m).map(|r| h.row_support(r)).collect();
    let max_col = col_support.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_support.iter().map(Vec::len).max().unwrap_or(0);

    let mut out = String::new();
    out.push_str(&format!("{n} {m}\n{max_col} {max_row}\n"));
    out.push_str(&join(col_support.iter().map(Vec::len)));
    out.push('\n');
    out.push_str(&join(row_support.iter().map(Vec::len)));
    out.push('\n');
    for support in &col_support {
        let mut entries: Vec<usize> = support.iter().map(|&r| r + 1).collect();
        // Degree-0 lists still need one explicit padding zero, otherwise the
        // line would be blank.
        entries.resize(max_col.max(1), 0);
        out.push_str(&join(entries.into_iter()));
        out.push('\n');
    }
    for support in &row_support {
        let mut entries: Vec<usize> = support.iter().map(|&c| c + 1).collect();
        entries.resize(max_row.max(1), 0);
        out.push_str(&join(entries.into_iter()));
        out.push('\n');
    }
    out
}

fn join(values: impl Iterator<Item = usize>) -> String {
    values
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses the dense 0/1 text format: a `"m n"` header line, then `m` rows of
/// `n` space-separated binary entries.
pub fn parse_dense(text: &str) -> Result<BitMatrix, Error> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines.numbers("the 'm n' header")?;
    if header.len() != 2 {
        return Err(Error::parse(ln, "header must contain exactly 'm n'"));
    }
    let (m, n) = (header[0], header[1]);
    if m == 0 || n == 0 {
        return Err(Error::parse(ln, "matrix dimensions must be positive"));
    }
    let mut h = BitMatrix::zeros(m, n);
    for r in 0..m {
        let (ln, entries) = lines.numbers("a matrix row")?;
        if entries.len() != n {
            return Err(Error::parse(
                ln,
                format!("row {} has {} entries, expected {n}", r + 1, entries.len()),
            ));
        }
        for (c, &e) in entries.iter().enumerate() {
            match e {
                0 => {}
                1 => h.set(r, c, true),
                other => {
                    return Err(Error::parse(ln, format!("entry must be 0 or 1, found {other}")))
                }
            }
        }
    }
    Ok(h)
}

/// Serializes a matrix to the dense 0/1 text format.
pub fn write_dense(h: &BitMatrix) -> String {
    let mut out = format!("{} {}\n", h.rows(), h.cols());
    for r in 0..h.rows() {
        out.push_str(&join((0..h.cols()).map(|c| usize::from(h.get(r, c)))));
        out.push('\n');
    }
    out
}

/// Loads a PCM from a file, choosing the parser by extension: `.alist` uses
/// the alist format, anything else the dense text format.
pub fn load_pcm(path: &std::path::Path) -> Result<BitMatrix, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    if path.extension().and_then(|e| e.to_str()) == Some("alist") {
        parse_alist(&text)
    } else {
        parse_dense(&text)
    }
}
