//! Dense GF(2) linear algebra on bit-packed matrices and vectors.
//!
//! Rows are packed into `u64` words so that row operations (the workhorse of
//! multiplication, elimination and syndrome checks) run word-at-a-time.

use std::cmp::Ordering;
use std::fmt;

use crate::Error;

/// Codeword-enumeration budget for brute-force operations (2^20 codewords).
pub const ENUMERATION_CAP_K: usize = 20;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A binary vector with bit-packed storage, bit `i` at word `i / 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitVector length must be at least 1");
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // len >= 1 by construction
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "BitVector length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter_bits().map(u8::from).collect()
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "BitVector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on the bit sequence (b_0, b_1, ..., b_{n-1}).
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.len, other.len, "BitVector length mismatch in cmp");
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if (a >> bit) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// A dense binary matrix with row-major bit-packed storage.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "BitMatrix must be at least 1x1");
        let words_per_row = words_for(cols);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from 0/1 row slices; all rows must share one length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        assert!(!rows.is_empty(), "BitMatrix needs at least one row");
        let cols = rows[0].len();
        let mut m = BitMatrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows in BitMatrix::from_rows");
            for (c, &b) in row.iter().enumerate() {
                debug_assert!(b <= 1);
                if b != 0 {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.words[r * self.words_per_row + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let idx = r * self.words_per_row + c / WORD_BITS;
        let mask = 1u64 << (c % WORD_BITS);
        if value {
            self.words[idx] |= mask;
        } else {
            self.words[idx] &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    /// XORs row `src` onto row `dst` in place.
    pub fn xor_rows(&mut self, src: usize, dst: usize) {
        assert!(src < self.rows && dst < self.rows && src != dst);
        let (s, d) = (src * self.words_per_row, dst * self.words_per_row);
        for w in 0..self.words_per_row {
            let v = self.words[s + w];
            self.words[d + w] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (a0, b0) = (a * self.words_per_row, b * self.words_per_row);
        for w in 0..self.words_per_row {
            self.words.swap(a0 + w, b0 + w);
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c)).collect()
    }

    /// Total number of ones.
    pub fn count_ones(&self) -> usize {
        (0..self.rows).map(|r| self.row_weight(r)).sum()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Matrix product over GF(2); panics on inner-dimension mismatch.
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "GF(2) matrix product dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let d = r * out.words_per_row;
            for k in 0..self.cols {
                if self.get(r, k) {
                    let s = k * rhs.words_per_row;
                    for w in 0..rhs.words_per_row {
                        out.words[d + w] ^= rhs.words[s + w];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product over GF(2); panics on dimension mismatch.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(
            self.cols,
            v.len(),
            "GF(2) matrix-vector product dimension mismatch: {}x{} * {}",
            self.rows,
            self.cols,
            v.len()
        );
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(&v.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Row rank via Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        row_reduce(&mut work).len()
    }

    /// Inverse over GF(2), or `None` if singular; panics if not square.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert!(self.is_square(), "inverse requires a square matrix");
        let n = self.rows;
        // Eliminate on [A | I]; the right block becomes A^-1 once A reaches I.
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                if self.get(r, c) {
                    aug.set(r, c, true);
                }
            }
            aug.set(r, n + r, true);
        }
        let mut rank = 0;
        for col in 0..n {
            let pivot = (rank..n).find(|&r| aug.get(r, col))?;
            aug.swap_rows(pivot, rank);
            for r in 0..n {
                if r != rank && aug.get(r, col) {
                    aug.xor_rows(rank, r);
                }
            }
            rank += 1;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                if aug.get(r, n + c) {
                    inv.set(r, c, true);
                }
            }
        }
        Some(inv)
    }

    /// A basis of the right null space `{v : self * v = 0}`.
    ///
    /// Basis size is `cols - rank`; vectors come out in ascending order of
    /// their free-column index, so the basis is reproducible.
    pub fn null_space_basis(&self) -> Vec<BitVector> {
        let mut rref = self.clone();
        let pivots = row_reduce(&mut rref);
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = BitVector::zeros(self.cols);
            v.set(free, true);
            for (row, &pcol) in pivots.iter().enumerate() {
                if rref.get(row, free) {
                    v.set(pcol, true);
                }
            }
            debug_assert!(self.mul_vec(&v).is_zero());
            basis.push(v);
        }
        basis
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            if r > 0 {
                writeln!(f)?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
        }
        Ok(())
    }
}

/// In-place reduction to reduced row echelon form; returns pivot columns.
///
/// Pivot selection is deterministic: scan columns left to right, take the
/// first unused row with a one in the column.
fn row_reduce(m: &mut BitMatrix) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
            continue;
        };
        m.swap_rows(pivot, rank);
        for r in 0..m.rows {
            if r != rank && m.get(r, col) {
                m.xor_rows(rank, r);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.rows {
            break;
        }
    }
    pivots
}

/// Minimum Hamming weight over the nonzero span of `generators`.
///
/// Enumerates all 2^k - 1 nonzero combinations in Gray-code order; refuses
/// k above [`ENUMERATION_CAP_K`] rather than truncating.
pub fn min_distance_bruteforce(generators: &[BitVector]) -> Result<usize, Error> {
    let k = generators.len();
    if k == 0 || k > ENUMERATION_CAP_K {
        return Err(Error::EnumerationTooLarge {
            k,
            cap: ENUMERATION_CAP_K,
        });
    }
    let mut current = BitVector::zeros(generators[0].len());
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << k) {
        current.xor_assign(&generators[i.trailing_zeros() as usize]);
        best = best.min(current.weight());
    }
    Ok(best)
}

/// Iterates every codeword in the span of `generators` (2^k of them,
/// starting from zero) in Gray-code order, calling `f` on each.
pub fn for_each_codeword(generators: &[BitVector], mut f: impl FnMut(&BitVector)) {
    assert!(
        generators.len() <= ENUMERATION_CAP_K,
        "codeword enumeration capped at 2^{ENUMERATION_CAP_K}"
    );
    assert!(!generators.is_empty());
    let mut current = BitVector::zeros(generators[0].len());
    f(&current);
    for i in 1u64..(1u64 << generators.len()) {
        current.xor_assign(&generators[i.trailing_zeros() as usize]);
        f(&current);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_example() -> BitMatrix {
        BitMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 1], vec![1, 0, 1]])
    }

    fn h_example() -> BitMatrix {
        BitMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 0]])
    }

    #[test]
    fn identity_multiplication_is_neutral() {
        let a = t_example();
        assert_eq!(BitMatrix::identity(3).mul(&a), a);
        assert_eq!(a.mul(&BitMatrix::identity(3)), a);
    }

    #[test]
    fn mul_vec_matches_hand_evaluation() {
        let x = BitVector::from_bits(&[1, 0, 1]);
        assert_eq!(t_example().mul_vec(&x), BitVector::from_bits(&[1, 1, 0]));
        assert_eq!(h_example().mul_vec(&x), BitVector::from_bits(&[0, 0]));
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mul_rejects_mismatched_dimensions() {
        let _ = h_example().mul(&h_example());
    }

    #[test]
    fn inverse_of_identity() {
        let i3 = BitMatrix::identity(3);
        assert_eq!(i3.inverse().unwrap(), i3);
    }

    #[test]
    fn inverse_of_example_matrix() {
        let expected =
            BitMatrix::from_rows(&[vec![1, 0, 0], vec![1, 1, 1], vec![1, 0, 1]]);
        let inv = t_example().inverse().unwrap();
        assert_eq!(inv, expected);
        assert_eq!(t_example().mul(&inv), BitMatrix::identity(3));
        assert_eq!(inv.mul(&t_example()), BitMatrix::identity(3));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]]);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn null_space_of_single_parity_check() {
        let h = BitMatrix::from_rows(&[vec![1, 1]]);
        let basis = h.null_space_basis();
        assert_eq!(basis, vec![BitVector::from_bits(&[1, 1])]);
    }

    #[test]
    fn null_space_of_example_pcm() {
        let basis = h_example().null_space_basis();
        assert_eq!(basis, vec![BitVector::from_bits(&[1, 0, 1])]);
    }

    fn hamming_7_4() -> BitMatrix {
        // Columns are the nonzero vectors of F_2^3 (1..7 in binary).
        let mut h = BitMatrix::zeros(3, 7);
        for c in 0..7u32 {
            for r in 0..3 {
                if (c + 1) >> r & 1 == 1 {
                    h.set(r, c as usize, true);
                }
            }
        }
        h
    }

    #[test]
    fn hamming_null_space_has_dimension_four() {
        let h = hamming_7_4();
        let basis = h.null_space_basis();
        assert_eq!(basis.len(), 4);
        for v in &basis {
            assert!(h.mul_vec(v).is_zero());
        }
        // Stacked basis has full rank.
        let stacked = BitMatrix::from_rows(
            &basis.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        );
        assert_eq!(stacked.rank(), 4);
    }

    #[test]
    fn repetition_code_min_distance() {
        let gens = vec![BitVector::from_bits(&[1, 1, 1])];
        assert_eq!(min_distance_bruteforce(&gens).unwrap(), 3);
    }

    #[test]
    fn hamming_min_distance_is_three() {
        let basis = hamming_7_4().null_space_basis();
        assert_eq!(min_distance_bruteforce(&basis).unwrap(), 3);
    }

    #[test]
    fn min_distance_refuses_large_k() {
        let gens: Vec<BitVector> = (0..21)
            .map(|i| {
                let mut v = BitVector::zeros(32);
                v.set(i, true);
                v
            })
            .collect();
        assert!(matches!(
            min_distance_bruteforce(&gens),
            Err(Error::EnumerationTooLarge { k: 21, .. })
        ));
    }

    #[test]
    fn lexicographic_order_reads_bits_left_to_right() {
        let a = BitVector::from_bits(&[0, 1, 0]);
        let b = BitVector::from_bits(&[1, 0, 0]);
        let c = BitVector::from_bits(&[0, 0, 1]);
        assert!(a < b);
        assert!(c < a);
        assert_eq!(a.cmp(&a), Ordering::Equal);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> BitMatrix {
            let mut m = BitMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen::<bool>() {
                        m.set(r, c, true);
                    }
                }
            }
            m
        }

        #[test]
        fn inverse_product_is_identity_for_random_nonsingular() {
            let mut rng = StdRng::seed_from_u64(7);
            let mut checked = 0;
            while checked < 50 {
                let n = rng.gen_range(1..=64);
                let a = random_matrix(&mut rng, n, n);
                if let Some(inv) = a.inverse() {
                    assert_eq!(a.mul(&inv), BitMatrix::identity(n));
                    assert_eq!(inv.mul(&a), BitMatrix::identity(n));
                    checked += 1;
                }
            }
        }

        #[test]
        fn null_space_vectors_have_zero_syndrome_and_full_rank() {
            let mut rng = StdRng::seed_from_u64(8);
            for _ in 0..50 {
                let rows = rng.gen_range(1..=12);
                let cols = rng.gen_range(1..=24);
                let h = random_matrix(&mut rng, rows, cols);
                let basis = h.null_space_basis();
                assert_eq!(basis.len(), cols - h.rank());
                for v in &basis {
                    assert!(h.mul_vec(v).is_zero());
                }
                if !basis.is_empty() {
                    let stacked = BitMatrix::from_rows(
                        &basis.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                    );
                    assert_eq!(stacked.rank(), basis.len());
                }
            }
        }

        proptest! {
            #[test]
            fn mul_is_associative(seed in 0u64..500) {
                let mut rng = StdRng::seed_from_u64(seed);
                let (n, m, p, q) = (
                    rng.gen_range(1..=8),
                    rng.gen_range(1..=8),
                    rng.gen_range(1..=8),
                    rng.gen_range(1..=8),
                );
                let a = random_matrix(&mut rng, n, m);
                let b = random_matrix(&mut rng, m, p);
                let c = random_matrix(&mut rng, p, q);
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            }

            #[test]
            fn mul_distributes_over_xor(seed in 0u64..500) {
                let mut rng = StdRng::seed_from_u64(seed.wrapping_add(1000));
                let (n, m) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
                let a = random_matrix(&mut rng, n, m);
                let x = random_matrix(&mut rng, m, 1);
                let y = random_matrix(&mut rng, m, 1);
                let mut x_plus_y = x.clone();
                for r in 0..m {
                    if y.get(r, 0) {
                        let v = x_plus_y.get(r, 0);
                        x_plus_y.set(r, 0, !v);
                    }
                }
                let lhs = a.mul(&x_plus_y);
                let mut rhs = a.mul(&x);
                let ay = a.mul(&y);
                for r in 0..n {
                    if ay.get(r, 0) {
                        let v = rhs.get(r, 0);
                        rhs.set(r, 0, !v);
                    }
                }
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
