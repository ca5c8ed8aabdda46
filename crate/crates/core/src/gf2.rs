//! Dense GF(2) matrices with bit-packed rows.
//!
//! Rows are stored as `u64` words, least significant bit first. Every
//! elimination routine picks the leftmost pivot column and, within it, the
//! first row holding a one, so results are reproducible bit for bit.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

/// Output of [`BitMatrix::systematic_form`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystematicForm {
    /// `permutation[i]` is the original column placed at position `i`.
    pub permutation: Vec<usize>,
    /// `rank × cols` matrix in permuted column order; its first `rank`
    /// columns are the identity.
    pub reduced: BitMatrix,
    /// Pivot columns in original indexing, ascending.
    pub pivots: Vec<usize>,
    /// Number of linearly dependent rows removed.
    pub dropped_rows: usize,
}

impl SystematicForm {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl BitMatrix {
    /// All-zero matrix. Zero rows are allowed (an empty basis).
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 values; all rows must share a length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(r, c, true),
                    _ => return Err(Error::OutOfRange(format!("entry {b} is not a bit"))),
                }
            }
        }
        Ok(m)
    }

    /// Parses rows written as strings of `0`/`1` characters.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let bits: Vec<Vec<u8>> = rows
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::parse(i + 1, format!("unexpected character {c:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(&bits)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.words[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.words[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// Row `r` as a vector of 0/1 bytes.
    pub fn row(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c) as u8).collect()
    }

    /// Column indices holding a one in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * WORD + b);
                w &= w - 1;
            }
        }
        out
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn xor_row(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        if src == dst {
            self.words[dst * s..(dst + 1) * s].fill(0);
            return;
        }
        let (a, b) = if src < dst {
            let (lo, hi) = self.words.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.words.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, v) in b.iter_mut().zip(a) {
            *d ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for i in 0..s {
            self.words.swap(a * s + i, b * s + i);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in self.row_support(r) {
                let src = other.row_words(k);
                let dst = &mut out.words[r * out.stride..(r + 1) * out.stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `m · v` with `v` given as 0/1 bytes.
    pub fn mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut packed = vec![0u64; self.stride];
        for (i, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                packed[i / WORD] |= 1 << (i % WORD);
            }
        }
        Ok((0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect())
    }

    /// Reduced row echelon form in place. Returns the pivot columns; rows
    /// past `pivots.len()` are zero afterwards.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    self.xor_row(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Row-reduces and permutes columns so the pivots come first.
    pub fn systematic_form(&self) -> SystematicForm {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let rank = pivots.len();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let permutation: Vec<usize> = pivots
            .iter()
            .copied()
            .chain((0..self.cols).filter(|&c| !is_pivot[c]))
            .collect();
        let mut reduced = BitMatrix::zeros(rank, self.cols);
        for r in 0..rank {
            for (new_c, &old_c) in permutation.iter().enumerate() {
                if m.get(r, old_c) {
                    reduced.set(r, new_c, true);
                }
            }
        }
        SystematicForm {
            permutation,
            reduced,
            pivots,
            dropped_rows: self.rows - rank,
        }
    }

    /// Basis of `{v : self · vᵀ = 0}`, one basis vector per row.
    pub fn null_space_basis(&self) -> BitMatrix {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = BitMatrix::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            basis.set(i, f, true);
            for (r, &p) in pivots.iter().enumerate() {
                if m.get(r, f) {
                    basis.set(i, p, true);
                }
            }
        }
        basis
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut words = self.words.clone();
        words.extend_from_slice(&other.words);
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            words,
        })
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let s: String = (0..self.cols)
                .map(|c| if self.get(r, c) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hamming_g() -> BitMatrix {
        BitMatrix::from_strs(&["100110", "010101", "001011"]).unwrap()
    }

    fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> BitMatrix {
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, rng.random_bool(0.5));
            }
        }
        m
    }

    fn naive_mul_vec(m: &BitMatrix, v: &[u8]) -> Vec<u8> {
        (0..m.rows())
            .map(|r| {
                let mut acc = 0u8;
                for c in 0..m.cols() {
                    acc ^= (m.get(r, c) as u8) & v[c];
                }
                acc
            })
            .collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(hamming_g().rank(), 3);
        assert_eq!(BitMatrix::identity(7).rank(), 7);
        assert_eq!(BitMatrix::zeros(4, 6).rank(), 0);
    }

    #[test]
    fn systematic_form_of_systematic_input_is_identity() {
        let g = hamming_g();
        let sf = g.systematic_form();
        assert_eq!(sf.permutation, (0..6).collect::<Vec<_>>());
        assert_eq!(sf.reduced, g);
        assert_eq!(sf.dropped_rows, 0);
    }

    #[test]
    fn systematic_form_reports_dependent_rows() {
        let m = BitMatrix::from_strs(&["1100", "0110", "1010"]).unwrap();
        let sf = m.systematic_form();
        assert_eq!(sf.rank(), 2);
        assert_eq!(sf.dropped_rows, 1);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(sf.reduced.get(r, c), r == c);
            }
        }
    }

    // Builds a generator from the systematic form and checks every codeword it
    // spans against the original checks.
    #[test]
    fn systematic_form_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let h = random_matrix(&mut rng, 3, 6);
            let sf = h.systematic_form();
            let rank = sf.rank();
            let k = 6 - rank;
            for msg in 0u32..(1 << k) {
                // permuted-order codeword: parity part = P · msg
                let mut permuted = vec![0u8; 6];
                for i in 0..k {
                    permuted[rank + i] = ((msg >> i) & 1) as u8;
                }
                for r in 0..rank {
                    let mut acc = 0;
                    for i in 0..k {
                        acc ^= (sf.reduced.get(r, rank + i) as u8) & permuted[rank + i];
                    }
                    permuted[r] = acc;
                }
                let mut word = vec![0u8; 6];
                for (i, &orig) in sf.permutation.iter().enumerate() {
                    word[orig] = permuted[i];
                }
                assert!(h.mul_vec(&word).unwrap().iter().all(|&b| b == 0));
            }
        }
    }

    #[test]
    fn mul_vec_examples() {
        let v = vec![1, 0, 1, 1, 0];
        assert_eq!(BitMatrix::identity(5).mul_vec(&v).unwrap(), v);
        let h = BitMatrix::from_strs(&["110100", "101010", "011001"]).unwrap();
        let codebook = [
            "000000", "001011", "010101", "011110", "100110", "101101", "110011", "111000",
        ];
        for cw in codebook {
            let bits: Vec<u8> = cw.bytes().map(|b| b - b'0').collect();
            assert_eq!(h.mul_vec(&bits).unwrap(), vec![0, 0, 0]);
        }
        assert!(matches!(
            h.mul_vec(&[0, 1]),
            Err(Error::DimensionMismatch { expected: 6, got: 2 })
        ));
    }

    #[test]
    fn mul_vec_matches_naive_across_word_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for &(r, c) in &[(3, 6), (10, 64), (7, 65), (20, 130)] {
            let m = random_matrix(&mut rng, r, c);
            let v: Vec<u8> = (0..c).map(|_| rng.random_range(0..2)).collect();
            assert_eq!(m.mul_vec(&v).unwrap(), naive_mul_vec(&m, &v));
        }
    }

    #[test]
    fn null_space_of_hamming_parity_spans_codebook() {
        // [Pᵀ | I] for the (6,3) code
        let h = BitMatrix::from_strs(&["110100", "101010", "011001"]).unwrap();
        let basis = h.null_space_basis();
        assert_eq!(basis.rows(), 3);
        let mut span = std::collections::BTreeSet::new();
        for msg in 0..8u8 {
            let mut word = vec![0u8; 6];
            for i in 0..3 {
                if msg >> i & 1 == 1 {
                    for (w, b) in word.iter_mut().zip(basis.row(i)) {
                        *w ^= b;
                    }
                }
            }
            span.insert(word);
        }
        let expected: std::collections::BTreeSet<Vec<u8>> = [
            "000000", "001011", "010101", "011110", "100110", "101101", "110011", "111000",
        ]
        .iter()
        .map(|s| s.bytes().map(|b| b - b'0').collect())
        .collect();
        assert_eq!(span, expected);
    }

    #[test]
    fn null_space_of_identity_is_empty() {
        assert_eq!(BitMatrix::identity(4).null_space_basis().rows(), 0);
    }

    // Exhaustive: the basis spans exactly the kernel found by brute force.
    #[test]
    fn null_space_random_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..40 {
            let rows = rng.random_range(1..8);
            let cols = rng.random_range(1..=12);
            let h = random_matrix(&mut rng, rows, cols);
            let basis = h.null_space_basis();
            let kernel_size = (0u32..(1 << cols))
                .filter(|x| {
                    let v: Vec<u8> = (0..cols).map(|i| ((x >> i) & 1) as u8).collect();
                    h.mul_vec(&v).unwrap().iter().all(|&b| b == 0)
                })
                .count();
            assert_eq!(1usize << basis.rows(), kernel_size);
            assert_eq!(basis.rank(), basis.rows());
            for r in 0..basis.rows() {
                assert!(h.mul_vec(&basis.row(r)).unwrap().iter().all(|&b| b == 0));
            }
        }
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (1usize..12, 1usize..80).prop_flat_map(|(r, c)| {
            proptest::collection::vec(0u8..2, r * c).prop_map(move |bits| {
                let rows: Vec<Vec<u8>> = bits.chunks(c).map(|x| x.to_vec()).collect();
                BitMatrix::from_rows(&rows).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_nullity(m in arb_matrix()) {
            prop_assert_eq!(m.rank() + m.null_space_basis().rows(), m.cols());
        }
    }
}
