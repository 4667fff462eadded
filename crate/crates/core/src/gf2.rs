//! Dense linear algebra over GF(2).
//!
//! Vectors are row vectors packed least-significant-bit first into `u64`
//! words: bit `i` lives in word `i / 64` at position `i % 64`. Matrices are
//! stored as a list of such rows, so a row-vector product `x·A` is the XOR of
//! the rows of `A` selected by the set bits of `x`.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(width: usize) -> usize {
    width.div_ceil(WORD)
}

/// Mask selecting the low `bits` bits of a word.
pub(crate) fn low_mask(bits: usize) -> u64 {
    if bits >= WORD {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A binary row vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitRow {
    width: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(width: usize) -> Self {
        BitRow {
            width,
            words: vec![0; words_for(width)],
        }
    }

    /// Builds a row from a slice of 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            row.set(i, b & 1 == 1);
        }
        row
    }

    /// Builds a row of `width <= 64` bits from the low bits of `word`.
    pub fn from_word(word: u64, width: usize) -> Self {
        assert!(width <= WORD, "from_word supports at most 64 bits");
        BitRow {
            width,
            words: if width == 0 {
                Vec::new()
            } else {
                vec![word & low_mask(width)]
            },
        }
    }

    pub fn random<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(width)).map(|_| rng.gen()).collect();
        if let Some(last) = words.last_mut() {
            let tail = width % WORD;
            if tail != 0 {
                *last &= low_mask(tail);
            }
        }
        BitRow { width, words }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    /// The row as a single word. Only valid for widths up to 64.
    pub fn to_word(&self) -> u64 {
        assert!(self.width <= WORD, "to_word supports at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        assert_eq!(self.width, other.width, "xor of rows with different widths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitRow) -> BitRow {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Bits `start..start + len` as a new row.
    pub fn slice(&self, start: usize, len: usize) -> BitRow {
        assert!(start + len <= self.width, "slice out of range");
        let mut out = BitRow::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    /// Concatenates rows in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a BitRow>) -> BitRow {
        let parts: Vec<&BitRow> = parts.into_iter().collect();
        let width = parts.iter().map(|p| p.width).sum();
        let mut out = BitRow::zeros(width);
        let mut offset = 0;
        for part in parts {
            for i in part.iter_ones() {
                out.set(offset + i, true);
            }
            offset += part.width;
        }
        out
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.width).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitRow(")?;
        fmt::Display::fmt(self, f)?;
        write!(f, ")")
    }
}

impl fmt::Display for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense binary matrix stored row by row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitRow>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitRow::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested 0/1 rows. All rows must share a length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dims("ragged rows"));
        }
        Ok(BitMatrix {
            cols,
            rows: rows.iter().map(|r| BitRow::from_bits(r)).collect(),
        })
    }

    pub fn from_bit_rows(rows: Vec<BitRow>, cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.width() != cols) {
            return Err(Error::dims("row width differs from column count"));
        }
        Ok(BitMatrix { cols, rows })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMatrix {
            cols,
            rows: (0..rows).map(|_| BitRow::random(cols, rng)).collect(),
        }
    }

    /// Samples uniform matrices until one has full row rank.
    pub fn random_full_rank<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<Self> {
        if rows > cols {
            return Err(Error::invalid(format!(
                "cannot have full row rank with {rows} rows and {cols} columns"
            )));
        }
        loop {
            let m = BitMatrix::random(rows, cols, rng);
            if m.rank() == rows {
                return Ok(m);
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitRow {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows() != other.rows() || self.cols != other.cols {
            return Err(Error::dims(format!(
                "{}x{} + {}x{}",
                self.rows(),
                self.cols,
                other.rows(),
                other.cols
            )));
        }
        Ok(BitMatrix {
            cols: self.cols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.xor(b)).collect(),
        })
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows() {
            return Err(Error::dims(format!(
                "{}x{} * {}x{}",
                self.rows(),
                self.cols,
                other.rows(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| other.left_mul_unchecked(r))
            .collect();
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    /// Row-vector product `x·A`.
    pub fn left_mul(&self, x: &BitRow) -> Result<BitRow> {
        if x.width() != self.rows() {
            return Err(Error::dims(format!(
                "row of width {} times {}x{} matrix",
                x.width(),
                self.rows(),
                self.cols
            )));
        }
        Ok(self.left_mul_unchecked(x))
    }

    fn left_mul_unchecked(&self, x: &BitRow) -> BitRow {
        let mut out = BitRow::zeros(self.cols);
        for i in x.iter_ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// `x·A` with `x` and the result packed into single words.
    ///
    /// Requires at most 64 rows and 64 columns.
    pub fn left_mul_word(&self, x: u64) -> u64 {
        debug_assert!(self.rows() <= WORD && self.cols <= WORD);
        let mut x = x & low_mask(self.rows());
        let mut acc = 0u64;
        while x != 0 {
            let i = x.trailing_zeros() as usize;
            acc ^= self.rows[i].words[0];
            x &= x - 1;
        }
        acc
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Row rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// A matrix `H` with `self · H == I`.
    ///
    /// Reduces `[self | I]` to reduced row echelon form `[R | E]`; placing the
    /// rows of `E` at the pivot columns of `R` gives `R·H = E`, hence
    /// `self·H = E⁻¹·E = I`.
    pub fn right_inverse(&self) -> Result<BitMatrix> {
        let n = self.rows();
        let mut reduced = self.rows.clone();
        let mut ops: Vec<BitRow> = BitMatrix::identity(n).rows;
        let mut pivots = Vec::with_capacity(n);
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == n {
                break;
            }
            let Some(pivot) = (rank..n).find(|&r| reduced[r].get(col)) else {
                continue;
            };
            reduced.swap(rank, pivot);
            ops.swap(rank, pivot);
            let (pr, po) = (reduced[rank].clone(), ops[rank].clone());
            for r in 0..n {
                if r != rank && reduced[r].get(col) {
                    reduced[r].xor_assign(&pr);
                    ops[r].xor_assign(&po);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        if rank < n {
            return Err(Error::NoRightInverse { rows: n, rank });
        }
        let mut h = BitMatrix::zeros(self.cols, n);
        for (i, &col) in pivots.iter().enumerate() {
            h.rows[col] = ops[i].clone();
        }
        Ok(h)
    }

    /// Solves `x·self = t` given a right inverse of `self`.
    ///
    /// Returns `None` when `t` is outside the row space. At full row rank the
    /// solution, when it exists, is unique.
    pub fn solve_row(&self, t: &BitRow, right_inverse: &BitMatrix) -> Result<Option<BitRow>> {
        if t.width() != self.cols {
            return Err(Error::dims(format!(
                "target of width {} for a matrix with {} columns",
                t.width(),
                self.cols
            )));
        }
        if right_inverse.rows() != self.cols || right_inverse.cols() != self.rows() {
            return Err(Error::dims("right inverse has the wrong shape"));
        }
        let x = right_inverse.left_mul_unchecked(t);
        Ok((self.left_mul_unchecked(&x) == *t).then_some(x))
    }

    /// Word-packed [`BitMatrix::solve_row`].
    pub(crate) fn solve_row_word(&self, t: u64, right_inverse: &BitMatrix) -> Option<u64> {
        let x = right_inverse.left_mul_word(t);
        (self.left_mul_word(x) == t).then_some(x)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for row in &self.rows {
            writeln!(f, "  {row}")?;
        }
        write!(f, "]")
    }
}

/// One row per line.
impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{row}")?;
        }
        Ok(())
    }
}
