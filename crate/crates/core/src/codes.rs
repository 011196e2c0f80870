//! Bit storage for hashcodes.
//!
//! The matrix is stored column-major as packed words: learning appends and
//! deletes whole columns, and the estimators count co-occurrences with
//! popcounts.

use std::fmt;

/// A packed column of `len` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitColumn {
    words: Vec<u64>,
    len: usize,
}

impl BitColumn {
    pub fn zeros(len: usize) -> Self {
        BitColumn {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut col = BitColumn::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                col.set(i, true);
            }
        }
        col
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut col = BitColumn::zeros(len);
        for i in 0..len {
            if f(i) {
                col.set(i, true);
            }
        }
        col
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Number of positions where both columns are 1.
    pub fn and_count(&self, other: &BitColumn) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum()
    }

    pub fn not(&self) -> BitColumn {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        BitColumn { words, len: self.len }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }
}

/// The code of one data point: one bit per retained hash function.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hashcode(pub Vec<bool>);

impl Hashcode {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn hamming(&self, other: &Hashcode) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn parse(s: &str) -> Option<Hashcode> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Hashcode)
    }
}

impl fmt::Display for Hashcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// N x H bit matrix, rows aligned with dataset order, columns with ensemble order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashcodeMatrix {
    rows: usize,
    columns: Vec<BitColumn>,
}

impl HashcodeMatrix {
    pub fn empty(rows: usize) -> Self {
        HashcodeMatrix {
            rows,
            columns: Vec::new(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<BitColumn>) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows), "column length mismatch");
        HashcodeMatrix { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[BitColumn] {
        &self.columns
    }

    pub fn column(&self, l: usize) -> &BitColumn {
        &self.columns[l]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col].get(row)
    }

    pub fn push_column(&mut self, column: BitColumn) {
        assert_eq!(column.len(), self.rows, "column length mismatch");
        self.columns.push(column);
    }

    pub fn insert_column(&mut self, at: usize, column: BitColumn) {
        assert_eq!(column.len(), self.rows, "column length mismatch");
        self.columns.insert(at, column);
    }

    pub fn remove_column(&mut self, at: usize) -> BitColumn {
        self.columns.remove(at)
    }

    pub fn row(&self, i: usize) -> Hashcode {
        Hashcode(self.columns.iter().map(|c| c.get(i)).collect())
    }

    pub fn to_rows(&self) -> Vec<Hashcode> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    /// Row-restricted copy, keeping column order.
    pub fn select_rows(&self, rows: &[usize]) -> HashcodeMatrix {
        let columns = self
            .columns
            .iter()
            .map(|c| BitColumn::from_fn(rows.len(), |k| c.get(rows[k])))
            .collect();
        HashcodeMatrix {
            rows: rows.len(),
            columns,
        }
    }

    /// Integer label from the first `width` bits of a row (bit 0 = most significant).
    pub fn prefix_label(&self, row: usize, width: usize) -> u64 {
        debug_assert!(width <= 64 && width <= self.cols());
        self.columns[..width]
            .iter()
            .fold(0u64, |acc, c| (acc << 1) | u64::from(c.get(row)))
    }
}
