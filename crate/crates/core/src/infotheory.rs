//! Plug-in entropy and mutual-information estimators over discrete counts.
//! All quantities are in bits; zero-count cells contribute nothing.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::codes::{BitColumn, HashcodeMatrix};
use crate::error::{Error, Result};

/// Counts over the product of two finite alphabets, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCounts {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
}

impl JointCounts {
    pub fn new(rows: usize, cols: usize, cells: Vec<u64>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: cells.len(),
            });
        }
        Ok(JointCounts { rows, cols, cells })
    }

    /// Contingency table of two aligned label sequences.
    pub fn from_labels(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let rows = a.iter().max().map_or(0, |m| m + 1);
        let cols = b.iter().max().map_or(0, |m| m + 1);
        let mut cells = vec![0u64; rows * cols];
        for (&i, &j) in a.iter().zip(b) {
            cells[i * cols + j] += 1;
        }
        Ok(JointCounts { rows, cols, cells })
    }

    /// 2x2 table of two bit columns: cell `(a, b)` at index `2a + b`.
    pub fn from_bits(a: &BitColumn, b: &BitColumn) -> Self {
        debug_assert_eq!(a.len(), b.len());
        let n = a.len() as u64;
        let n11 = a.and_count(b);
        let n1_ = a.count_ones();
        let n_1 = b.count_ones();
        let n10 = n1_ - n11;
        let n01 = n_1 - n11;
        let n00 = n - n11 - n10 - n01;
        JointCounts {
            rows: 2,
            cols: 2,
            cells: vec![n00, n01, n10, n11],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn row_marginal(&self) -> Vec<u64> {
        self.cells.chunks(self.cols.max(1)).map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginal(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.cells[i * self.cols + j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> JointCounts {
        let mut cells = Vec::with_capacity(self.cells.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                cells.push(self.cells[i * self.cols + j]);
            }
        }
        JointCounts {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }
}

pub fn entropy(counts: &[u64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let total = total as f64;
    // Summing in sorted order makes the result exactly invariant to cell
    // permutations, e.g. relabeling a bit.
    let mut nonzero: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    nonzero.sort_unstable();
    let h = nonzero
        .iter()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

pub fn joint_entropy(joint: &JointCounts) -> Result<f64> {
    entropy(&joint.cells)
}

/// Entropy of the column variable given the row variable.
pub fn conditional_entropy(joint: &JointCounts) -> Result<f64> {
    Ok((joint_entropy(joint)? - entropy(&joint.row_marginal())?).max(0.0))
}

pub fn mutual_information(joint: &JointCounts) -> Result<f64> {
    let h_joint = joint_entropy(joint)?;
    let mi = entropy(&joint.row_marginal())? + entropy(&joint.col_marginal())? - h_joint;
    Ok(mi.max(0.0))
}

/// How a candidate bit's redundancy against existing bits is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RedundancyMode {
    /// Largest mutual information with any single existing column.
    #[default]
    MaxPairwise,
    /// Mean mutual information over existing columns.
    MeanPairwise,
    /// Mutual information with the cluster label formed by the first
    /// `zeta` columns (or all columns while fewer exist).
    Cluster,
}

pub fn redundancy_score(
    candidate: &BitColumn,
    existing: &HashcodeMatrix,
    mode: RedundancyMode,
    zeta: usize,
) -> Result<f64> {
    if candidate.len() != existing.rows() {
        return Err(Error::LengthMismatch {
            expected: existing.rows(),
            found: candidate.len(),
        });
    }
    if existing.cols() == 0 || candidate.is_empty() {
        return Ok(0.0);
    }
    match mode {
        RedundancyMode::MaxPairwise => existing
            .columns()
            .iter()
            .map(|col| mutual_information(&JointCounts::from_bits(candidate, col)))
            .try_fold(0.0f64, |acc, mi| Ok(acc.max(mi?))),
        RedundancyMode::MeanPairwise => {
            let sum = existing
                .columns()
                .iter()
                .map(|col| mutual_information(&JointCounts::from_bits(candidate, col)))
                .try_fold(0.0f64, |acc, mi| mi.map(|m| acc + m))?;
            Ok(sum / existing.cols() as f64)
        }
        RedundancyMode::Cluster => {
            let width = zeta.clamp(1, 64).min(existing.cols());
            let labels: Vec<u64> = (0..existing.rows()).map(|i| existing.prefix_label(i, width)).collect();
            let clusters = dense_ids(&labels);
            let bits: Vec<usize> = candidate.iter().map(usize::from).collect();
            mutual_information(&JointCounts::from_labels(&clusters, &bits)?)
        }
    }
}

/// Maps arbitrary ids to `0..k` in order of first appearance.
pub(crate) fn dense_ids(labels: &[u64]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// `-H(y | cluster, c)` over the points that carry a label.
pub fn label_term(labels: &[Option<u8>], cluster_labels: &[u64], candidate: &BitColumn) -> Result<f64> {
    if labels.len() != cluster_labels.len() || labels.len() != candidate.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            found: cluster_labels.len().min(candidate.len()),
        });
    }
    let mut cells: HashMap<(u64, bool), [u64; 2]> = HashMap::new();
    for (i, label) in labels.iter().enumerate() {
        if let Some(y) = label {
            cells.entry((cluster_labels[i], candidate.get(i))).or_default()[usize::from(*y)] += 1;
        }
    }
    if cells.is_empty() {
        return Err(Error::NoLabels);
    }
    let mut keys: Vec<_> = cells.keys().copied().collect();
    keys.sort_unstable();
    let flat: Vec<u64> = keys.iter().flat_map(|k| cells[k]).collect();
    let joint = JointCounts::new(keys.len(), 2, flat)?;
    Ok(-conditional_entropy(&joint)?)
}
