//! Clusters defined by hashcode prefixes, and entropy-weighted cluster choice.
//!
//! The first `zeta` bits of a point's code act as its cluster label. Local
//! hash functions are built from points drawn inside one cluster, preferring
//! clusters whose TRAIN/TEST mix is close to balanced.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::Serialize;

use crate::codes::{BitColumn, HashcodeMatrix};
use crate::error::{Error, Result};
use crate::infotheory::entropy;
use crate::rng::Rng;

/// Floor added to every eligible cluster's weight.
pub const SELECTION_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// `zeta`-bit pattern, first bit most significant.
    pub id: u64,
    pub members: Vec<usize>,
    pub train_count: usize,
    pub test_count: usize,
    pub x_entropy: f64,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTable {
    zeta: usize,
    clusters: Vec<Cluster>,
    /// Per point, the index of its cluster in `clusters`.
    assignment: Vec<usize>,
}

impl ClusterTable {
    pub fn zeta(&self) -> usize {
        self.zeta
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster_of(&self, point: usize) -> &Cluster {
        &self.clusters[self.assignment[point]]
    }

    pub fn labels(&self) -> Vec<u64> {
        self.assignment.iter().map(|&c| self.clusters[c].id).collect()
    }

    pub fn find(&self, id: u64) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.id == id)
    }

    pub fn pattern(&self, id: u64) -> String {
        (0..self.zeta)
            .rev()
            .map(|b| if (id >> b) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Size-weighted mean of per-cluster x entropy, i.e. `H(x | cluster)`.
    pub fn mean_x_entropy(&self) -> f64 {
        let n: usize = self.clusters.iter().map(Cluster::size).sum();
        self.clusters.iter().map(|c| c.size() as f64 * c.x_entropy).sum::<f64>() / n as f64
    }
}

/// Groups points by the first `zeta` columns. `is_test` marks TEST membership.
pub fn assign_clusters(matrix: &HashcodeMatrix, zeta: usize, is_test: &BitColumn) -> Result<ClusterTable> {
    if zeta == 0 || zeta > 64 {
        return Err(Error::config("zeta", format!("must lie in 1..=64, got {zeta}")));
    }
    if matrix.cols() < zeta {
        return Err(Error::TooFewColumns {
            required: zeta,
            available: matrix.cols(),
        });
    }
    if is_test.len() != matrix.rows() {
        return Err(Error::LengthMismatch {
            expected: matrix.rows(),
            found: is_test.len(),
        });
    }
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for i in 0..matrix.rows() {
        groups.entry(matrix.prefix_label(i, zeta)).or_default().push(i);
    }
    let mut assignment = vec![0usize; matrix.rows()];
    let clusters = groups
        .into_iter()
        .enumerate()
        .map(|(index, (id, members))| {
            let test_count = members.iter().filter(|&&i| is_test.get(i)).count();
            let train_count = members.len() - test_count;
            for &m in &members {
                assignment[m] = index;
            }
            Cluster {
                id,
                x_entropy: entropy(&[train_count as u64, test_count as u64]).expect("nonempty cluster"),
                members,
                train_count,
                test_count,
            }
        })
        .collect();
    Ok(ClusterTable {
        zeta,
        clusters,
        assignment,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterChoice {
    Cluster(u64),
    /// No cluster has enough members; the caller samples globally instead.
    FallbackGlobal,
}

/// Draws a cluster with probability proportional to `x_entropy + epsilon`
/// among clusters with at least `min_size` members.
pub fn select_high_entropy_cluster(table: &ClusterTable, min_size: usize, rng: &mut Rng) -> ClusterChoice {
    let eligible: Vec<&Cluster> = table.clusters.iter().filter(|c| c.size() >= min_size).collect();
    if eligible.is_empty() {
        return ClusterChoice::FallbackGlobal;
    }
    let weights: Vec<f64> = eligible.iter().map(|c| c.x_entropy + SELECTION_EPSILON).collect();
    let total: f64 = weights.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (c, w) in eligible.iter().zip(&weights) {
        if r < *w {
            return ClusterChoice::Cluster(c.id);
        }
        r -= w;
    }
    ClusterChoice::Cluster(eligible[eligible.len() - 1].id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_for;

    fn matrix(codes: &[&str]) -> HashcodeMatrix {
        let width = codes[0].len();
        let cols = (0..width)
            .map(|j| BitColumn::from_fn(codes.len(), |i| codes[i].as_bytes()[j] == b'1'))
            .collect();
        HashcodeMatrix::from_columns(codes.len(), cols)
    }

    #[test]
    fn identical_prefixes_share_a_cluster() {
        let m = matrix(&["101", "100", "011"]);
        let t = assign_clusters(&m, 2, &BitColumn::zeros(3)).unwrap();
        assert_eq!(t.clusters().len(), 2);
        assert_eq!(t.cluster_of(0).id, t.cluster_of(1).id);
        assert_eq!(t.pattern(t.cluster_of(0).id), "10");
    }

    #[test]
    fn distinct_codes_give_singletons() {
        let m = matrix(&["00", "01", "10", "11"]);
        let t = assign_clusters(&m, 2, &BitColumn::zeros(4)).unwrap();
        assert_eq!(t.clusters().len(), 4);
        assert!(t.clusters().iter().all(|c| c.size() == 1));
        let total: usize = t.clusters().iter().map(Cluster::size).sum();
        assert_eq!(total, 4);
    }

    #[test]
    fn balanced_cluster_has_unit_entropy() {
        let m = matrix(&["1"; 10]);
        let x = BitColumn::from_fn(10, |i| i < 5);
        let t = assign_clusters(&m, 1, &x).unwrap();
        let c = &t.clusters()[0];
        assert_eq!((c.train_count, c.test_count), (5, 5));
        assert_eq!(c.x_entropy, 1.0);
    }

    #[test]
    fn too_few_columns() {
        let m = matrix(&["1", "0"]);
        assert!(matches!(
            assign_clusters(&m, 2, &BitColumn::zeros(2)),
            Err(Error::TooFewColumns { .. })
        ));
    }

    fn two_cluster_table() -> ClusterTable {
        // Cluster "0": 5 train + 5 test; cluster "1": 10 train.
        let codes: Vec<&str> = (0..20).map(|i| if i < 10 { "0" } else { "1" }).collect();
        let x = BitColumn::from_fn(20, |i| i < 5);
        assign_clusters(&matrix(&codes), 1, &x).unwrap()
    }

    #[test]
    fn selection_prefers_high_entropy() {
        let t = two_cluster_table();
        let mut rng = rng_for(1, 0, 0);
        let hits = (0..1000)
            .filter(|_| select_high_entropy_cluster(&t, 4, &mut rng) == ClusterChoice::Cluster(0))
            .count();
        assert!(hits >= 999, "{hits}");
    }

    #[test]
    fn selection_falls_back_or_picks_single_eligible() {
        let t = two_cluster_table();
        let mut rng = rng_for(2, 0, 0);
        assert_eq!(
            select_high_entropy_cluster(&t, 11, &mut rng),
            ClusterChoice::FallbackGlobal
        );
        let m = matrix(&["1"; 6]);
        let single = assign_clusters(&m, 1, &BitColumn::zeros(6)).unwrap();
        assert_eq!(
            select_high_entropy_cluster(&single, 3, &mut rng),
            ClusterChoice::Cluster(1)
        );
    }
}
