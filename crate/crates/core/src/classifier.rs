//! Downstream classifiers over hashcodes: a random forest of CART trees on
//! bit features, a Hamming-distance kNN baseline, and precision/recall/F1.

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::Hashcode;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForestConfig {
    pub trees: usize,
    pub max_depth: usize,
    /// Fraction of features considered per node; `None` means `ceil(sqrt(H)) / H`.
    pub feature_subsample: Option<f64>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            trees: 100,
            max_depth: 8,
            feature_subsample: None,
            bootstrap: true,
            seed: 13,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::config("forest.trees", "must be >= 1"));
        }
        if self.max_depth == 0 {
            return Err(Error::config("forest.max_depth", "must be >= 1"));
        }
        if let Some(f) = self.feature_subsample {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::config("forest.feature_subsample", "must lie in (0,1]"));
            }
        }
        Ok(())
    }

    fn features_per_node(&self, n_features: usize) -> usize {
        let m = match self.feature_subsample {
            Some(f) => (f * n_features as f64).ceil() as usize,
            None => (n_features as f64).sqrt().ceil() as usize,
        };
        m.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf { counts: [u32; 2] },
    Split { feature: usize, zero: usize, one: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    /// Root at index 0.
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, code: &Hashcode) -> u8 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { counts } => return u8::from(counts[1] > counts[0]),
                Node::Split { feature, zero, one } => {
                    at = if code.bits()[*feature] { *one } else { *zero };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

fn gini(c: [u32; 2]) -> f64 {
    let n = f64::from(c[0] + c[1]);
    if n == 0.0 {
        return 0.0;
    }
    let (p0, p1) = (f64::from(c[0]) / n, f64::from(c[1]) / n);
    1.0 - p0 * p0 - p1 * p1
}

fn class_counts(samples: &[usize], labels: &[u8]) -> [u32; 2] {
    let mut c = [0u32; 2];
    for &s in samples {
        c[usize::from(labels[s])] += 1;
    }
    c
}

struct TreeBuilder<'a> {
    codes: &'a [Hashcode],
    labels: &'a [u8],
    max_depth: usize,
    per_node: usize,
    nodes: Vec<Node>,
}

impl TreeBuilder<'_> {
    fn grow(&mut self, samples: Vec<usize>, depth: usize, rng: &mut rng::Rng) -> usize {
        let counts = class_counts(&samples, self.labels);
        let at = self.nodes.len();
        self.nodes.push(Node::Leaf { counts });
        if depth >= self.max_depth || counts[0] == 0 || counts[1] == 0 {
            return at;
        }
        let n_features = self.codes[0].len();
        let mut features = index::sample(rng, n_features, self.per_node).into_vec();
        features.sort_unstable();

        // Lowest weighted child impurity; zero-gain splits are allowed so
        // interactions such as XOR can still be resolved one level down.
        let mut best: Option<(f64, usize)> = None;
        for &f in &features {
            let mut ones = [0u32; 2];
            for &s in &samples {
                if self.codes[s].bits()[f] {
                    ones[usize::from(self.labels[s])] += 1;
                }
            }
            let zeros = [counts[0] - ones[0], counts[1] - ones[1]];
            let (n1, n0) = (ones[0] + ones[1], zeros[0] + zeros[1]);
            if n1 == 0 || n0 == 0 {
                continue;
            }
            let impurity = (f64::from(n0) * gini(zeros) + f64::from(n1) * gini(ones)) / f64::from(n0 + n1);
            if best.is_none_or(|(b, _)| impurity < b) {
                best = Some((impurity, f));
            }
        }
        let Some((_, feature)) = best else {
            return at;
        };
        let (one_side, zero_side): (Vec<usize>, Vec<usize>) =
            samples.into_iter().partition(|&s| self.codes[s].bits()[feature]);
        let zero = self.grow(zero_side, depth + 1, rng);
        let one = self.grow(one_side, depth + 1, rng);
        self.nodes[at] = Node::Split { feature, zero, one };
        at
    }
}

pub fn train_forest(codes: &[Hashcode], labels: &[u8], config: &ForestConfig) -> Result<Forest> {
    config.validate()?;
    if codes.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: codes.len(),
            found: labels.len(),
        });
    }
    if codes.is_empty() {
        return Err(Error::NoLabels);
    }
    let n_features = codes[0].len();
    if let Some(c) = codes.iter().find(|c| c.len() != n_features) {
        return Err(Error::LengthMismatch {
            expected: n_features,
            found: c.len(),
        });
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::config("labels", "must be 0 or 1"));
    }
    if labels.iter().all(|&l| l == labels[0]) {
        return Err(Error::SingleClass);
    }
    let n = codes.len();
    let per_node = config.features_per_node(n_features);
    let trees = (0..config.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::rng_for(config.seed, rng::stream::FOREST_TREE, t as u64);
            let samples: Vec<usize> = if config.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            let mut builder = TreeBuilder {
                codes,
                labels,
                max_depth: config.max_depth,
                per_node,
                nodes: Vec::new(),
            };
            if n_features > 0 {
                builder.grow(samples, 0, &mut rng);
            } else {
                builder.nodes.push(Node::Leaf {
                    counts: class_counts(&samples, labels),
                });
            }
            Tree { nodes: builder.nodes }
        })
        .collect();
    Ok(Forest { n_features, trees })
}

/// Majority vote of tree predictions; tied votes give 0.
pub fn predict_forest(forest: &Forest, codes: &[Hashcode]) -> Result<Vec<u8>> {
    if let Some(c) = codes.iter().find(|c| c.len() != forest.n_features) {
        return Err(Error::LengthMismatch {
            expected: forest.n_features,
            found: c.len(),
        });
    }
    Ok(codes
        .par_iter()
        .map(|code| {
            let ones = forest.trees.iter().filter(|t| t.predict(code) == 1).count();
            u8::from(2 * ones > forest.trees.len())
        })
        .collect())
}

/// Majority label of the `k` nearest training codes by Hamming distance;
/// equal distances prefer the lower training index.
pub fn knn_hamming(train: &[Hashcode], labels: &[u8], query: &Hashcode, k: usize) -> Result<u8> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::config("k", format!("must be a positive odd integer, got {k}")));
    }
    if k > train.len() {
        return Err(Error::config(
            "k",
            format!("k = {k} exceeds training size {}", train.len()),
        ));
    }
    if train.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: train.len(),
            found: labels.len(),
        });
    }
    if let Some(c) = train.iter().find(|c| c.len() != query.len()) {
        return Err(Error::LengthMismatch {
            expected: query.len(),
            found: c.len(),
        });
    }
    let mut order: Vec<(usize, usize)> = train.iter().enumerate().map(|(i, c)| (c.hamming(query), i)).collect();
    order.sort_unstable();
    let ones = order[..k].iter().filter(|(_, i)| labels[*i] == 1).count();
    Ok(u8::from(2 * ones > k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

/// Metrics for the positive class 1; undefined ratios are reported as 0.
pub fn evaluate(predicted: &[u8], gold: &[u8]) -> Result<Metrics> {
    if predicted.len() != gold.len() {
        return Err(Error::LengthMismatch {
            expected: gold.len(),
            found: predicted.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &g) in predicted.iter().zip(gold) {
        match (p == 1, g == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = ratio(2 * tp, 2 * tp + fp + fn_);
    Ok(Metrics {
        precision,
        recall,
        f1,
        tp,
        fp,
        fn_,
        tn,
    })
}
