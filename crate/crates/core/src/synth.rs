//! Synthetic datasets with controllable covariate shift between TRAIN and
//! TEST points.
//!
//! `vector_gmm` draws isotropic Gaussian clusters whose centers sit on a
//! sphere of radius `4 * cluster_spread`. TRAIN points pick clusters
//! uniformly; TEST points mix the uniform distribution with one concentrated
//! on the upper half of cluster ids, weighted by `shift`.
//!
//! `token_grammar` emits noisy copies of one random token template per
//! cluster; TEST copies substitute tokens with probability `drift`.

use std::path::{Path, PathBuf};

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{DataPoint, Dataset, Payload, Split};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Substitution probability applied to TRAIN token sequences.
pub const TRAIN_TOKEN_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    VectorGmm,
    TokenGrammar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelRule {
    ClusterParity,
    /// Sign of a seeded random direction through the origin (vectors only).
    Hyperplane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub mode: SynthMode,
    pub n_train: usize,
    pub n_test: usize,
    pub n_clusters: usize,
    pub dim: usize,
    pub cluster_spread: f64,
    pub shift: f64,
    pub label_rule: LabelRule,
    pub label_noise: f64,
    pub vocab_size: usize,
    pub seq_len: usize,
    pub drift: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            mode: SynthMode::VectorGmm,
            n_train: 200,
            n_test: 200,
            n_clusters: 4,
            dim: 8,
            cluster_spread: 1.0,
            shift: 0.0,
            label_rule: LabelRule::ClusterParity,
            label_noise: 0.0,
            vocab_size: 50,
            seq_len: 8,
            drift: 0.2,
            seed: 13,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_clusters < 2 {
            return Err(Error::config("n_clusters", "must be >= 2"));
        }
        if self.n_train < self.n_clusters {
            return Err(Error::config("n_train", "must be >= n_clusters"));
        }
        if self.n_test < self.n_clusters {
            return Err(Error::config("n_test", "must be >= n_clusters"));
        }
        if !(self.shift >= 0.0 && self.shift <= 1.0) {
            return Err(Error::config("shift", "must lie in [0,1]"));
        }
        if !(self.label_noise >= 0.0 && self.label_noise < 0.5) {
            return Err(Error::config("label_noise", "must lie in [0,0.5)"));
        }
        match self.mode {
            SynthMode::VectorGmm => {
                if self.dim == 0 {
                    return Err(Error::config("dim", "must be >= 1"));
                }
                if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
                    return Err(Error::config("cluster_spread", "must be > 0"));
                }
            }
            SynthMode::TokenGrammar => {
                if self.vocab_size < 2 {
                    return Err(Error::config("vocab_size", "must be >= 2"));
                }
                if self.seq_len == 0 {
                    return Err(Error::config("seq_len", "must be >= 1"));
                }
                if !(self.drift >= 0.0 && self.drift <= 1.0) {
                    return Err(Error::config("drift", "must lie in [0,1]"));
                }
                if self.label_rule == LabelRule::Hyperplane {
                    return Err(Error::config("label_rule", "hyperplane labels need vector_gmm mode"));
                }
            }
        }
        Ok(())
    }

    /// Cluster probabilities for TEST points.
    pub fn test_mixing(&self) -> Vec<f64> {
        let k = self.n_clusters;
        let upper_start = k / 2;
        let upper = (k - upper_start) as f64;
        (0..k)
            .map(|c| {
                let skew = if c >= upper_start { 1.0 / upper } else { 0.0 };
                (1.0 - self.shift) / k as f64 + self.shift * skew
            })
            .collect()
    }
}

/// True cluster of every generated point, in dataset order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthMeta {
    pub id: String,
    pub cluster: usize,
}

fn draw_categorical(weights: &[f64], rng: &mut Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut r = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if r < *w {
            return i;
        }
        r -= w;
    }
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

fn gaussian_vector(dim: usize, rng: &mut Rng) -> Vec<f64> {
    (0..dim).map(|_| StandardNormal.sample(rng)).collect()
}

fn unit_vector(dim: usize, rng: &mut Rng) -> Vec<f64> {
    loop {
        let v = gaussian_vector(dim, rng);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn synth_generate(config: &SynthConfig) -> Result<(Dataset, Vec<SynthMeta>)> {
    config.validate()?;
    let mut rng = rng::rng_for(config.seed, rng::stream::SYNTH, 0);
    let k = config.n_clusters;
    let uniform = vec![1.0 / k as f64; k];
    let test_mix = config.test_mixing();

    enum Source {
        Centers { centers: Vec<Vec<f64>>, normal: Vec<f64> },
        Templates(Vec<Vec<usize>>),
    }
    let source = match config.mode {
        SynthMode::VectorGmm => {
            let radius = 4.0 * config.cluster_spread;
            let centers = (0..k)
                .map(|_| {
                    unit_vector(config.dim, &mut rng)
                        .into_iter()
                        .map(|x| x * radius)
                        .collect()
                })
                .collect();
            let normal = unit_vector(config.dim, &mut rng);
            Source::Centers { centers, normal }
        }
        SynthMode::TokenGrammar => Source::Templates(
            (0..k)
                .map(|_| {
                    (0..config.seq_len)
                        .map(|_| rng.random_range(0..config.vocab_size))
                        .collect()
                })
                .collect(),
        ),
    };

    let mut points = Vec::with_capacity(config.n_train + config.n_test);
    let mut meta = Vec::with_capacity(config.n_train + config.n_test);
    let plan = [
        (Split::Train, config.n_train, "train"),
        (Split::Test, config.n_test, "test"),
    ];
    for (split, count, prefix) in plan {
        let mixing = if split == Split::Train { &uniform } else { &test_mix };
        for i in 0..count {
            let cluster = draw_categorical(mixing, &mut rng);
            let (payload, clean_label) = match &source {
                Source::Centers { centers, normal } => {
                    let x: Vec<f64> = centers[cluster]
                        .iter()
                        .map(|c| c + config.cluster_spread * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                        .collect();
                    let label = match config.label_rule {
                        LabelRule::ClusterParity => (cluster % 2) as u8,
                        LabelRule::Hyperplane => u8::from(x.iter().zip(normal).map(|(a, b)| a * b).sum::<f64>() > 0.0),
                    };
                    (Payload::Vector(x), label)
                }
                Source::Templates(templates) => {
                    let noise = if split == Split::Train {
                        TRAIN_TOKEN_NOISE
                    } else {
                        config.drift
                    };
                    let tokens = templates[cluster]
                        .iter()
                        .map(|&t| {
                            let t = if rng.random::<f64>() < noise {
                                rng.random_range(0..config.vocab_size)
                            } else {
                                t
                            };
                            format!("w{t}")
                        })
                        .collect();
                    (Payload::Tokens(tokens), (cluster % 2) as u8)
                }
            };
            let flip = rng.random::<f64>() < config.label_noise;
            let id = format!("{prefix}-{i:06}");
            meta.push(SynthMeta {
                id: id.clone(),
                cluster,
            });
            points.push(DataPoint {
                id,
                payload,
                split,
                label: Some(clean_label ^ u8::from(flip)),
            });
        }
    }
    Ok((Dataset::new(points)?, meta))
}

/// Sidecar path: the dataset path with its extension replaced by `meta`.
pub fn meta_path(dataset_path: &Path) -> PathBuf {
    dataset_path.with_extension("meta")
}

pub fn meta_to_jsonl(meta: &[SynthMeta]) -> String {
    meta.iter()
        .map(|m| serde_json::to_string(m).expect("meta serialization") + "\n")
        .collect()
}

/// Writes the dataset and its `.meta` sidecar.
pub fn write_synth(dataset: &Dataset, meta: &[SynthMeta], path: &Path) -> Result<()> {
    dataset.write(path)?;
    let sidecar = meta_path(path);
    std::fs::write(&sidecar, meta_to_jsonl(meta)).map_err(|e| Error::io(sidecar, e))
}
