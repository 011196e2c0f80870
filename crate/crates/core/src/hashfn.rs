//! Kernelized hash functions built from a small reference subset and a
//! split vector `z` over it.
//!
//! A function assigns a bit to any payload from its similarities to the
//! references. Two models are supported:
//!
//! * **RKNN**: majority of `z` over the `k` most similar references. For
//!   `k = 1` the bit is 1 iff the best similarity among `z = 1` references
//!   strictly exceeds the best among `z = 0` references.
//! * **MAXMARGIN**: a dual kernel perceptron trained on `(refs, z)`; the bit
//!   is 1 iff the decision value is strictly positive. Splits the perceptron
//!   cannot separate within [`PERCEPTRON_MAX_EPOCHS`] fall back to RKNN.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{BitColumn, HashcodeMatrix};
use crate::dataset::{Dataset, Payload};
use crate::error::{Error, Result};
use crate::kernels::{self, gram_prepared, Gram, KernelConfig, Prepared};

pub const PERCEPTRON_MAX_EPOCHS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    Rknn,
    MaxMargin,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HashModel {
    Rknn { k: usize },
    MaxMargin { dual_coefficients: Vec<f64>, bias: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub id: String,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HashFunction {
    pub refs: Vec<Reference>,
    pub z: Vec<bool>,
    pub model: HashModel,
    pub objective_value: f64,
    pub scope: Scope,
    pub birth_step: usize,
    /// Set when a MAXMARGIN fit did not separate `z` and RKNN was used instead.
    pub fallback: bool,
}

/// Anything that maps a payload to one bit can act as a hash function.
/// [`HashFunction`] is the only shipped implementation.
pub trait PointHasher {
    fn hash_payload(&self, payload: &Payload, kernel: &KernelConfig) -> Result<bool>;
}

fn validate_split(alpha: usize, z: &[bool]) -> Result<()> {
    if alpha < 2 {
        return Err(Error::SubsetTooSmall(alpha));
    }
    if z.len() != alpha {
        return Err(Error::LengthMismatch {
            expected: alpha,
            found: z.len(),
        });
    }
    if z.iter().all(|&b| b) || z.iter().all(|&b| !b) {
        return Err(Error::TrivialSplit);
    }
    Ok(())
}

fn validate_k(k: usize, alpha: usize) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::config("k", format!("must be a positive odd integer, got {k}")));
    }
    if k > alpha {
        return Err(Error::config("k", format!("k = {k} exceeds subset size {alpha}")));
    }
    Ok(())
}

/// Dual perceptron on a precomputed reference Gram matrix. Returns
/// `(coefficients, bias)` when an epoch completes without mistakes.
fn dual_perceptron(gram: &Gram, z: &[bool]) -> Option<(Vec<f64>, f64)> {
    let alpha = z.len();
    let target: Vec<f64> = z.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
    let mut coef = vec![0.0f64; alpha];
    let mut bias = 0.0f64;
    for _ in 0..PERCEPTRON_MAX_EPOCHS {
        let mut mistakes = 0;
        for i in 0..alpha {
            let f: f64 = (0..alpha).map(|j| coef[j] * gram.get(j, i)).sum::<f64>() + bias;
            if target[i] * f <= 0.0 {
                coef[i] += target[i];
                bias += target[i];
                mistakes += 1;
            }
        }
        if mistakes == 0 {
            return Some((coef, bias));
        }
    }
    None
}

/// RKNN decision from similarities to the references, in reference order.
fn rknn_bit(sims: &[f64], z: &[bool], k: usize) -> bool {
    if k == 1 {
        let mut best_one = f64::NEG_INFINITY;
        let mut best_zero = f64::NEG_INFINITY;
        for (&s, &b) in sims.iter().zip(z) {
            if b {
                best_one = best_one.max(s);
            } else {
                best_zero = best_zero.max(s);
            }
        }
        return best_one > best_zero;
    }
    let mut order: Vec<usize> = (0..sims.len()).collect();
    // Higher similarity first; equal similarities keep the lower index first.
    order.sort_by(|&a, &b| sims[b].total_cmp(&sims[a]).then(a.cmp(&b)));
    let ones = order[..k].iter().filter(|&&i| z[i]).count();
    2 * ones > k
}

impl HashFunction {
    pub fn fit(refs: Vec<Reference>, z: Vec<bool>, kernel: &KernelConfig, model: ModelKind, k: usize) -> Result<Self> {
        validate_split(refs.len(), &z)?;
        let mut ids = HashSet::new();
        for r in &refs {
            if !ids.insert(r.id.as_str()) {
                return Err(Error::DuplicateId {
                    id: r.id.clone(),
                    line: 0,
                });
            }
        }
        let gram = match model {
            ModelKind::Rknn => None,
            ModelKind::MaxMargin => {
                let payloads: Vec<&Payload> = refs.iter().map(|r| &r.payload).collect();
                let prepared = Prepared::from_refs(payloads, kernel)?;
                Some(gram_prepared(&prepared, &prepared, kernel)?)
            }
        };
        Self::fit_with_gram(refs, z, gram.as_ref(), model, k)
    }

    /// Fit given the references' own Gram matrix (required for MAXMARGIN).
    pub(crate) fn fit_with_gram(
        refs: Vec<Reference>,
        z: Vec<bool>,
        gram: Option<&Gram>,
        model: ModelKind,
        k: usize,
    ) -> Result<Self> {
        validate_split(refs.len(), &z)?;
        validate_k(k, refs.len())?;
        let (model, fallback) = match model {
            ModelKind::Rknn => (HashModel::Rknn { k }, false),
            ModelKind::MaxMargin => {
                let gram = gram.expect("MAXMARGIN fit needs the reference Gram matrix");
                match dual_perceptron(gram, &z) {
                    Some((dual_coefficients, bias)) => (
                        HashModel::MaxMargin {
                            dual_coefficients,
                            bias,
                        },
                        false,
                    ),
                    None => (HashModel::Rknn { k }, true),
                }
            }
        };
        Ok(HashFunction {
            refs,
            z,
            model,
            objective_value: 0.0,
            scope: Scope::Global,
            birth_step: 0,
            fallback,
        })
    }

    pub fn alpha(&self) -> usize {
        self.refs.len()
    }

    pub fn ref_ids(&self) -> impl Iterator<Item = &str> {
        self.refs.iter().map(|r| r.id.as_str())
    }

    /// Bit for a point given its similarities to the references.
    pub fn decide(&self, sims: &[f64]) -> bool {
        debug_assert_eq!(sims.len(), self.refs.len());
        match &self.model {
            HashModel::Rknn { k } => rknn_bit(sims, &self.z, *k),
            HashModel::MaxMargin {
                dual_coefficients,
                bias,
            } => {
                let f: f64 = dual_coefficients.iter().zip(sims).map(|(c, s)| c * s).sum::<f64>() + bias;
                f > 0.0
            }
        }
    }

    fn prepared_refs(&self, kernel: &KernelConfig) -> Result<Prepared<'_>> {
        Prepared::from_refs(self.refs.iter().map(|r| &r.payload).collect(), kernel)
    }
}

impl PointHasher for HashFunction {
    fn hash_payload(&self, payload: &Payload, kernel: &KernelConfig) -> Result<bool> {
        hash_point(self, payload, kernel)
    }
}

pub fn hash_point(h: &HashFunction, payload: &Payload, kernel: &KernelConfig) -> Result<bool> {
    let refs = h.prepared_refs(kernel)?;
    let own = kernels::self_similarity(payload, kernel)?;
    let sims = refs.similarities(payload, own, kernel)?;
    Ok(h.decide(&sims))
}

/// Ordered collection of hash functions plus the kernel they share.
#[derive(Debug, Clone, PartialEq)]
pub struct HashEnsemble {
    pub functions: Vec<HashFunction>,
    pub kernel: KernelConfig,
    pub cluster_bits: usize,
}

impl HashEnsemble {
    pub fn new(kernel: KernelConfig, cluster_bits: usize) -> Self {
        HashEnsemble {
            functions: Vec::new(),
            kernel,
            cluster_bits,
        }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn global_count(&self) -> usize {
        self.functions.iter().filter(|f| f.scope == Scope::Global).count()
    }

    /// Union of all reference points, keyed (and sorted) by id.
    pub fn reference_points(&self) -> BTreeMap<&str, &Payload> {
        self.functions
            .iter()
            .flat_map(|f| f.refs.iter())
            .map(|r| (r.id.as_str(), &r.payload))
            .collect()
    }

    pub fn hash_payloads(&self, payloads: &[&Payload]) -> Result<HashcodeMatrix> {
        for p in payloads {
            self.kernel.check_kind(p.kind())?;
        }
        let points = Prepared::from_refs(payloads.to_vec(), &self.kernel)?;
        let mut matrix = HashcodeMatrix::empty(payloads.len());
        for h in &self.functions {
            matrix.push_column(column_for(h, &points, &self.kernel)?);
        }
        Ok(matrix)
    }
}

/// One column of hash bits for every prepared point.
pub(crate) fn column_for(h: &HashFunction, points: &Prepared<'_>, kernel: &KernelConfig) -> Result<BitColumn> {
    let refs = h.prepared_refs(kernel)?;
    let bits = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let sims = refs.similarities(points.payload(i), points.self_similarity(i), kernel)?;
            Ok(h.decide(&sims))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(BitColumn::from_bools(&bits))
}

pub fn hash_all(ensemble: &HashEnsemble, dataset: &Dataset) -> Result<HashcodeMatrix> {
    let payloads: Vec<&Payload> = dataset.points().iter().map(|p| &p.payload).collect();
    ensemble.hash_payloads(&payloads)
}
