//! Similarity functions over payloads.
//!
//! Three kernels are provided: RBF and cosine over dense vectors, and a
//! gap-weighted common-subsequence kernel over token sequences. The
//! subsequence kernel weights every occurrence of a common subsequence by
//! `lambda^span` in each sequence and sums subsequence lengths
//! `1..=max_len`.

use std::borrow::Borrow;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Payload, PayloadKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Rbf,
    Cosine,
    Subseq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub gamma: f64,
    pub lambda: f64,
    pub max_len: usize,
    pub normalize: bool,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            kind: KernelKind::Rbf,
            gamma: 0.5,
            lambda: 0.5,
            max_len: 3,
            normalize: true,
        }
    }
}

impl KernelConfig {
    pub fn rbf(gamma: f64) -> Self {
        KernelConfig {
            kind: KernelKind::Rbf,
            gamma,
            ..Default::default()
        }
    }

    pub fn cosine() -> Self {
        KernelConfig {
            kind: KernelKind::Cosine,
            ..Default::default()
        }
    }

    pub fn subseq(lambda: f64, max_len: usize, normalize: bool) -> Self {
        KernelConfig {
            kind: KernelKind::Subseq,
            lambda,
            max_len,
            normalize,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::config("kernel.gamma", "must be > 0"));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::config("kernel.lambda", "must lie in (0,1)"));
        }
        if self.max_len == 0 {
            return Err(Error::config("kernel.max_len", "must be >= 1"));
        }
        Ok(())
    }

    pub fn payload_kind(&self) -> PayloadKind {
        match self.kind {
            KernelKind::Rbf | KernelKind::Cosine => PayloadKind::Vector,
            KernelKind::Subseq => PayloadKind::Tokens,
        }
    }

    pub fn check_kind(&self, kind: PayloadKind) -> Result<()> {
        let expected = self.payload_kind();
        if kind != expected {
            return Err(Error::KindMismatch {
                expected: expected.name(),
                found: kind.name(),
            });
        }
        Ok(())
    }

    /// Whether self-similarities are needed to normalize raw values.
    /// RBF and cosine already have unit self-similarity.
    fn normalizes(&self) -> bool {
        self.normalize && self.kind == KernelKind::Subseq
    }
}

fn mismatch(a: &Payload, b: &Payload, cfg: &KernelConfig) -> Error {
    let expected = cfg.payload_kind();
    let found = if a.kind() != expected { a.kind() } else { b.kind() };
    Error::KindMismatch {
        expected: expected.name(),
        found: found.name(),
    }
}

fn vectors<'a>(a: &'a Payload, b: &'a Payload, cfg: &KernelConfig) -> Result<(&'a [f64], &'a [f64])> {
    match (a, b) {
        (Payload::Vector(x), Payload::Vector(y)) => {
            if x.len() != y.len() {
                return Err(Error::LengthMismatch {
                    expected: x.len(),
                    found: y.len(),
                });
            }
            Ok((x, y))
        }
        _ => Err(mismatch(a, b, cfg)),
    }
}

fn tokens<'a>(a: &'a Payload, b: &'a Payload, cfg: &KernelConfig) -> Result<(&'a [String], &'a [String])> {
    match (a, b) {
        (Payload::Tokens(x), Payload::Tokens(y)) => Ok((x, y)),
        _ => Err(mismatch(a, b, cfg)),
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gap-weighted subsequence kernel, summed over lengths `1..=max_len`.
///
/// `prev[p][q]` holds, for the previous length, the weighted count of
/// common subsequences in `s[..p]` and `t[..q]`, with weight
/// extended to the end of both prefixes.
pub fn subsequence_kernel(s: &[String], t: &[String], lambda: f64, max_len: usize) -> f64 {
    let (n, m) = (s.len(), t.len());
    if n == 0 || m == 0 || max_len == 0 {
        return 0.0;
    }
    let w = m + 1;
    let matches: Vec<bool> = (0..n * m).map(|k| s[k / m] == t[k % m]).collect();
    let l2 = lambda * lambda;

    let mut prev = vec![1.0f64; (n + 1) * w];
    let mut next = vec![0.0f64; (n + 1) * w];
    let mut inner = vec![0.0f64; w];
    let mut total = 0.0;
    for len in 1..=max_len {
        let mut k_len = 0.0;
        for p in 1..=n {
            for q in 1..=m {
                if matches[(p - 1) * m + (q - 1)] {
                    k_len += l2 * prev[(p - 1) * w + (q - 1)];
                }
            }
        }
        total += k_len;
        if len == max_len || len >= n.min(m) {
            break;
        }
        next.iter_mut().for_each(|v| *v = 0.0);
        for p in 1..=n {
            inner[0] = 0.0;
            for q in 1..=m {
                let hit = if matches[(p - 1) * m + (q - 1)] {
                    l2 * prev[(p - 1) * w + (q - 1)]
                } else {
                    0.0
                };
                inner[q] = lambda * inner[q - 1] + hit;
                next[p * w + q] = lambda * next[(p - 1) * w + q] + inner[q];
            }
        }
        std::mem::swap(&mut prev, &mut next);
    }
    total
}

/// Kernel value before normalization.
pub fn raw_kernel(a: &Payload, b: &Payload, cfg: &KernelConfig) -> Result<f64> {
    match cfg.kind {
        KernelKind::Rbf => {
            let (x, y) = vectors(a, b, cfg)?;
            Ok((-cfg.gamma * squared_distance(x, y)).exp())
        }
        KernelKind::Cosine => {
            let (x, y) = vectors(a, b, cfg)?;
            let (nx, ny) = (norm(x), norm(y));
            if nx == 0.0 || ny == 0.0 {
                return Err(Error::DegeneratePayload);
            }
            Ok((dot(x, y) / (nx * ny)).clamp(-1.0, 1.0))
        }
        KernelKind::Subseq => {
            let (x, y) = tokens(a, b, cfg)?;
            Ok(subsequence_kernel(x, y, cfg.lambda, cfg.max_len))
        }
    }
}

/// Self-similarity used for normalization; 1.0 for kernels that need none.
pub fn self_similarity(a: &Payload, cfg: &KernelConfig) -> Result<f64> {
    cfg.check_kind(a.kind())?;
    if !cfg.normalizes() {
        if cfg.kind == KernelKind::Cosine {
            if let Payload::Vector(v) = a {
                if norm(v) == 0.0 {
                    return Err(Error::DegeneratePayload);
                }
            }
        }
        return Ok(1.0);
    }
    let k = raw_kernel(a, a, cfg)?;
    if k <= 0.0 {
        return Err(Error::DegeneratePayload);
    }
    Ok(k)
}

fn finish(raw: f64, self_a: f64, self_b: f64, cfg: &KernelConfig) -> f64 {
    if cfg.normalizes() {
        (raw / (self_a * self_b).sqrt()).min(1.0)
    } else {
        raw
    }
}

pub fn kernel_eval(a: &Payload, b: &Payload, cfg: &KernelConfig) -> Result<f64> {
    let raw = raw_kernel(a, b, cfg)?;
    if !cfg.normalizes() {
        return Ok(raw);
    }
    let (sa, sb) = (self_similarity(a, cfg)?, self_similarity(b, cfg)?);
    Ok(finish(raw, sa, sb, cfg))
}

/// Payloads with their self-similarities computed once.
#[derive(Debug, Clone)]
pub struct Prepared<'a> {
    payloads: Vec<&'a Payload>,
    self_sims: Vec<f64>,
}

impl<'a> Prepared<'a> {
    pub fn new<P: Borrow<Payload> + Sync>(payloads: &'a [P], cfg: &KernelConfig) -> Result<Self> {
        let payloads: Vec<&'a Payload> = payloads.iter().map(|p| p.borrow()).collect();
        Self::from_refs(payloads, cfg)
    }

    pub fn from_refs(payloads: Vec<&'a Payload>, cfg: &KernelConfig) -> Result<Self> {
        let self_sims = payloads
            .par_iter()
            .map(|p| self_similarity(p, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Prepared { payloads, self_sims })
    }

    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    pub fn payload(&self, i: usize) -> &'a Payload {
        self.payloads[i]
    }

    pub fn self_similarity(&self, i: usize) -> f64 {
        self.self_sims[i]
    }

    /// Restricts to a subset of indices, reusing cached self-similarities.
    pub fn subset(&self, indices: &[usize]) -> Prepared<'a> {
        Prepared {
            payloads: indices.iter().map(|&i| self.payloads[i]).collect(),
            self_sims: indices.iter().map(|&i| self.self_sims[i]).collect(),
        }
    }

    /// Similarities of one (prepared) query against every payload here.
    pub fn similarities(&self, query: &Payload, query_self: f64, cfg: &KernelConfig) -> Result<Vec<f64>> {
        self.payloads
            .iter()
            .zip(&self.self_sims)
            .map(|(p, &s)| Ok(finish(raw_kernel(p, query, cfg)?, s, query_self, cfg)))
            .collect()
    }
}

/// Dense row-major similarity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Gram {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Gram {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Gram {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// Entry `(i, j)` is the similarity of `points[i]` and `queries[j]`. Rows
/// are computed concurrently; every entry is evaluated independently, so
/// the result does not depend on the thread count.
pub fn gram_prepared(points: &Prepared<'_>, queries: &Prepared<'_>, cfg: &KernelConfig) -> Result<Gram> {
    let rows: Vec<Vec<f64>> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            (0..queries.len())
                .map(|j| {
                    let raw = raw_kernel(points.payload(i), queries.payload(j), cfg)?;
                    Ok(finish(raw, points.self_similarity(i), queries.self_similarity(j), cfg))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(Gram {
        rows: points.len(),
        cols: queries.len(),
        data: rows.into_iter().flatten().collect(),
    })
}

pub fn gram<P, Q>(points: &[P], queries: &[Q], cfg: &KernelConfig) -> Result<Gram>
where
    P: Borrow<Payload> + Sync,
    Q: Borrow<Payload> + Sync,
{
    let p = Prepared::new(points, cfg)?;
    let q = Prepared::new(queries, cfg)?;
    gram_prepared(&p, &q, cfg)
}
