//! Data points, datasets and the line-delimited record format.
//!
//! One JSON object per line:
//!
//! ```text
//! {"id":"p1","vector":[0.5,1.0],"split":"train","label":1}
//! {"id":"p2","tokens":["protein","binds"],"split":"test"}
//! ```
//!
//! Exactly one of `vector` or `tokens` must be present, `label` is optional
//! and unknown fields are rejected.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PayloadKind {
    Vector,
    Tokens,
}

impl PayloadKind {
    pub fn name(self) -> &'static str {
        match self {
            PayloadKind::Vector => "vector",
            PayloadKind::Tokens => "tokens",
        }
    }
}

impl fmt::Display for PayloadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Vector(Vec<f64>),
    Tokens(Vec<String>),
}

impl Payload {
    pub fn kind(&self) -> PayloadKind {
        match self {
            Payload::Vector(_) => PayloadKind::Vector,
            Payload::Tokens(_) => PayloadKind::Tokens,
        }
    }
}

/// Set-membership indicator `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataPoint {
    pub id: String,
    pub payload: Payload,
    pub split: Split,
    pub label: Option<u8>,
}

impl DataPoint {
    pub fn is_test(&self) -> bool {
        self.split == Split::Test
    }
}

/// An ordered, validated collection of points sharing one payload kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<DataPoint>,
    kind: PayloadKind,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    id: String,
    #[serde(default)]
    vector: Option<Vec<f64>>,
    #[serde(default)]
    tokens: Option<Vec<String>>,
    split: Split,
    #[serde(default)]
    label: Option<u8>,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    vector: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tokens: Option<&'a [String]>,
    split: Split,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<u8>,
}

impl Dataset {
    /// Builds a dataset, checking id uniqueness, kind uniformity and vector
    /// dimensionality. Line numbers in errors are 1-based point positions.
    pub fn new(points: Vec<DataPoint>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let kind = first.payload.kind();
        let dim = match &first.payload {
            Payload::Vector(v) => Some(v.len()),
            Payload::Tokens(_) => None,
        };
        let mut seen = HashSet::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let line = i + 1;
            if p.payload.kind() != kind {
                return Err(Error::MixedPayloadKinds { line });
            }
            if let (Payload::Vector(v), Some(d)) = (&p.payload, dim) {
                if v.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: v.len(),
                        line,
                    });
                }
            }
            if let Some(l) = p.label {
                if l > 1 {
                    return Err(Error::MalformedRecord {
                        path: "<memory>".into(),
                        line,
                        message: format!("label must be 0 or 1, got {l}"),
                    });
                }
            }
            if !seen.insert(p.id.as_str()) {
                return Err(Error::DuplicateId { id: p.id.clone(), line });
            }
        }
        Ok(Dataset { points, kind })
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<DataPoint> {
        self.points
    }

    pub fn kind(&self) -> PayloadKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn count(&self, split: Split) -> usize {
        self.points.iter().filter(|p| p.split == split).count()
    }

    /// Labels visible to hash learning: TEST labels are withheld.
    pub fn training_labels(&self) -> Vec<Option<u8>> {
        self.points
            .iter()
            .map(|p| match p.split {
                Split::Train => p.label,
                Split::Test => None,
            })
            .collect()
    }

    /// Fails unless both TRAIN and TEST points are present.
    pub fn require_both_splits(&self) -> Result<()> {
        if self.count(Split::Train) == 0 || self.count(Split::Test) == 0 {
            return Err(Error::MissingSplit);
        }
        Ok(())
    }

    /// Concatenates a training and a test dataset, re-marking membership by
    /// role (transductive mode).
    pub fn merge_transductive(train: Dataset, test: Dataset) -> Result<Dataset> {
        let mut points: Vec<DataPoint> = train
            .into_points()
            .into_iter()
            .map(|mut p| {
                p.split = Split::Train;
                p
            })
            .collect();
        points.extend(test.into_points().into_iter().map(|mut p| {
            p.split = Split::Test;
            p
        }));
        Dataset::new(points)
    }

    pub fn parse_str(text: &str, source: &str, expected: Option<PayloadKind>) -> Result<Dataset> {
        let mut points = Vec::new();
        let mut kind: Option<PayloadKind> = None;
        let mut dim: Option<usize> = None;
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let malformed = |message: String| Error::MalformedRecord {
                path: source.to_string(),
                line,
                message,
            };
            let rec: RecordIn = serde_json::from_str(raw).map_err(|e| malformed(e.to_string()))?;
            let payload = match (rec.vector, rec.tokens) {
                (Some(v), None) => Payload::Vector(v),
                (None, Some(t)) => Payload::Tokens(t),
                (Some(_), Some(_)) => return Err(malformed("both `vector` and `tokens` present".into())),
                (None, None) => return Err(malformed("missing `vector` or `tokens`".into())),
            };
            if let Some(l) = rec.label {
                if l > 1 {
                    return Err(malformed(format!("label must be 0 or 1, got {l}")));
                }
            }
            match kind {
                None => kind = Some(payload.kind()),
                Some(k) if k != payload.kind() => return Err(Error::MixedPayloadKinds { line }),
                _ => {}
            }
            if let Payload::Vector(v) = &payload {
                match dim {
                    None => dim = Some(v.len()),
                    Some(d) if d != v.len() => {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            found: v.len(),
                            line,
                        })
                    }
                    _ => {}
                }
            }
            if !seen.insert(rec.id.clone()) {
                return Err(Error::DuplicateId { id: rec.id, line });
            }
            points.push(DataPoint {
                id: rec.id,
                payload,
                split: rec.split,
                label: rec.label,
            });
        }
        let kind = kind.ok_or(Error::EmptyDataset)?;
        if let Some(want) = expected {
            if want != kind {
                return Err(Error::KindMismatch {
                    expected: want.name(),
                    found: kind.name(),
                });
            }
        }
        Ok(Dataset { points, kind })
    }

    /// Serializes to the record format with fields in canonical order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            let (vector, tokens) = match &p.payload {
                Payload::Vector(v) => (Some(v.as_slice()), None),
                Payload::Tokens(t) => (None, Some(t.as_slice())),
            };
            let rec = RecordOut {
                id: &p.id,
                vector,
                tokens,
                split: p.split,
                label: p.label,
            };
            out.push_str(&serde_json::to_string(&rec).expect("record serialization"));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))
    }
}

pub fn load_dataset(path: &Path, expected: Option<PayloadKind>) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Dataset::parse_str(&text, &path.display().to_string(), expected)
}

/// Number of points re-marked TEST for a given fraction.
pub fn pseudo_test_count(n: usize, fraction: f64) -> usize {
    (fraction * n as f64).round() as usize
}

/// Inductive mode: re-marks `round(fraction * N)` seeded-random points as
/// TEST. Labels stay on the records; learning ignores labels of TEST points.
pub fn split_pseudo_test(dataset: &Dataset, fraction: f64, seed: u64) -> Result<Dataset> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::config(
            "pseudo_test_fraction",
            format!("must lie in (0,1), got {fraction}"),
        ));
    }
    if dataset.points.iter().any(|p| p.split != Split::Train) {
        return Err(Error::config(
            "pseudo_test_fraction",
            "all points must be TRAIN before a pseudo-test split",
        ));
    }
    let n = dataset.len();
    let n_test = pseudo_test_count(n, fraction);
    if n_test == 0 || n_test >= n {
        return Err(Error::config(
            "pseudo_test_fraction",
            format!("{fraction} of {n} points leaves an empty TRAIN or TEST side"),
        ));
    }
    let mut rng = rng::rng_for(seed, rng::stream::PSEUDO_TEST, 0);
    let chosen = index::sample(&mut rng, n, n_test);
    let mut points = dataset.points.clone();
    for i in chosen.iter() {
        points[i].split = Split::Test;
    }
    Ok(Dataset {
        points,
        kind: dataset.kind,
    })
}
