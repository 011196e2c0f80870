//! Model file: a learned ensemble plus everything needed to apply it.
//!
//! Serialization is canonical. Fields appear in declaration order and every
//! float is written with 17 significant digits, so equal models produce
//! equal bytes.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::Forest;
use crate::dataset::Payload;
use crate::error::{Error, Result};
use crate::hashfn::{HashEnsemble, HashFunction, HashModel, Reference, Scope};
use crate::kernels::KernelConfig;
use crate::optimizer::LearnConfig;

pub const FORMAT_VERSION: u32 = 1;

/// Writes `f64` values as `{:.16e}`; non-finite values become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFloats;

impl serde_json::ser::Formatter for CanonicalFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with canonical float formatting.
pub fn canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFloats);
    value.serialize(&mut ser)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelRecord {
    Rknn { k: usize },
    MaxMargin { dual_coefficients: Vec<f64>, bias: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionRecord {
    pub ref_ids: Vec<String>,
    /// Split bits over `ref_ids` as a 0/1 string.
    pub z: String,
    pub model: ModelRecord,
    pub objective_value: f64,
    pub scope: Scope,
    pub birth_step: usize,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePoint {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<String>>,
}

impl ReferencePoint {
    fn payload(&self) -> Result<Payload> {
        match (&self.vector, &self.tokens) {
            (Some(v), None) => Ok(Payload::Vector(v.clone())),
            (None, Some(t)) => Ok(Payload::Tokens(t.clone())),
            _ => Err(Error::config(
                "reference_points",
                format!("{}: exactly one of `vector` or `tokens` required", self.id),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format_version: u32,
    pub kernel: KernelConfig,
    pub cluster_bits: usize,
    pub functions: Vec<FunctionRecord>,
    /// Union of all reference points, sorted by id.
    pub reference_points: Vec<ReferencePoint>,
    pub learn_config: LearnConfig,
    #[serde(default)]
    pub truncation_warning: Option<String>,
    /// Points re-marked TEST by an inductive fit.
    #[serde(default)]
    pub pseudo_test_ids: Vec<String>,
    #[serde(default)]
    pub forest: Option<Forest>,
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl ModelFile {
    pub fn new(ensemble: &HashEnsemble, learn_config: &LearnConfig) -> Self {
        let functions = ensemble
            .functions
            .iter()
            .map(|f| FunctionRecord {
                ref_ids: f.ref_ids().map(str::to_string).collect(),
                z: bits_string(&f.z),
                model: match &f.model {
                    HashModel::Rknn { k } => ModelRecord::Rknn { k: *k },
                    HashModel::MaxMargin {
                        dual_coefficients,
                        bias,
                    } => ModelRecord::MaxMargin {
                        dual_coefficients: dual_coefficients.clone(),
                        bias: *bias,
                    },
                },
                objective_value: f.objective_value,
                scope: f.scope,
                birth_step: f.birth_step,
                fallback: f.fallback,
            })
            .collect();
        let reference_points = ensemble
            .reference_points()
            .into_iter()
            .map(|(id, payload)| {
                let (vector, tokens) = match payload {
                    Payload::Vector(v) => (Some(v.clone()), None),
                    Payload::Tokens(t) => (None, Some(t.clone())),
                };
                ReferencePoint {
                    id: id.to_string(),
                    vector,
                    tokens,
                }
            })
            .collect();
        ModelFile {
            format_version: FORMAT_VERSION,
            kernel: ensemble.kernel.clone(),
            cluster_bits: ensemble.cluster_bits,
            functions,
            reference_points,
            learn_config: learn_config.clone(),
            truncation_warning: None,
            pseudo_test_ids: Vec::new(),
            forest: None,
        }
    }

    /// Rebuilds the ensemble, checking every reference and split.
    pub fn ensemble(&self) -> Result<HashEnsemble> {
        self.kernel.validate()?;
        let mut points: BTreeMap<&str, Payload> = BTreeMap::new();
        for r in &self.reference_points {
            let payload = r.payload()?;
            self.kernel.check_kind(payload.kind())?;
            if points.insert(r.id.as_str(), payload).is_some() {
                return Err(Error::config("reference_points", format!("duplicate id {}", r.id)));
            }
        }
        let mut functions = Vec::with_capacity(self.functions.len());
        for (l, rec) in self.functions.iter().enumerate() {
            let field = |msg: String| Error::config("functions", format!("function {l}: {msg}"));
            let refs = rec
                .ref_ids
                .iter()
                .map(|id| {
                    let payload = points
                        .get(id.as_str())
                        .ok_or_else(|| Error::UnresolvedReference(id.clone()))?;
                    Ok(Reference {
                        id: id.clone(),
                        payload: payload.clone(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let z = rec
                .z
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(field(format!("invalid split character {other:?}"))),
                })
                .collect::<Result<Vec<bool>>>()?;
            let alpha = refs.len();
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
            let model = match &rec.model {
                ModelRecord::Rknn { k } => {
                    if *k == 0 || k.is_multiple_of(2) || *k > alpha {
                        return Err(field(format!("invalid k = {k}")));
                    }
                    HashModel::Rknn { k: *k }
                }
                ModelRecord::MaxMargin {
                    dual_coefficients,
                    bias,
                } => {
                    if dual_coefficients.len() != alpha {
                        return Err(Error::LengthMismatch {
                            expected: alpha,
                            found: dual_coefficients.len(),
                        });
                    }
                    HashModel::MaxMargin {
                        dual_coefficients: dual_coefficients.clone(),
                        bias: *bias,
                    }
                }
            };
            functions.push(HashFunction {
                refs,
                z,
                model,
                objective_value: rec.objective_value,
                scope: rec.scope,
                birth_step: rec.birth_step,
                fallback: rec.fallback,
            });
        }
        Ok(HashEnsemble {
            functions,
            kernel: self.kernel.clone(),
            cluster_bits: self.cluster_bits,
        })
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = canonical_json(self)?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let v: Version = serde_json::from_slice(bytes)?;
        if v.format_version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(v.format_version));
        }
        let model: ModelFile = serde_json::from_slice(bytes)?;
        model.ensemble()?;
        Ok(model)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
