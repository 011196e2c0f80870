//! Nearly unsupervised hashcodes.
//!
//! Learns a compact binary representation of TRAIN and TEST points with
//! kernelized locality sensitive hash functions, each fit on a handful of
//! reference points with a binary split chosen to maximize an
//! information-theoretic objective. Codes feed a random forest or a Hamming
//! kNN classifier.
//!
//! ```no_run
//! use nuhash::{learn, load_dataset, KernelConfig, LearnConfig};
//!
//! let data = load_dataset("points.jsonl".as_ref(), None)?;
//! let outcome = learn(&data, &KernelConfig::rbf(0.5), &LearnConfig::default())?;
//! println!("{} functions", outcome.ensemble.len());
//! # Ok::<(), nuhash::Error>(())
//! ```

pub mod classifier;
pub mod cli;
pub mod clustering;
pub mod codes;
pub mod dataset;
pub mod error;
pub mod hashfn;
pub mod infotheory;
pub mod kernels;
pub mod model;
pub mod optimizer;
pub mod rng;
pub mod synth;

pub use classifier::{evaluate, knn_hamming, predict_forest, train_forest, Forest, ForestConfig, Metrics};
pub use codes::{BitColumn, Hashcode, HashcodeMatrix};
pub use dataset::{load_dataset, split_pseudo_test, DataPoint, Dataset, Payload, PayloadKind, Split};
pub use error::{Error, Result};
pub use hashfn::{hash_all, HashEnsemble, HashFunction, ModelKind, PointHasher, Scope};
pub use kernels::{kernel_eval, KernelConfig, KernelKind};
pub use model::ModelFile;
pub use optimizer::{learn, random_ensemble, DeletionConfig, LearnConfig, LearnOutcome, SearchStrategy};
pub use synth::{synth_generate, SynthConfig};
