//! Greedy hash-function learning.
//!
//! Functions are added one at a time. Each step draws a subset size, samples
//! a reference subset (globally until `cluster_bits` global functions exist,
//! then from an entropy-weighted hashcode cluster), searches the split `z`
//! of that subset that maximizes
//!
//! ```text
//! H(x, c) - redundancy_weight * R(c; existing) + label_weight * -H(y | cluster, c)
//! ```
//!
//! where `x` is TRAIN/TEST membership and `c` the candidate bit over all
//! points, appends the winner and then drops functions whose stored score
//! falls far below the rest. The conditional entropy of `x` given the
//! existing code is never computed; choosing balanced clusters to sample
//! from stands in for it.

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{assign_clusters, select_high_entropy_cluster, ClusterChoice, ClusterTable};
use crate::codes::{BitColumn, HashcodeMatrix};
use crate::dataset::{Dataset, Payload};
use crate::error::{Error, Result};
use crate::hashfn::{HashEnsemble, HashFunction, ModelKind, Reference, Scope};
use crate::infotheory::{joint_entropy, label_term, redundancy_score, JointCounts, RedundancyMode};
use crate::kernels::{gram_prepared, Gram, KernelConfig, Prepared};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SearchStrategy {
    #[default]
    /// Exhaustive enumeration, used while the subset is no larger than
    /// `brute_force_max_alpha`; larger subsets are annealed with defaults.
    BruteForce,
    Anneal {
        budget: usize,
        initial_temperature: f64,
        cooling: f64,
    },
}

impl SearchStrategy {
    pub const DEFAULT_ANNEAL: SearchStrategy = SearchStrategy::Anneal {
        budget: 200,
        initial_temperature: 0.1,
        cooling: 0.97,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeletionConfig {
    pub enabled: bool,
    /// Functions scoring below `mean - kappa * std` are deletion candidates.
    pub kappa: f64,
    pub max_per_step: usize,
    /// Never delete the cluster-defining global functions.
    pub protect_global: bool,
}

impl Default for DeletionConfig {
    fn default() -> Self {
        DeletionConfig {
            enabled: true,
            kappa: 2.0,
            max_per_step: 1,
            protect_global: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearnConfig {
    pub num_functions: usize,
    pub subset_sizes: Vec<usize>,
    pub cluster_bits: usize,
    pub model_kind: ModelKind,
    pub k: usize,
    pub redundancy_mode: RedundancyMode,
    pub redundancy_weight: f64,
    pub label_weight: f64,
    pub search: SearchStrategy,
    pub brute_force_max_alpha: usize,
    pub deletion: DeletionConfig,
    /// Defaults to three times `num_functions`.
    pub max_iterations: Option<usize>,
    pub seed: u64,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            num_functions: 100,
            subset_sizes: vec![4, 5, 6, 7, 8],
            cluster_bits: 10,
            model_kind: ModelKind::Rknn,
            k: 1,
            redundancy_mode: RedundancyMode::MaxPairwise,
            redundancy_weight: 1.0,
            label_weight: 0.0,
            search: SearchStrategy::BruteForce,
            brute_force_max_alpha: 10,
            deletion: DeletionConfig::default(),
            max_iterations: None,
            seed: 13,
        }
    }
}

impl LearnConfig {
    pub fn max_iterations(&self) -> usize {
        self.max_iterations.unwrap_or(3 * self.num_functions)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cluster_bits == 0 || self.cluster_bits > 64 {
            return Err(Error::config("cluster_bits", "must lie in 1..=64"));
        }
        if self.num_functions < self.cluster_bits {
            return Err(Error::config("num_functions", "must be >= cluster_bits"));
        }
        if self.subset_sizes.is_empty() {
            return Err(Error::config("subset_sizes", "must not be empty"));
        }
        if let Some(a) = self.subset_sizes.iter().find(|&&a| a < 2) {
            return Err(Error::config(
                "subset_sizes",
                format!("every size must be >= 2, got {a}"),
            ));
        }
        if self.k == 0 || self.k.is_multiple_of(2) {
            return Err(Error::config("k", "must be a positive odd integer"));
        }
        if let Some(a) = self.subset_sizes.iter().find(|&&a| a < self.k) {
            return Err(Error::config("k", format!("exceeds subset size {a}")));
        }
        if self.redundancy_weight.is_nan() || self.redundancy_weight < 0.0 {
            return Err(Error::config("redundancy_weight", "must be >= 0"));
        }
        if self.label_weight.is_nan() || self.label_weight < 0.0 {
            return Err(Error::config("label_weight", "must be >= 0"));
        }
        if self.max_iterations() < self.num_functions {
            return Err(Error::config("max_iterations", "must be >= num_functions"));
        }
        if !self.deletion.kappa.is_finite() {
            return Err(Error::config("deletion.kappa", "must be finite"));
        }
        if let SearchStrategy::Anneal {
            budget,
            initial_temperature,
            cooling,
        } = self.search
        {
            if budget == 0 {
                return Err(Error::config("search.budget", "must be >= 1"));
            }
            if initial_temperature.is_nan() || initial_temperature < 0.0 {
                return Err(Error::config("search.initial_temperature", "must be >= 0"));
            }
            if !(cooling > 0.0 && cooling <= 1.0) {
                return Err(Error::config("search.cooling", "must lie in (0,1]"));
            }
        }
        Ok(())
    }
}

/// A dataset prepared for learning: cached self-similarities, the TEST
/// membership column and the labels visible to learning.
pub struct Problem<'a> {
    pub dataset: &'a Dataset,
    pub kernel: KernelConfig,
    prepared: Prepared<'a>,
    is_test: BitColumn,
    labels: Vec<Option<u8>>,
}

impl<'a> Problem<'a> {
    pub fn new(dataset: &'a Dataset, kernel: &KernelConfig) -> Result<Self> {
        kernel.validate()?;
        kernel.check_kind(dataset.kind())?;
        let payloads: Vec<&Payload> = dataset.points().iter().map(|p| &p.payload).collect();
        let prepared = Prepared::from_refs(payloads, kernel)?;
        let is_test = BitColumn::from_fn(dataset.len(), |i| dataset.points()[i].is_test());
        Ok(Problem {
            dataset,
            kernel: kernel.clone(),
            prepared,
            is_test,
            labels: dataset.training_labels(),
        })
    }

    pub fn len(&self) -> usize {
        self.dataset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dataset.is_empty()
    }

    pub fn is_test(&self) -> &BitColumn {
        &self.is_test
    }

    pub fn labels(&self) -> &[Option<u8>] {
        &self.labels
    }

    pub fn references(&self, indices: &[usize]) -> Vec<Reference> {
        indices
            .iter()
            .map(|&i| {
                let p = &self.dataset.points()[i];
                Reference {
                    id: p.id.clone(),
                    payload: p.payload.clone(),
                }
            })
            .collect()
    }

    pub fn context<'b>(
        &'b self,
        existing: &'b HashcodeMatrix,
        cluster_labels: Option<Vec<u64>>,
        config: &LearnConfig,
    ) -> ObjectiveContext<'b> {
        ObjectiveContext {
            existing,
            cluster_labels,
            is_test: &self.is_test,
            labels: &self.labels,
            redundancy_mode: config.redundancy_mode,
            redundancy_weight: config.redundancy_weight,
            label_weight: config.label_weight,
            cluster_bits: config.cluster_bits,
        }
    }
}

/// Quantities the objective reads at one greedy step.
pub struct ObjectiveContext<'a> {
    pub existing: &'a HashcodeMatrix,
    /// Cluster label per point once enough global functions exist.
    pub cluster_labels: Option<Vec<u64>>,
    pub is_test: &'a BitColumn,
    pub labels: &'a [Option<u8>],
    pub redundancy_mode: RedundancyMode,
    pub redundancy_weight: f64,
    pub label_weight: f64,
    pub cluster_bits: usize,
}

pub fn objective(candidate: &BitColumn, ctx: &ObjectiveContext<'_>) -> Result<f64> {
    if candidate.len() != ctx.is_test.len() {
        return Err(Error::LengthMismatch {
            expected: ctx.is_test.len(),
            found: candidate.len(),
        });
    }
    let mut score = joint_entropy(&JointCounts::from_bits(ctx.is_test, candidate))?;
    if ctx.redundancy_weight > 0.0 {
        score -=
            ctx.redundancy_weight * redundancy_score(candidate, ctx.existing, ctx.redundancy_mode, ctx.cluster_bits)?;
    }
    if ctx.label_weight > 0.0 {
        let term = match &ctx.cluster_labels {
            Some(labels) => label_term(ctx.labels, labels, candidate)?,
            None => label_term(ctx.labels, &vec![0; candidate.len()], candidate)?,
        };
        score += ctx.label_weight * term;
    }
    Ok(score)
}

pub fn sample_subset_size(sizes: &[usize], rng: &mut Rng) -> Result<usize> {
    if sizes.is_empty() {
        return Err(Error::config("subset_sizes", "must not be empty"));
    }
    Ok(sizes[rng.random_range(0..sizes.len())])
}

/// Uniform sample of `alpha` distinct indices from `0..n`.
pub fn sample_global(n: usize, alpha: usize, rng: &mut Rng) -> Result<Vec<usize>> {
    if alpha > n {
        return Err(Error::SampleTooLarge {
            requested: alpha,
            available: n,
        });
    }
    Ok(index::sample(rng, n, alpha).into_vec())
}

/// Samples inside an entropy-weighted cluster with at least `alpha`
/// members, or globally when none is large enough. Returns the chosen
/// cluster id alongside the indices.
pub fn sample_local(n: usize, table: &ClusterTable, alpha: usize, rng: &mut Rng) -> Result<(Vec<usize>, Option<u64>)> {
    match select_high_entropy_cluster(table, alpha, rng) {
        ClusterChoice::Cluster(id) => {
            let members = &table.find(id).expect("selected cluster exists").members;
            let picks = index::sample(rng, members.len(), alpha);
            Ok((picks.iter().map(|i| members[i]).collect(), Some(id)))
        }
        ClusterChoice::FallbackGlobal => Ok((sample_global(n, alpha, rng)?, None)),
    }
}

/// Result of searching the split of one reference subset.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub function: HashFunction,
    pub column: BitColumn,
    pub score: f64,
    pub candidates_evaluated: usize,
    /// Current score after every accepted annealing move; empty for brute force.
    pub accepted_scores: Vec<f64>,
}

/// Similarities of a reference subset to every point, computed once per subset.
struct SubsetBlock {
    refs: Vec<Reference>,
    /// `alpha x alpha` similarities among the references.
    ref_gram: Gram,
    /// `N x alpha`: row `i` holds point `i`'s similarity to each reference.
    point_sims: Gram,
}

impl SubsetBlock {
    fn new(indices: &[usize], problem: &Problem<'_>) -> Result<Self> {
        let subset = problem.prepared.subset(indices);
        let block = gram_prepared(&subset, &problem.prepared, &problem.kernel)?;
        let ref_gram = gram_prepared(&subset, &subset, &problem.kernel)?;
        Ok(SubsetBlock {
            refs: problem.references(indices),
            ref_gram,
            point_sims: block.transpose(),
        })
    }

    fn evaluate(
        &self,
        z: Vec<bool>,
        ctx: &ObjectiveContext<'_>,
        config: &LearnConfig,
    ) -> Result<(HashFunction, BitColumn, f64)> {
        let h = HashFunction::fit_with_gram(self.refs.clone(), z, Some(&self.ref_gram), config.model_kind, config.k)?;
        let column = BitColumn::from_fn(self.point_sims.rows(), |i| h.decide(self.point_sims.row(i)));
        let score = objective(&column, ctx)?;
        Ok((h, column, score))
    }
}

fn is_trivial(z: &[bool]) -> bool {
    z.iter().all(|&b| b) || z.iter().all(|&b| !b)
}

/// Split vectors enumerated by brute force: `z[0] = 1`, every completion
/// except all ones, `2^(alpha-1) - 1` in total.
pub fn brute_force_splits(alpha: usize) -> impl Iterator<Item = Vec<bool>> {
    let free = alpha - 1;
    let all_ones = (1u64 << free) - 1;
    (0..all_ones).map(move |mask| {
        let mut z = Vec::with_capacity(alpha);
        z.push(true);
        z.extend((0..free).map(|j| (mask >> (free - 1 - j)) & 1 == 1));
        z
    })
}

pub fn optimize_split(
    refs: &[usize],
    problem: &Problem<'_>,
    ctx: &ObjectiveContext<'_>,
    config: &LearnConfig,
    rng: &mut Rng,
) -> Result<SplitOutcome> {
    let alpha = refs.len();
    if alpha < 2 {
        return Err(Error::SubsetTooSmall(alpha));
    }
    let block = SubsetBlock::new(refs, problem)?;
    let strategy = match &config.search {
        SearchStrategy::BruteForce if alpha <= config.brute_force_max_alpha.min(63) => SearchStrategy::BruteForce,
        SearchStrategy::BruteForce => SearchStrategy::DEFAULT_ANNEAL,
        other => other.clone(),
    };
    match strategy {
        SearchStrategy::BruteForce => brute_force(&block, ctx, config),
        SearchStrategy::Anneal {
            budget,
            initial_temperature,
            cooling,
        } => anneal(&block, ctx, config, rng, budget, initial_temperature, cooling),
    }
}

fn brute_force(block: &SubsetBlock, ctx: &ObjectiveContext<'_>, config: &LearnConfig) -> Result<SplitOutcome> {
    let alpha = block.refs.len();
    let splits: Vec<Vec<bool>> = brute_force_splits(alpha).collect();
    let scored = splits
        .into_par_iter()
        .map(|z| block.evaluate(z, ctx, config))
        .collect::<Result<Vec<_>>>()?;
    let candidates_evaluated = scored.len();
    // Highest score wins; ties go to the lexicographically smallest z.
    let (mut function, column, score) = scored
        .into_iter()
        .reduce(|best, next| {
            if next.2 > best.2 || (next.2 == best.2 && next.0.z < best.0.z) {
                next
            } else {
                best
            }
        })
        .expect("alpha >= 2 yields at least one split");
    function.objective_value = score;
    Ok(SplitOutcome {
        function,
        column,
        score,
        candidates_evaluated,
        accepted_scores: Vec::new(),
    })
}

fn random_nontrivial_split(alpha: usize, rng: &mut Rng) -> Vec<bool> {
    loop {
        let z: Vec<bool> = (0..alpha).map(|_| rng.random::<bool>()).collect();
        if !is_trivial(&z) {
            return z;
        }
    }
}

fn anneal(
    block: &SubsetBlock,
    ctx: &ObjectiveContext<'_>,
    config: &LearnConfig,
    rng: &mut Rng,
    budget: usize,
    initial_temperature: f64,
    cooling: f64,
) -> Result<SplitOutcome> {
    let alpha = block.refs.len();
    let mut current = block.evaluate(random_nontrivial_split(alpha, rng), ctx, config)?;
    let mut best = current.clone();
    let mut evaluated = 1;
    let mut accepted_scores = Vec::new();
    let mut temperature = initial_temperature;
    for _ in 0..budget {
        let flip = rng.random_range(0..alpha);
        let mut z = current.0.z.clone();
        z[flip] = !z[flip];
        let u: f64 = rng.random();
        if !is_trivial(&z) {
            let proposal = block.evaluate(z, ctx, config)?;
            evaluated += 1;
            let delta = proposal.2 - current.2;
            let accept = delta >= 0.0 || (temperature > 0.0 && u < (delta / temperature).exp());
            if accept {
                current = proposal;
                accepted_scores.push(current.2);
                if current.2 > best.2 {
                    best = current.clone();
                }
            }
        }
        temperature *= cooling;
    }
    let (mut function, column, score) = best;
    function.objective_value = score;
    Ok(SplitOutcome {
        function,
        column,
        score,
        candidates_evaluated: evaluated,
        accepted_scores,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovedFunction {
    pub index: usize,
    pub birth_step: usize,
    pub objective_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeletionPass {
    /// `mean - kappa * std` over deletable functions; absent when none are deletable.
    pub threshold: Option<f64>,
    pub removed: Vec<RemovedFunction>,
}

/// Indices of functions that deletion may remove.
fn deletable(ensemble: &HashEnsemble, deletion: &DeletionConfig) -> Vec<usize> {
    let mut protected_left = if deletion.protect_global {
        ensemble.cluster_bits
    } else {
        0
    };
    let mut out = Vec::new();
    for (i, f) in ensemble.functions.iter().enumerate() {
        if f.scope == Scope::Global && protected_left > 0 {
            protected_left -= 1;
        } else {
            out.push(i);
        }
    }
    out
}

pub fn delete_low_info(
    ensemble: &mut HashEnsemble,
    matrix: &mut HashcodeMatrix,
    deletion: &DeletionConfig,
) -> DeletionPass {
    let candidates = deletable(ensemble, deletion);
    if candidates.is_empty() {
        return DeletionPass {
            threshold: None,
            removed: Vec::new(),
        };
    }
    let values: Vec<f64> = candidates
        .iter()
        .map(|&i| ensemble.functions[i].objective_value)
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
    let threshold = mean - deletion.kappa * std;

    let mut below: Vec<usize> = candidates
        .into_iter()
        .filter(|&i| ensemble.functions[i].objective_value < threshold)
        .collect();
    below.sort_by(|&a, &b| {
        ensemble.functions[a]
            .objective_value
            .total_cmp(&ensemble.functions[b].objective_value)
            .then(a.cmp(&b))
    });
    below.truncate(deletion.max_per_step);
    below.sort_unstable_by(|a, b| b.cmp(a));
    let mut removed: Vec<RemovedFunction> = below
        .into_iter()
        .map(|i| {
            let f = ensemble.functions.remove(i);
            matrix.remove_column(i);
            RemovedFunction {
                index: i,
                birth_step: f.birth_step,
                objective_value: f.objective_value,
            }
        })
        .collect();
    removed.reverse();
    DeletionPass {
        threshold: Some(threshold),
        removed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub scope: Scope,
    pub alpha: usize,
    /// Cluster pattern the subset was drawn from, for local steps.
    pub cluster: Option<String>,
    pub score: f64,
    pub candidates_evaluated: usize,
    pub fallback: bool,
    pub deletion: DeletionPass,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnReport {
    pub steps: Vec<StepRecord>,
    pub iterations: usize,
    pub truncation_warning: Option<String>,
    /// For each retained function (ensemble order), the threshold of the
    /// last deletion pass it survived.
    pub survived_thresholds: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct LearnOutcome {
    pub ensemble: HashEnsemble,
    pub matrix: HashcodeMatrix,
    pub report: LearnReport,
}

fn check_learnable(dataset: &Dataset, config: &LearnConfig) -> Result<()> {
    config.validate()?;
    dataset.require_both_splits()?;
    let largest = *config.subset_sizes.iter().max().expect("validated nonempty");
    if largest > dataset.len() {
        return Err(Error::SampleTooLarge {
            requested: largest,
            available: dataset.len(),
        });
    }
    Ok(())
}

pub fn learn(dataset: &Dataset, kernel: &KernelConfig, config: &LearnConfig) -> Result<LearnOutcome> {
    check_learnable(dataset, config)?;
    let problem = Problem::new(dataset, kernel)?;
    if config.label_weight > 0.0 && problem.labels().iter().all(Option::is_none) {
        return Err(Error::NoLabels);
    }
    let n = problem.len();
    let target = config.num_functions;
    let mut ensemble = HashEnsemble::new(kernel.clone(), config.cluster_bits);
    let mut matrix = HashcodeMatrix::empty(n);
    let mut survived: Vec<Option<f64>> = Vec::new();
    let mut steps = Vec::new();
    let mut iterations = 0;

    while ensemble.len() < target && iterations < config.max_iterations() {
        let step = iterations;
        iterations += 1;
        let mut rng = rng::rng_for(config.seed, rng::stream::LEARN_STEP, step as u64);
        let alpha = sample_subset_size(&config.subset_sizes, &mut rng)?;
        let globals = ensemble.global_count();
        let (scope, refs, cluster, cluster_labels) = if globals < config.cluster_bits {
            (Scope::Global, sample_global(n, alpha, &mut rng)?, None, None)
        } else {
            let table = assign_clusters(&matrix, config.cluster_bits, problem.is_test())?;
            let (refs, cluster) = sample_local(n, &table, alpha, &mut rng)?;
            let pattern = cluster.map(|id| table.pattern(id));
            (Scope::Local, refs, pattern, Some(table.labels()))
        };

        let outcome = {
            let ctx = problem.context(&matrix, cluster_labels, config);
            optimize_split(&refs, &problem, &ctx, config, &mut rng)?
        };
        let mut function = outcome.function;
        function.scope = scope;
        function.birth_step = step;
        let fallback = function.fallback;
        // Global functions stay a prefix of the ensemble so the first
        // `cluster_bits` columns always define the clustering.
        let at = if scope == Scope::Global {
            globals
        } else {
            ensemble.len()
        };
        ensemble.functions.insert(at, function);
        matrix.insert_column(at, outcome.column);
        survived.insert(at, None);

        let deletion = if config.deletion.enabled {
            let pass = delete_low_info(&mut ensemble, &mut matrix, &config.deletion);
            for r in &pass.removed {
                survived.remove(r.index);
            }
            if let Some(t) = pass.threshold {
                for i in deletable(&ensemble, &config.deletion) {
                    survived[i] = Some(t);
                }
            }
            pass
        } else {
            DeletionPass {
                threshold: None,
                removed: Vec::new(),
            }
        };
        for r in &deletion.removed {
            log::debug!(
                "step {step}: deleted function born at step {} (f = {:.4})",
                r.birth_step,
                r.objective_value
            );
        }
        steps.push(StepRecord {
            step,
            scope,
            alpha,
            cluster,
            score: outcome.score,
            candidates_evaluated: outcome.candidates_evaluated,
            fallback,
            deletion,
        });
    }

    let truncation_warning = (ensemble.len() < target).then(|| {
        let msg = format!(
            "max_iterations ({}) reached with {} of {} hash functions",
            config.max_iterations(),
            ensemble.len(),
            target
        );
        log::warn!("{msg}");
        msg
    });
    Ok(LearnOutcome {
        ensemble,
        matrix,
        report: LearnReport {
            steps,
            iterations,
            truncation_warning,
            survived_thresholds: survived,
        },
    })
}

/// Baseline ensemble: random global subsets with random nontrivial splits,
/// no optimization and no deletion.
pub fn random_ensemble(
    dataset: &Dataset,
    kernel: &KernelConfig,
    config: &LearnConfig,
) -> Result<(HashEnsemble, HashcodeMatrix)> {
    check_learnable(dataset, config)?;
    let problem = Problem::new(dataset, kernel)?;
    let n = problem.len();
    let mut ensemble = HashEnsemble::new(kernel.clone(), config.cluster_bits);
    let mut matrix = HashcodeMatrix::empty(n);
    for step in 0..config.num_functions {
        let mut rng = rng::rng_for(config.seed, rng::stream::RANDOM_ENSEMBLE, step as u64);
        let alpha = sample_subset_size(&config.subset_sizes, &mut rng)?;
        let refs = sample_global(n, alpha, &mut rng)?;
        let z = random_nontrivial_split(alpha, &mut rng);
        let block = SubsetBlock::new(&refs, &problem)?;
        let mut h = HashFunction::fit_with_gram(
            block.refs.clone(),
            z,
            Some(&block.ref_gram),
            config.model_kind,
            config.k,
        )?;
        h.scope = Scope::Global;
        h.birth_step = step;
        let column = BitColumn::from_fn(n, |i| h.decide(block.point_sims.row(i)));
        ensemble.functions.push(h);
        matrix.push_column(column);
    }
    Ok((ensemble, matrix))
}
