//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nuhash::classifier::{evaluate, predict_forest, train_forest, ForestConfig, Metrics};
use nuhash::codes::{BitColumn, Hashcode, HashcodeMatrix};
use nuhash::dataset::{split_pseudo_test, DataPoint, Dataset, Payload, Split};
use nuhash::hashfn::{hash_point, HashFunction, ModelKind};
use nuhash::infotheory::{entropy, joint_entropy, label_term, mutual_information, JointCounts, RedundancyMode};
use nuhash::kernels::{kernel_eval, KernelConfig};
use nuhash::optimizer::{learn, objective, optimize_split, random_ensemble, LearnConfig, LearnOutcome, Problem};
use nuhash::synth::{synth_generate, LabelRule, SynthConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 10;

struct Verdict {
    pass: bool,
    detail: String,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- oracles

fn oracle_entropy(cells: &[u64]) -> f64 {
    let n: u64 = cells.iter().sum();
    let mut h = 0.0;
    for &c in cells {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

fn oracle_mi(rows: usize, cols: usize, cells: &[u64]) -> f64 {
    let n: u64 = cells.iter().sum();
    let n = n as f64;
    let row: Vec<f64> = (0..rows)
        .map(|r| (0..cols).map(|c| cells[r * cols + c] as f64).sum())
        .collect();
    let col: Vec<f64> = (0..cols)
        .map(|c| (0..rows).map(|r| cells[r * cols + c] as f64).sum())
        .collect();
    let mut mi = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let nrc = cells[r * cols + c] as f64;
            if nrc > 0.0 {
                mi += nrc / n * ((nrc * n) / (row[r] * col[c])).log2();
            }
        }
    }
    mi
}

/// `-H(y | g, c)` by direct summation over `(g, c, y)` counts.
fn oracle_label_term(counts: &[[[u64; 2]; 2]]) -> f64 {
    let n: u64 = counts.iter().flatten().flatten().sum();
    let mut h = 0.0;
    for g in counts {
        for cy in g {
            let n_gc = (cy[0] + cy[1]) as f64;
            for &ny in cy {
                if ny > 0 {
                    h -= ny as f64 / n as f64 * (ny as f64 / n_gc).log2();
                }
            }
        }
    }
    -h
}

fn oracle_metrics(pred: &[u8], gold: &[u8]) -> Metrics {
    let count = |p: u8, g: u8| pred.iter().zip(gold).filter(|&(&a, &b)| a == p && b == g).count();
    let (tp, fp, fn_, tn) = (count(1, 1), count(1, 0), count(0, 1), count(0, 0));
    let div = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Metrics {
        precision: div(tp, tp + fp),
        recall: div(tp, tp + fn_),
        f1: div(2 * tp, 2 * tp + fp + fn_),
        tp,
        fp,
        fn_,
        tn,
    }
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let mean = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = mean;
        }
        i = j + 1;
    }
    out
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

// ---------------------------------------------------------------- fixtures

/// Random Gaussian points with both splits present and random labels.
fn random_dataset(r: &mut ChaCha8Rng, n: usize, dim: usize) -> Dataset {
    let points = (0..n)
        .map(|i| DataPoint {
            id: format!("p{i}"),
            payload: Payload::Vector((0..dim).map(|_| r.random_range(-2.0..2.0)).collect()),
            split: if i == 0 || (i > 1 && r.random_bool(0.4)) {
                Split::Test
            } else {
                Split::Train
            },
            label: Some(r.random_range(0..2)),
        })
        .collect();
    Dataset::new(points).unwrap()
}

fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> HashcodeMatrix {
    let columns = (0..cols)
        .map(|_| {
            let p = r.random_range(0.2..0.8);
            BitColumn::from_fn(rows, |_| r.random_bool(p))
        })
        .collect();
    HashcodeMatrix::from_columns(rows, columns)
}

fn random_config(r: &mut ChaCha8Rng, alpha: usize) -> LearnConfig {
    let modes = [
        RedundancyMode::MaxPairwise,
        RedundancyMode::MeanPairwise,
        RedundancyMode::Cluster,
    ];
    let (model_kind, k) = match r.random_range(0..3) {
        0 => (ModelKind::Rknn, 1),
        1 if alpha >= 3 => (ModelKind::Rknn, 3),
        _ => (ModelKind::MaxMargin, 1),
    };
    LearnConfig {
        num_functions: 8,
        cluster_bits: 2,
        subset_sizes: vec![alpha],
        model_kind,
        k,
        redundancy_mode: modes[r.random_range(0..3)],
        redundancy_weight: [0.0, 0.5, 1.0][r.random_range(0..3)],
        label_weight: [0.0, 0.5][r.random_range(0..2)],
        ..Default::default()
    }
}

fn random_cluster_labels(r: &mut ChaCha8Rng, n: usize) -> Option<Vec<u64>> {
    r.random_bool(0.5)
        .then(|| (0..n).map(|_| r.random_range(0..4)).collect())
}

// ---------------------------------------------------------------- criteria

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let rows = r.random_range(1..=8);
        let cols = r.random_range(1..=8);
        let mut cells: Vec<u64> = (0..rows * cols).map(|_| r.random_range(0..=20)).collect();
        if cells.iter().all(|&c| c == 0) {
            cells[0] = 1;
        }
        let joint = JointCounts::new(rows, cols, cells.clone()).unwrap();
        let h = oracle_entropy(&cells);
        worst = worst.max((entropy(&cells).unwrap() - h).abs());
        worst = worst.max((joint_entropy(&joint).unwrap() - h).abs());
        worst = worst.max((mutual_information(&joint).unwrap() - oracle_mi(rows, cols, &cells)).abs());

        // label_term on points expanded from random (g, c, y) counts, plus
        // unlabeled points that must be ignored.
        let groups = r.random_range(1..=4);
        let mut counts = vec![[[0u64; 2]; 2]; groups];
        let mut points: Vec<(u64, bool, Option<u8>)> = Vec::new();
        for (g, by_c) in counts.iter_mut().enumerate() {
            for (c, by_y) in by_c.iter_mut().enumerate() {
                for (y, n) in by_y.iter_mut().enumerate() {
                    *n = r.random_range(0..=20);
                    points.extend((0..*n).map(|_| (g as u64 * 7 + 3, c == 1, Some(y as u8))));
                }
                points.extend((0..r.random_range(0..3)).map(|_| (g as u64 * 7 + 3, c == 1, None)));
            }
        }
        if counts.iter().flatten().flatten().all(|&n| n == 0) {
            counts[0][0][0] = 1;
            points.push((3, false, Some(0)));
        }
        points.shuffle(&mut r);
        let labels: Vec<Option<u8>> = points.iter().map(|p| p.2).collect();
        let clusters: Vec<u64> = points.iter().map(|p| p.0).collect();
        let candidate = BitColumn::from_fn(points.len(), |i| points[i].1);
        let got = label_term(&labels, &clusters, &candidate).unwrap();
        worst = worst.max((got - oracle_label_term(&counts)).abs());
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: worst <= 1e-12 && elapsed < Duration::from_secs(5),
        detail: format!("max |delta| = {worst:.3e} over 200 tables, {elapsed:.2?}"),
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut r = rng(2);
    let mut failures = Vec::new();
    let mut fixtures = 0;
    for alpha in [3usize, 4, 5] {
        for _ in 0..20 {
            let n = r.random_range(20..=40);
            let data = random_dataset(&mut r, n, 3);
            let kernel = KernelConfig::rbf(r.random_range(0.2..2.0));
            let config = random_config(&mut r, alpha);
            let cols = r.random_range(0..=5);
            let existing = random_matrix(&mut r, n, cols);
            let clusters = random_cluster_labels(&mut r, n);
            let problem = Problem::new(&data, &kernel).unwrap();
            let ctx = problem.context(&existing, clusters, &config);
            let mut refs: Vec<usize> = (0..n).collect();
            refs.shuffle(&mut r);
            refs.truncate(alpha);

            let mut split_rng = rng(99);
            let out = optimize_split(&refs, &problem, &ctx, &config, &mut split_rng).unwrap();

            let mut best = f64::NEG_INFINITY;
            for mask in 1..(1u32 << alpha) - 1 {
                let z: Vec<bool> = (0..alpha).map(|j| mask >> j & 1 == 1).collect();
                let h = HashFunction::fit(problem.references(&refs), z, &kernel, config.model_kind, config.k).unwrap();
                let column = BitColumn::from_fn(n, |i| hash_point(&h, &data.points()[i].payload, &kernel).unwrap());
                best = best.max(objective(&column, &ctx).unwrap());
            }
            fixtures += 1;
            let expected_candidates = (1usize << (alpha - 1)) - 1;
            if out.score != best || out.candidates_evaluated != expected_candidates {
                failures.push(format!(
                    "alpha {alpha}: got {} ({} candidates), oracle {best}",
                    out.score, out.candidates_evaluated
                ));
            }
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: failures.is_empty() && elapsed < Duration::from_secs(30),
        detail: if failures.is_empty() {
            format!("{fixtures} fixtures match the exhaustive oracle, {elapsed:.2?}")
        } else {
            format!("{} mismatches, first: {}", failures.len(), failures[0])
        },
    }
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let mut objective_mismatch = 0;
    for _ in 0..100 {
        let n = r.random_range(10..=60);
        let data = random_dataset(&mut r, n, 2);
        let kernel = KernelConfig::rbf(1.0);
        let config = random_config(&mut r, 4);
        let config = LearnConfig {
            redundancy_weight: r.random_range(0.0..2.0),
            label_weight: r.random_range(0.0..2.0),
            ..config
        };
        let cols = r.random_range(0..=6);
        let existing = random_matrix(&mut r, n, cols);
        let clusters = random_cluster_labels(&mut r, n);
        let problem = Problem::new(&data, &kernel).unwrap();
        let ctx = problem.context(&existing, clusters, &config);
        let c = BitColumn::from_fn(n, |_| r.random_bool(0.5));
        if objective(&c, &ctx).unwrap() != objective(&c.not(), &ctx).unwrap() {
            objective_mismatch += 1;
        }
    }

    let (data, _) = synth_generate(&SynthConfig {
        n_train: 60,
        n_test: 60,
        ..Default::default()
    })
    .unwrap();
    let kernel = KernelConfig::rbf(0.2);
    let mut bit_mismatch = 0;
    let mut functions = 0;
    for (model, k) in [(ModelKind::Rknn, 1), (ModelKind::Rknn, 3), (ModelKind::MaxMargin, 1)] {
        for _ in 0..20 {
            let alpha = r.random_range(3..=8);
            let mut idx: Vec<usize> = (0..data.len()).collect();
            idx.shuffle(&mut r);
            let refs: Vec<_> = idx[..alpha]
                .iter()
                .map(|&i| nuhash::hashfn::Reference {
                    id: data.points()[i].id.clone(),
                    payload: data.points()[i].payload.clone(),
                })
                .collect();
            let z: Vec<bool> = loop {
                let z: Vec<bool> = (0..alpha).map(|_| r.random_bool(0.5)).collect();
                if z.iter().any(|&b| b) && !z.iter().all(|&b| b) {
                    break z;
                }
            };
            let nz: Vec<bool> = z.iter().map(|b| !b).collect();
            let h = HashFunction::fit(refs.clone(), z, &kernel, model, k).unwrap();
            let hn = HashFunction::fit(refs, nz, &kernel, model, k).unwrap();
            functions += 1;
            for p in data.points() {
                if hash_point(&h, &p.payload, &kernel).unwrap() == hash_point(&hn, &p.payload, &kernel).unwrap() {
                    bit_mismatch += 1;
                }
            }
        }
    }
    Verdict {
        pass: objective_mismatch == 0 && bit_mismatch == 0,
        detail: format!(
            "objective asymmetries {objective_mismatch}/100; non-complemented bits {bit_mismatch} over {functions} functions x {} points",
            data.len()
        ),
    }
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let kernel = KernelConfig::rbf(0.1);
    let mut rhos = Vec::new();
    for seed in 0..SEEDS {
        let (data, _) = synth_generate(&SynthConfig {
            n_train: 100,
            n_test: 100,
            n_clusters: 4,
            dim: 8,
            shift: 0.0,
            seed,
            ..Default::default()
        })
        .unwrap();
        let config = LearnConfig {
            num_functions: 32,
            cluster_bits: 8,
            seed,
            ..Default::default()
        };
        let out = learn(&data, &kernel, &config).unwrap();
        let codes = out.matrix.to_rows();
        let mut r = rng(1000 + seed);
        let (mut sims, mut neg_hamming) = (Vec::new(), Vec::new());
        while sims.len() < 2000 {
            let (i, j) = (r.random_range(0..data.len()), r.random_range(0..data.len()));
            if i == j {
                continue;
            }
            sims.push(kernel_eval(&data.points()[i].payload, &data.points()[j].payload, &kernel).unwrap());
            neg_hamming.push(-(codes[i].hamming(&codes[j]) as f64));
        }
        rhos.push(spearman(&sims, &neg_hamming));
    }
    let good = rhos.iter().filter(|&&r| r > 0.5).count();
    let elapsed = start.elapsed();
    let shown: Vec<String> = rhos.iter().map(|r| format!("{r:.3}")).collect();
    Verdict {
        pass: good >= 9 && elapsed < Duration::from_secs(120),
        detail: format!("rho > 0.5 on {good}/10 seeds [{}], {elapsed:.2?}", shown.join(", ")),
    }
}

// Shared setup for criteria 5 to 7.

fn shift_setup(seed: u64) -> (SynthConfig, KernelConfig, LearnConfig, ForestConfig) {
    let synth = SynthConfig {
        n_train: 400,
        n_test: 400,
        n_clusters: 4,
        dim: 8,
        cluster_spread: 1.0,
        shift: 0.6,
        label_rule: LabelRule::Hyperplane,
        label_noise: 0.1,
        seed,
        ..Default::default()
    };
    let learn = LearnConfig {
        num_functions: 64,
        cluster_bits: 10,
        subset_sizes: vec![2, 3],
        seed,
        ..Default::default()
    };
    let forest = ForestConfig {
        trees: 100,
        seed,
        ..Default::default()
    };
    (synth, KernelConfig::rbf(0.1), learn, forest)
}

/// Trains on labeled TRAIN rows of `matrix` whose index passes `keep`, and
/// scores the forest on `test_codes`.
fn forest_f1(
    data: &Dataset,
    matrix: &HashcodeMatrix,
    keep: impl Fn(usize) -> bool,
    test_codes: &[Hashcode],
    gold: &[u8],
    config: &ForestConfig,
) -> f64 {
    let (codes, labels): (Vec<Hashcode>, Vec<u8>) = data
        .points()
        .iter()
        .enumerate()
        .filter(|(i, p)| p.split == Split::Train && keep(*i))
        .map(|(i, p)| (matrix.row(i), p.label.unwrap()))
        .unzip();
    let forest = train_forest(&codes, &labels, config).unwrap();
    evaluate(&predict_forest(&forest, test_codes).unwrap(), gold)
        .unwrap()
        .f1
}

struct ShiftRun {
    optimized_f1: f64,
    random_f1: f64,
    inductive_f1: f64,
    outcome: LearnOutcome,
    max_iterations: usize,
}

fn shift_run(seed: u64) -> ShiftRun {
    let (synth, kernel, config, forest) = shift_setup(seed);
    let (data, _) = synth_generate(&synth).unwrap();
    let test_rows: Vec<usize> = (0..data.len()).filter(|&i| data.points()[i].is_test()).collect();
    let gold: Vec<u8> = test_rows.iter().map(|&i| data.points()[i].label.unwrap()).collect();

    let outcome = learn(&data, &kernel, &config).unwrap();
    let optimized_codes: Vec<Hashcode> = test_rows.iter().map(|&i| outcome.matrix.row(i)).collect();
    let optimized_f1 = forest_f1(&data, &outcome.matrix, |_| true, &optimized_codes, &gold, &forest);

    let (_, random) = random_ensemble(&data, &kernel, &config).unwrap();
    let random_codes: Vec<Hashcode> = test_rows.iter().map(|&i| random.row(i)).collect();
    let random_f1 = forest_f1(&data, &random, |_| true, &random_codes, &gold, &forest);

    // Inductive: learn on TRAIN points only, a quarter held out as pseudo-test.
    let train_only = Dataset::new(data.points().iter().filter(|p| !p.is_test()).cloned().collect()).unwrap();
    let inductive_data = split_pseudo_test(&train_only, 0.25, seed).unwrap();
    let inductive = learn(&inductive_data, &kernel, &config).unwrap();
    let test_payloads: Vec<&Payload> = test_rows.iter().map(|&i| &data.points()[i].payload).collect();
    let inductive_codes = inductive.ensemble.hash_payloads(&test_payloads).unwrap().to_rows();
    let inductive_f1 = forest_f1(
        &inductive_data,
        &inductive.matrix,
        |_| true,
        &inductive_codes,
        &gold,
        &forest,
    );

    ShiftRun {
        optimized_f1,
        random_f1,
        inductive_f1,
        outcome,
        max_iterations: config.max_iterations(),
    }
}

fn criterion_5(runs: &[ShiftRun], elapsed: Duration) -> Verdict {
    let wins = runs.iter().filter(|r| r.optimized_f1 > r.random_f1).count();
    let mean_gain = runs.iter().map(|r| r.optimized_f1 - r.random_f1).sum::<f64>() / runs.len() as f64;
    let pairs: Vec<String> = runs
        .iter()
        .map(|r| format!("{:.3}/{:.3}", r.optimized_f1, r.random_f1))
        .collect();
    Verdict {
        pass: wins >= 8 && mean_gain >= 0.02 && elapsed < Duration::from_secs(600),
        detail: format!(
            "optimized beats random on {wins}/10 seeds, mean gain {mean_gain:+.4} F1 [{}], {elapsed:.2?}",
            pairs.join(" ")
        ),
    }
}

fn criterion_6(runs: &[ShiftRun]) -> Verdict {
    let n = runs.len() as f64;
    let transductive = runs.iter().map(|r| r.optimized_f1).sum::<f64>() / n;
    let inductive = runs.iter().map(|r| r.inductive_f1).sum::<f64>() / n;
    Verdict {
        pass: (transductive - inductive).abs() <= 0.05,
        detail: format!("mean F1 transductive {transductive:.4}, inductive {inductive:.4}"),
    }
}

fn criterion_7(runs: &[ShiftRun]) -> Verdict {
    let mut problems = Vec::new();
    for (seed, run) in runs.iter().enumerate() {
        let out = &run.outcome;
        if out.ensemble.len() != 64
            || out.report.truncation_warning.is_some()
            || out.report.iterations > run.max_iterations
        {
            problems.push(format!(
                "seed {seed}: {} functions after {} iterations",
                out.ensemble.len(),
                out.report.iterations
            ));
        }
        for (f, t) in out.ensemble.functions.iter().zip(&out.report.survived_thresholds) {
            if let Some(t) = t {
                if f.objective_value < *t {
                    problems.push(format!(
                        "seed {seed}: f = {} below survived threshold {t}",
                        f.objective_value
                    ));
                }
            }
        }
    }
    let deletions: usize = runs
        .iter()
        .flat_map(|r| &r.outcome.report.steps)
        .map(|s| s.deletion.removed.len())
        .sum();
    let iterations: Vec<String> = runs.iter().map(|r| r.outcome.report.iterations.to_string()).collect();
    Verdict {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "H = 64 reached on 10/10 seeds (iterations {}, limit 192), {deletions} deletions, thresholds respected",
                iterations.join(",")
            )
        } else {
            format!("{} violations, first: {}", problems.len(), problems[0])
        },
    }
}

fn run_fit(bin: &str, dir: &Path, out: &str, threads: usize) -> Vec<u8> {
    let status = Command::new(bin)
        .args(["fit", "--train"])
        .arg(dir.join("train.jsonl"))
        .arg("--test")
        .arg(dir.join("test.jsonl"))
        .arg("--config")
        .arg(dir.join("config.json"))
        .arg("--out")
        .arg(dir.join(out))
        .args(["--seed", "5", "--threads", &threads.to_string()])
        .status()
        .unwrap();
    assert!(status.success(), "fit failed: {status}");
    std::fs::read(dir.join(out)).unwrap()
}

fn criterion_8() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let (data, _) = synth_generate(&SynthConfig {
        n_train: 150,
        n_test: 150,
        shift: 0.5,
        ..Default::default()
    })
    .unwrap();
    let split = |s: Split| Dataset::new(data.points().iter().filter(|p| p.split == s).cloned().collect()).unwrap();
    split(Split::Train).write(&dir.path().join("train.jsonl")).unwrap();
    split(Split::Test).write(&dir.path().join("test.jsonl")).unwrap();
    std::fs::write(
        dir.path().join("config.json"),
        r#"{"kernel":{"kind":"rbf","gamma":0.2},"learn":{"num_functions":24,"cluster_bits":6},"forest":{"trees":20}}"#,
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_nuhash");
    let a = run_fit(bin, dir.path(), "a.json", 4);
    let b = run_fit(bin, dir.path(), "b.json", 4);
    let one = run_fit(bin, dir.path(), "t1.json", 1);
    let eight = run_fit(bin, dir.path(), "t8.json", 8);
    Verdict {
        pass: a == b && one == eight && a == one,
        detail: format!(
            "repeat identical: {}, threads 1 vs 8 identical: {} ({} bytes)",
            a == b,
            one == eight,
            a.len()
        ),
    }
}

fn criterion_9() -> Verdict {
    let table = [("00", 0u8), ("01", 1), ("10", 1), ("11", 0)];
    let (codes, labels): (Vec<Hashcode>, Vec<u8>) = (0..8)
        .flat_map(|_| table.iter().map(|(c, y)| (Hashcode::parse(c).unwrap(), *y)))
        .unzip();
    let forest = train_forest(
        &codes,
        &labels,
        &ForestConfig {
            trees: 25,
            max_depth: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let predicted = predict_forest(&forest, &codes).unwrap();
    let accuracy = predicted.iter().zip(&labels).filter(|(a, b)| a == b).count() as f64 / labels.len() as f64;

    let mut r = rng(9);
    let mut mismatches = 0;
    for _ in 0..100 {
        let n = r.random_range(1..=50);
        let p: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        let g: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        if evaluate(&p, &g).unwrap() != oracle_metrics(&p, &g) {
            mismatches += 1;
        }
    }
    Verdict {
        pass: accuracy == 1.0 && mismatches == 0,
        detail: format!("XOR training accuracy {accuracy}; evaluate mismatches {mismatches}/100"),
    }
}

fn main() {
    let mut verdicts: Vec<(u32, &str, Verdict)> = vec![
        (1, "estimator oracle", criterion_1()),
        (2, "split-search exactness", criterion_2()),
        (3, "complement invariance", criterion_3()),
        (4, "locality", criterion_4()),
    ];
    let start = Instant::now();
    let runs: Vec<ShiftRun> = (0..SEEDS).map(shift_run).collect();
    let elapsed = start.elapsed();
    verdicts.push((5, "optimized vs random ablation", criterion_5(&runs, elapsed)));
    verdicts.push((6, "inductive vs transductive", criterion_6(&runs)));
    verdicts.push((7, "deletion safety", criterion_7(&runs)));
    verdicts.push((8, "determinism", criterion_8()));
    verdicts.push((9, "forest sanity", criterion_9()));

    let mut failed = 0;
    for (n, name, v) in &verdicts {
        println!(
            "criterion {n} ({name}): {} - {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {}/{} criteria passed",
        verdicts.len() - failed,
        verdicts.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
