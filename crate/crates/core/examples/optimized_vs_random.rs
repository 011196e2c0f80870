//! Optimized codes against randomly split codes of the same size, under a
//! train/test shift. Usage: optimized_vs_random [seeds]
use nuhash::synth::LabelRule;
use nuhash::{
    evaluate, learn, predict_forest, random_ensemble, synth_generate, train_forest, Dataset, ForestConfig,
    HashcodeMatrix, KernelConfig, LearnConfig, SynthConfig,
};

fn f1(data: &Dataset, matrix: &HashcodeMatrix, seed: u64) -> nuhash::Result<f64> {
    let (mut train, mut y, mut test, mut gold) = (vec![], vec![], vec![], vec![]);
    for (i, p) in data.points().iter().enumerate() {
        let label = p.label.expect("synthetic points are labelled");
        if p.is_test() {
            test.push(matrix.row(i));
            gold.push(label);
        } else {
            train.push(matrix.row(i));
            y.push(label);
        }
    }
    let forest = train_forest(
        &train,
        &y,
        &ForestConfig {
            seed,
            ..Default::default()
        },
    )?;
    Ok(evaluate(&predict_forest(&forest, &test)?, &gold)?.f1)
}

fn main() -> nuhash::Result<()> {
    let seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let kernel = KernelConfig::rbf(0.1);
    let mut wins = 0;
    for seed in 0..seeds {
        let (data, _) = synth_generate(&SynthConfig {
            n_train: 400,
            n_test: 400,
            shift: 0.6,
            label_rule: LabelRule::Hyperplane,
            label_noise: 0.1,
            seed,
            ..Default::default()
        })?;
        let config = LearnConfig {
            num_functions: 64,
            cluster_bits: 10,
            subset_sizes: vec![2, 3],
            seed,
            ..Default::default()
        };
        let opt = f1(&data, &learn(&data, &kernel, &config)?.matrix, seed)?;
        let rnd = f1(&data, &random_ensemble(&data, &kernel, &config)?.1, seed)?;
        wins += usize::from(opt > rnd);
        println!("seed {seed}: optimized {opt:.4} random {rnd:.4}");
    }
    println!("optimized wins {wins}/{seeds}");
    Ok(())
}
