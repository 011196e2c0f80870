//! Learning codes on train and test points together, then classifying.
use nuhash::synth::LabelRule;
use nuhash::{
    evaluate, learn, predict_forest, synth_generate, train_forest, ForestConfig, KernelConfig, LearnConfig, SynthConfig,
};

fn main() -> nuhash::Result<()> {
    let (data, _) = synth_generate(&SynthConfig {
        n_train: 300,
        n_test: 300,
        shift: 0.6,
        label_rule: LabelRule::Hyperplane,
        ..Default::default()
    })?;
    let config = LearnConfig {
        num_functions: 48,
        cluster_bits: 8,
        subset_sizes: vec![2, 3],
        ..Default::default()
    };
    let out = learn(&data, &KernelConfig::rbf(0.1), &config)?;
    println!(
        "{} functions after {} iterations",
        out.ensemble.len(),
        out.report.iterations
    );

    let (mut train, mut y, mut test, mut gold) = (vec![], vec![], vec![], vec![]);
    for (i, p) in data.points().iter().enumerate() {
        let (codes, labels) = if p.is_test() {
            (&mut test, &mut gold)
        } else {
            (&mut train, &mut y)
        };
        codes.push(out.matrix.row(i));
        labels.push(p.label.expect("synthetic points are labelled"));
    }
    let forest = train_forest(&train, &y, &ForestConfig::default())?;
    let m = evaluate(&predict_forest(&forest, &test)?, &gold)?;
    println!("precision {:.4} recall {:.4} f1 {:.4}", m.precision, m.recall, m.f1);
    Ok(())
}
