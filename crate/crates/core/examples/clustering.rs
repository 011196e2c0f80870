//! Clusters induced by the first bits of the codes.
use nuhash::clustering::assign_clusters;
use nuhash::{learn, synth_generate, KernelConfig, LearnConfig, SynthConfig};

fn main() -> nuhash::Result<()> {
    let (data, _) = synth_generate(&SynthConfig {
        n_train: 150,
        n_test: 150,
        shift: 0.5,
        ..Default::default()
    })?;
    let config = LearnConfig {
        num_functions: 16,
        cluster_bits: 3,
        ..Default::default()
    };
    let out = learn(&data, &KernelConfig::rbf(0.1), &config)?;
    let is_test = nuhash::BitColumn::from_fn(data.len(), |i| data.points()[i].is_test());
    let table = assign_clusters(&out.matrix, config.cluster_bits, &is_test)?;
    println!("{:>7} {:>6} {:>5} {:>9}", "pattern", "train", "test", "H(x|c)");
    for c in table.clusters() {
        println!(
            "{:>7} {:>6} {:>5} {:>9.4}",
            table.pattern(c.id),
            c.train_count,
            c.test_count,
            c.x_entropy
        );
    }
    println!("mean x-entropy {:.4}", table.mean_x_entropy());
    Ok(())
}
