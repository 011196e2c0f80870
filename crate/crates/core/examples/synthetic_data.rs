//! Cluster mixing in generated data at several shift levels.
use nuhash::{synth_generate, SynthConfig};

fn main() -> nuhash::Result<()> {
    for shift in [0.0, 0.5, 1.0] {
        let config = SynthConfig {
            n_train: 1000,
            n_test: 1000,
            shift,
            ..Default::default()
        };
        let (data, meta) = synth_generate(&config)?;
        let mut counts = vec![[0usize; 2]; config.n_clusters];
        for (p, m) in data.points().iter().zip(&meta) {
            counts[m.cluster][usize::from(p.is_test())] += 1;
        }
        println!("shift {shift}: expected test mixing {:?}", config.test_mixing());
        for (c, [train, test]) in counts.iter().enumerate() {
            println!("  cluster {c}: train {train:4} test {test:4}");
        }
    }
    Ok(())
}
