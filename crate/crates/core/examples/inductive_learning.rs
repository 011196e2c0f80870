//! Learning on training data only, with a held-out pseudo-test fraction,
//! then hashing unseen points.
use nuhash::{
    hash_all, learn, split_pseudo_test, synth_generate, Dataset, KernelConfig, LearnConfig, Split, SynthConfig,
};

fn main() -> nuhash::Result<()> {
    let (data, _) = synth_generate(&SynthConfig::default())?;
    let (train, unseen): (Vec<_>, Vec<_>) = data.into_points().into_iter().partition(|p| p.split == Split::Train);
    let train = split_pseudo_test(&Dataset::new(train)?, 0.25, 7)?;
    println!(
        "train {} / pseudo-test {}",
        train.count(Split::Train),
        train.count(Split::Test)
    );

    let config = LearnConfig {
        num_functions: 24,
        cluster_bits: 4,
        ..Default::default()
    };
    let out = learn(&train, &KernelConfig::rbf(0.1), &config)?;
    let unseen = Dataset::new(unseen)?;
    let codes = hash_all(&out.ensemble, &unseen)?;
    for (i, p) in unseen.points().iter().take(5).enumerate() {
        println!("{} {}", p.id, codes.row(i));
    }
    Ok(())
}
