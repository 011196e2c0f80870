//! Saving a learned model and hashing with the reloaded copy.
use nuhash::{hash_all, learn, synth_generate, KernelConfig, LearnConfig, ModelFile, SynthConfig};

fn main() -> nuhash::Result<()> {
    let (data, _) = synth_generate(&SynthConfig {
        n_train: 60,
        n_test: 40,
        ..Default::default()
    })?;
    let config = LearnConfig {
        num_functions: 10,
        cluster_bits: 3,
        ..Default::default()
    };
    let out = learn(&data, &KernelConfig::rbf(0.1), &config)?;
    let bytes = ModelFile::new(&out.ensemble, &config).to_bytes()?;
    let model = ModelFile::from_bytes(&bytes)?;
    println!(
        "{} bytes, {} functions, {} reference points",
        bytes.len(),
        model.functions.len(),
        model.reference_points.len()
    );
    assert_eq!(hash_all(&model.ensemble()?, &data)?, out.matrix);
    println!("reloaded model reproduces the codes");
    Ok(())
}
