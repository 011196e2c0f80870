//! Hashing token sequences with the subsequence kernel.
use nuhash::synth::SynthMode;
use nuhash::{learn, synth_generate, KernelConfig, LearnConfig, SynthConfig};

fn main() -> nuhash::Result<()> {
    let (data, meta) = synth_generate(&SynthConfig {
        mode: SynthMode::TokenGrammar,
        n_train: 60,
        n_test: 40,
        vocab_size: 30,
        seq_len: 8,
        ..Default::default()
    })?;
    let config = LearnConfig {
        num_functions: 12,
        cluster_bits: 3,
        subset_sizes: vec![4, 6],
        ..Default::default()
    };
    let out = learn(&data, &KernelConfig::subseq(0.5, 3, true), &config)?;
    for (i, (p, m)) in data.points().iter().zip(&meta).take(8).enumerate() {
        println!("cluster {} {} {}", m.cluster, out.matrix.row(i), p.id);
    }
    Ok(())
}
