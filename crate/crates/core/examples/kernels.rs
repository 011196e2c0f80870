//! Kernel values for vectors and token sequences.
use nuhash::kernels::{kernel_eval, KernelConfig};
use nuhash::Payload;

fn main() -> nuhash::Result<()> {
    let a = Payload::Vector(vec![0.0, 1.0, 2.0]);
    let b = Payload::Vector(vec![0.5, 1.0, 1.5]);
    for gamma in [0.1, 1.0, 10.0] {
        println!(
            "rbf(gamma={gamma}) = {:.6}",
            kernel_eval(&a, &b, &KernelConfig::rbf(gamma))?
        );
    }
    println!("cosine = {:.6}", kernel_eval(&a, &b, &KernelConfig::cosine())?);

    let toks = |s: &str| Payload::Tokens(s.split_whitespace().map(str::to_string).collect());
    let (s, t) = (toks("the cat sat on the mat"), toks("the cat lay on a mat"));
    for max_len in 1..=3 {
        let cfg = KernelConfig::subseq(0.5, max_len, true);
        println!("subseq(lambda=0.5, n={max_len}) = {:.6}", kernel_eval(&s, &t, &cfg)?);
    }
    Ok(())
}
