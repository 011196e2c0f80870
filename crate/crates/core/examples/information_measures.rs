//! Entropy, mutual information and the redundancy of a new bit.
use nuhash::codes::{BitColumn, HashcodeMatrix};
use nuhash::infotheory::{
    conditional_entropy, entropy, joint_entropy, mutual_information, redundancy_score, JointCounts, RedundancyMode,
};

fn main() -> nuhash::Result<()> {
    println!("H(fair coin) = {:.4} bits", entropy(&[50, 50])?);
    println!("H(3:1)       = {:.4} bits", entropy(&[75, 25])?);

    let j = JointCounts::new(2, 2, vec![40, 10, 10, 40])?;
    println!(
        "H(a,b) = {:.4}  H(b|a) = {:.4}  I(a;b) = {:.4}",
        joint_entropy(&j)?,
        conditional_entropy(&j)?,
        mutual_information(&j)?
    );

    let n = 16;
    let existing = HashcodeMatrix::from_columns(
        n,
        vec![BitColumn::from_fn(n, |i| i < 8), BitColumn::from_fn(n, |i| i % 2 == 0)],
    );
    for (name, c) in [
        ("copy of bit 0", BitColumn::from_fn(n, |i| i < 8)),
        ("independent", BitColumn::from_fn(n, |i| i % 4 < 2)),
    ] {
        let r = redundancy_score(&c, &existing, RedundancyMode::MaxPairwise, 2)?;
        println!("redundancy of {name}: {r:.4}");
    }
    Ok(())
}
