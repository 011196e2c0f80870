//! Random forest and Hamming kNN on hand-written codes.
use nuhash::{evaluate, knn_hamming, predict_forest, train_forest, ForestConfig, Hashcode};

fn main() -> nuhash::Result<()> {
    // Label is the XOR of the first two bits; the third bit is noise.
    let codes: Vec<Hashcode> = (0..8u8)
        .map(|v| Hashcode((0..3).map(|b| v >> b & 1 == 1).collect()))
        .collect();
    let labels: Vec<u8> = codes.iter().map(|c| u8::from(c.bits()[0] ^ c.bits()[1])).collect();
    let train: Vec<Hashcode> = codes.iter().cycle().take(64).cloned().collect();
    let y: Vec<u8> = labels.iter().cycle().take(64).copied().collect();

    let forest = train_forest(
        &train,
        &y,
        &ForestConfig {
            trees: 25,
            max_depth: 2,
            ..Default::default()
        },
    )?;
    let predicted = predict_forest(&forest, &codes)?;
    println!("forest: {:?}", evaluate(&predicted, &labels)?);

    let knn: Vec<u8> = codes
        .iter()
        .map(|q| knn_hamming(&train, &y, q, 1))
        .collect::<nuhash::Result<_>>()?;
    println!("1-nn:   {:?}", evaluate(&knn, &labels)?);
    Ok(())
}
