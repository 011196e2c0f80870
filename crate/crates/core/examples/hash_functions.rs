//! Fitting a single hash function from a labelled reference set.
use nuhash::hashfn::{hash_point, HashFunction, ModelKind, Reference};
use nuhash::kernels::KernelConfig;
use nuhash::Payload;

fn main() -> nuhash::Result<()> {
    let kernel = KernelConfig::rbf(0.5);
    let refs: Vec<Reference> = [(-2.0, 0.0), (-1.5, 1.0), (2.0, 0.0), (1.5, -1.0)]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Reference {
            id: format!("r{i}"),
            payload: Payload::Vector(vec![x, y]),
        })
        .collect();
    let z = vec![false, false, true, true];

    for kind in [ModelKind::Rknn, ModelKind::MaxMargin] {
        let h = HashFunction::fit(refs.clone(), z.clone(), &kernel, kind, 1)?;
        let bits: String = (-3..=3)
            .map(|x| {
                let p = Payload::Vector(vec![x as f64, 0.0]);
                hash_point(&h, &p, &kernel).map(|b| if b { '1' } else { '0' })
            })
            .collect::<nuhash::Result<_>>()?;
        println!("{kind:?}: x=-3..3 -> {bits}");
    }
    Ok(())
}
