use nuhash::codes::{BitColumn, Hashcode, HashcodeMatrix};
use nuhash::dataset::{DataPoint, Dataset, Payload, PayloadKind, Split};
use nuhash::infotheory::{conditional_entropy, entropy, joint_entropy, mutual_information, JointCounts};
use nuhash::kernels::{kernel_eval, KernelConfig};
use nuhash::optimizer::{objective, LearnConfig, Problem};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn joint() -> impl Strategy<Value = JointCounts> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(0u64..20, r * c)
            .prop_filter("nonempty", |cells| cells.iter().any(|&v| v > 0))
            .prop_map(move |cells| JointCounts::new(r, c, cells).unwrap())
    })
}

fn vectors(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, dim)
}

fn tokens() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 1..7)
        .prop_map(|v| v.into_iter().map(str::to_string).collect())
}

proptest! {
    #[test]
    fn chain_rule(j in joint()) {
        let lhs = joint_entropy(&j).unwrap();
        let rhs = entropy(&j.row_marginal()).unwrap() + conditional_entropy(&j).unwrap();
        prop_assert!((lhs - rhs).abs() < TOL);
    }

    #[test]
    fn mutual_information_is_symmetric_and_bounded(j in joint()) {
        let mi = mutual_information(&j).unwrap();
        prop_assert!((mi - mutual_information(&j.transpose()).unwrap()).abs() < TOL);
        prop_assert!(mi >= 0.0);
        prop_assert!(mi <= entropy(&j.row_marginal()).unwrap().min(entropy(&j.col_marginal()).unwrap()) + TOL);
    }

    #[test]
    fn mutual_information_ignores_row_order(a in prop::collection::vec(0usize..3, 1..40), seed in any::<u64>()) {
        let b: Vec<usize> = a.iter().enumerate().map(|(i, &v)| (v + i + seed as usize % 7) % 4).collect();
        let mut perm: Vec<usize> = (0..a.len()).collect();
        perm.rotate_left(seed as usize % a.len());
        let pa: Vec<usize> = perm.iter().map(|&i| a[i]).collect();
        let pb: Vec<usize> = perm.iter().map(|&i| b[i]).collect();
        let x = mutual_information(&JointCounts::from_labels(&a, &b).unwrap()).unwrap();
        let y = mutual_information(&JointCounts::from_labels(&pa, &pb).unwrap()).unwrap();
        prop_assert!((x - y).abs() < TOL);
    }

    #[test]
    fn vector_kernels_are_symmetric(a in vectors(4), b in vectors(4), gamma in 0.01f64..2.0) {
        for cfg in [KernelConfig::rbf(gamma), KernelConfig::cosine()] {
            let (pa, pb) = (Payload::Vector(a.clone()), Payload::Vector(b.clone()));
            let ab = kernel_eval(&pa, &pb, &cfg).unwrap();
            prop_assert!((ab - kernel_eval(&pb, &pa, &cfg).unwrap()).abs() < TOL);
        }
        let p = Payload::Vector(a.clone());
        prop_assert!((kernel_eval(&p, &p, &KernelConfig::rbf(gamma)).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn subsequence_kernel_is_symmetric_and_normalized(s in tokens(), t in tokens(), lambda in 0.1f64..0.9) {
        let cfg = KernelConfig::subseq(lambda, 3, true);
        let (ps, pt) = (Payload::Tokens(s), Payload::Tokens(t));
        let st = kernel_eval(&ps, &pt, &cfg).unwrap();
        prop_assert!((st - kernel_eval(&pt, &ps, &cfg).unwrap()).abs() < TOL);
        prop_assert!((kernel_eval(&ps, &ps, &cfg).unwrap() - 1.0).abs() < TOL);
        prop_assert!((-TOL..=1.0 + TOL).contains(&st));
    }

    #[test]
    fn objective_is_invariant_under_complement(
        bits in prop::collection::vec(any::<bool>(), 6..40),
        weights in (0.0f64..2.0, 0.0f64..2.0),
    ) {
        let n = bits.len();
        let points = bits
            .iter()
            .enumerate()
            .map(|(i, _)| DataPoint {
                id: format!("p{i}"),
                payload: Payload::Vector(vec![i as f64]),
                split: if i % 3 == 0 { Split::Test } else { Split::Train },
                label: (i % 3 != 0).then_some((i % 2) as u8),
            })
            .collect();
        let data = Dataset::new(points).unwrap();
        let cfg = KernelConfig::rbf(0.1);
        let problem = Problem::new(&data, &cfg).unwrap();
        let existing = HashcodeMatrix::from_columns(n, vec![BitColumn::from_fn(n, |i| i % 4 < 2)]);
        let learn = LearnConfig {
            cluster_bits: 1,
            redundancy_weight: weights.0,
            label_weight: weights.1,
            ..Default::default()
        };
        let ctx = problem.context(&existing, Some(existing.column(0).iter().map(u64::from).collect()), &learn);
        let c = BitColumn::from_bools(&bits);
        prop_assert_eq!(objective(&c, &ctx).unwrap(), objective(&c.not(), &ctx).unwrap());
    }

    #[test]
    fn bit_column_round_trips(bits in prop::collection::vec(any::<bool>(), 0..200)) {
        let c = BitColumn::from_bools(&bits);
        prop_assert_eq!(c.to_bools(), bits.clone());
        prop_assert_eq!(c.count_ones(), bits.iter().filter(|&&b| b).count() as u64);
        prop_assert_eq!(c.not().not(), c);
    }

    #[test]
    fn hashcode_string_round_trips(bits in prop::collection::vec(any::<bool>(), 0..100)) {
        let code = Hashcode(bits);
        prop_assert_eq!(Hashcode::parse(&code.to_string()), Some(code));
    }

    #[test]
    fn dataset_jsonl_round_trips(rows in prop::collection::vec((vectors(3), any::<bool>(), prop::option::of(0u8..2)), 1..20)) {
        let points = rows
            .into_iter()
            .enumerate()
            .map(|(i, (v, test, label))| DataPoint {
                id: format!("id-{i}"),
                payload: Payload::Vector(v),
                split: if test { Split::Test } else { Split::Train },
                label,
            })
            .collect();
        let data = Dataset::new(points).unwrap();
        let back = Dataset::parse_str(&data.to_jsonl(), "mem", Some(PayloadKind::Vector)).unwrap();
        prop_assert_eq!(back, data);
    }
}
