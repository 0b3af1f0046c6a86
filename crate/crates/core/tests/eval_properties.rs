use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfhog_core::eval::{
    abs_ranks, exact_p_value, map_score, normal_p_value, run_protocol, wilcoxon_signed_rank,
    ConfusionMatrix, ProtocolConfig, TrainSize, WilcoxonMethod,
};
use tfhog_core::Matrix;
use tfhog_testkit::wilcoxon::{exact_p, rank_sums};

/// Paired samples whose differences are small integers, so ties and zeros occur.
fn tied_samples(n: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let a: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0..20) as f64 / 4.0)
        .collect();
    let b: Vec<f64> = a
        .iter()
        .map(|v| v - rng.random_range(-4i32..=5) as f64 / 4.0)
        .collect();
    (a, b)
}

#[test]
fn exact_wilcoxon_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 300 {
        let n = rng.random_range(5..=14);
        let (a, b) = tied_samples(n, &mut rng);
        let nonzero = a.iter().zip(&b).filter(|(x, y)| x != y).count();
        if !(5..=12).contains(&nonzero) {
            continue;
        }
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.method, WilcoxonMethod::Exact);
        let d: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| x - y)
            .filter(|v| *v != 0.0)
            .collect();
        assert_eq!((r.w_plus, r.w_minus), rank_sums(&d));
        assert_eq!(
            r.p_value.to_bits(),
            exact_p(&a, &b).to_bits(),
            "a={a:?} b={b:?}"
        );
        checked += 1;
    }
}

/// Untied ranks only: with many tied magnitudes the exact distribution is
/// lumpy and the gap can slightly exceed 0.02.
#[test]
fn normal_approximation_tracks_exact_at_twelve() {
    let ranks: Vec<f64> = (1..=12).map(f64::from).collect();
    let total: f64 = ranks.iter().sum();
    for w in 0..=(total / 2.0) as u32 {
        let stat = f64::from(w);
        let gap = (normal_p_value(&ranks, stat) - exact_p_value(&ranks, stat)).abs();
        assert!(gap <= 0.02, "W = {w}: gap {gap}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..500 {
        let d: Vec<f64> = (0..12)
            .map(|_| rng.random_range(0.01..5.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let r = abs_ranks(&d);
        let plus: f64 = d
            .iter()
            .zip(&r)
            .filter(|(v, _)| **v > 0.0)
            .map(|(_, x)| x)
            .sum();
        let stat = plus.min(total - plus);
        let gap = (normal_p_value(&r, stat) - exact_p_value(&r, stat)).abs();
        assert!(gap <= 0.02, "{d:?}: gap {gap}");
    }
}

#[test]
fn antisymmetric_differences_give_p_one() {
    let a = [1.0, -1.0, 2.0, -2.0, 3.0, -3.0];
    let r = wilcoxon_signed_rank(&a, &[0.0; 6]).unwrap();
    assert_eq!(r.w_plus, r.w_minus);
    assert_eq!(r.p_value, 1.0);
}

fn one_hot(labels: &[usize], n_classes: usize) -> Matrix {
    Matrix::from_fn(labels.len(), n_classes, |i, j| {
        f64::from(u8::from(labels[i] == j))
    })
}

#[test]
fn protocol_on_one_hot_features() {
    let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
    let cfg = ProtocolConfig {
        n_splits: 4,
        seed: 17,
        ..ProtocolConfig::default()
    };
    let report = run_protocol(&one_hot(&labels, 3), &labels, 3, &cfg).unwrap();
    assert_eq!(report.per_split_map, vec![1.0; 4]);
    assert_eq!((report.map_mean, report.map_std), (1.0, 0.0));
    // 30 examples, 6 held out per split
    assert_eq!(report.confusion_sum.total(), 4 * 6);

    // Reordering the examples changes which rows are drawn, not the outcome.
    let mut order: Vec<usize> = (0..30).collect();
    order.reverse();
    order.rotate_left(7);
    let shuffled: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    let again = run_protocol(&one_hot(&shuffled, 3), &shuffled, 3, &cfg).unwrap();
    assert_eq!(again.per_split_map, report.per_split_map);
    assert_eq!(again.confusion_sum, report.confusion_sum);
}

#[test]
fn fixed_train_count_sizes() {
    let labels: Vec<usize> = (0..50).map(|i| usize::from(i >= 25)).collect();
    let x = Matrix::from_fn(50, 2, |i, j| {
        if j == labels[i] {
            1.0
        } else {
            0.1 * i as f64 / 50.0
        }
    });
    let cfg = ProtocolConfig {
        n_splits: 3,
        train_size: TrainSize::Count(10),
        ..ProtocolConfig::default()
    };
    let report = run_protocol(&x, &labels, 2, &cfg).unwrap();
    for o in &report.outcomes {
        assert_eq!((o.split.train.len(), o.split.test.len()), (10, 40));
    }
    assert_eq!(report.confusion_sum.total(), 3 * 40);
}

proptest! {
    #[test]
    fn map_is_a_probability(
        pairs in prop::collection::vec((0usize..4, 0usize..4), 1..60),
    ) {
        let (t, p): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        let m = map_score(&t, &p, 4).unwrap();
        prop_assert!((0.0..=1.0).contains(&m));
    }

    #[test]
    fn map_equals_accuracy_for_symmetric_uniform_confusion(
        n in 2usize..6,
        diag in 1u64..20,
        off in prop::collection::vec(0u64..5, 15),
    ) {
        // Symmetric off-diagonal part with equal row sums: a constant
        // circulant pattern, so every predicted-class count is the same.
        let mut counts = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let k = (j + n - i) % n;
                let k = k.min(n - k);
                counts[i * n + j] = if k == 0 { diag } else { off[k] };
            }
        }
        let cm = ConfusionMatrix::from_counts(n, counts).unwrap();
        let accuracy = (0..n).map(|i| cm.get(i, i)).sum::<u64>() as f64 / cm.total() as f64;
        prop_assert!((cm.map() - accuracy).abs() < 1e-12);
    }
}
