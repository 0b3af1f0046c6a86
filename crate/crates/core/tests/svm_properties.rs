use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfhog_core::learn::{
    kernel_matrix, solve_dual, train_binary, vote, Hyperparams, KernelSpec, SvmModel, DEFAULT_TOL,
};
use tfhog_core::Matrix;
use tfhog_testkit::eig::symmetric_eigenvalues;
use tfhog_testkit::problems::random_binary_problems;
use tfhog_testkit::qp::{dual_objective, solve_exhaustive};

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-2.0..2.0))
}

#[test]
fn gaussian_gram_is_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for sigma in [0.3, 1.0, 5.0] {
        for _ in 0..3 {
            let x = random_matrix(50, 4, &mut rng);
            let k = kernel_matrix(&x, &KernelSpec::gaussian(sigma).unwrap());
            let rows: Vec<Vec<f64>> = (0..50).map(|i| k.row(i).to_vec()).collect();
            for i in 0..50 {
                for j in 0..50 {
                    assert_eq!(rows[i][j], rows[j][i]);
                }
            }
            let min = symmetric_eigenvalues(&rows)[0];
            assert!(min >= -1e-8, "sigma {sigma}: smallest eigenvalue {min}");
        }
    }
}

#[test]
fn dual_matches_exhaustive_qp() {
    for (k, p) in random_binary_problems(20, 2024).iter().enumerate() {
        let gram = p.gram();
        let oracle = solve_exhaustive(&gram, &p.y, p.c);
        let n = p.y.len();
        let g = Matrix::from_fn(n, n, |i, j| gram[i][j]);
        let sol = solve_dual(&g, &p.y, p.c, DEFAULT_TOL).unwrap();
        let rel =
            (sol.stats.objective - oracle.objective).abs() / oracle.objective.abs().max(1e-12);
        assert!(
            rel <= 1e-4,
            "problem {k}: smo {} vs oracle {} (rel {rel:.2e})",
            sol.stats.objective,
            oracle.objective
        );
        assert!(
            sol.stats.kkt_gap <= 1e-3,
            "problem {k}: gap {}",
            sol.stats.kkt_gap
        );
        // The reported objective is the objective of the returned multipliers.
        assert!((dual_objective(&gram, &p.y, &sol.alpha) - sol.stats.objective).abs() < 1e-9);
        assert!(sol.alpha.iter().all(|&a| (0.0..=p.c).contains(&a)));
        let balance: f64 = sol.alpha.iter().zip(&p.y).map(|(a, y)| a * y).sum();
        assert!(balance.abs() < 1e-9);
    }
}

#[test]
fn separable_data_is_fit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 60;
    let mut x = random_matrix(n, 3, &mut rng);
    let y: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    for i in 0..n {
        x[(i, 0)] += 3.0 * y[i];
    }
    let (svm, stats) = train_binary(&x, &y, 1000.0, KernelSpec::Linear, DEFAULT_TOL).unwrap();
    assert!(stats.kkt_gap <= DEFAULT_TOL);
    for i in 0..n {
        assert!(svm.decision(x.row(i)) * y[i] > 0.0, "row {i}");
    }

    let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
    let mut x3 = random_matrix(n, 2, &mut rng);
    for i in 0..n {
        x3[(i, labels[i] % 2)] += 6.0 * (labels[i] as f64 + 1.0);
    }
    let names = ["a", "b", "c"].map(String::from).to_vec();
    let hyper = Hyperparams {
        c: 1000.0,
        kernel: KernelSpec::Linear,
    };
    let model = SvmModel::fit(&x3, &labels, names, hyper, DEFAULT_TOL).unwrap();
    for i in 0..n {
        assert_eq!(model.predict(x3.row(i)).unwrap().class, labels[i]);
    }
}

#[test]
fn training_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_matrix(40, 5, &mut rng);
    let labels: Vec<usize> = (0..40).map(|i| (i * 7) % 4).collect();
    let names = ["a", "b", "c", "d"].map(String::from).to_vec();
    let hyper = Hyperparams {
        c: 2.0,
        kernel: KernelSpec::gaussian(1.5).unwrap(),
    };
    let a = SvmModel::fit(&x, &labels, names.clone(), hyper, DEFAULT_TOL).unwrap();
    let b = SvmModel::fit(&x, &labels, names, hyper, DEFAULT_TOL).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #[test]
    fn vote_ignores_positive_rescaling(
        n in 2usize..6,
        raw in prop::collection::vec(-5.0..5.0f64, 15),
        scale in 1e-3..1e3f64,
    ) {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((i, j, raw[pairs.len()]));
            }
        }
        let base = vote(n, pairs.iter().copied());
        let scaled = vote(n, pairs.iter().map(|&(i, j, d)| (i, j, d * scale)));
        prop_assert_eq!(base.class, scaled.class);
        prop_assert_eq!(base.votes, scaled.votes);
    }

    #[test]
    fn kkt_holds_after_training(seed in any::<u64>(), c in 0.01..100.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_matrix(30, 3, &mut rng);
        let y: Vec<f64> = (0..30).map(|i| if (i + x[(i, 0)] as usize).is_multiple_of(2) { 1.0 } else { -1.0 }).collect();
        prop_assume!(y.contains(&1.0) && y.contains(&-1.0));
        let (_, stats) = train_binary(&x, &y, c, KernelSpec::gaussian(1.0).unwrap(), DEFAULT_TOL).unwrap();
        prop_assert!(stats.kkt_gap <= DEFAULT_TOL);
    }
}
