use proptest::prelude::*;
use tfhog_core::hog::{cell_histograms, gradient, hog, Gradients, HogConfig, HogVariant};
use tfhog_core::tfr::TfrImage;
use tfhog_core::Matrix;

fn config(cell_size: usize, n_orient: usize) -> HogConfig {
    HogConfig {
        cell_size,
        n_orient,
        variant: HogVariant::Both,
        include_factors: true,
        ..HogConfig::default()
    }
}

fn unit_matrix(h: usize, w: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(0.0..1.0f64, h * w).prop_map(move |v| Matrix::from_vec(h, w, v).unwrap())
}

fn signed_matrix(h: usize, w: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0..1.0f64, h * w).prop_map(move |v| Matrix::from_vec(h, w, v).unwrap())
}

/// `h x w` zero image with `inner` pasted at `(top, left)`.
fn embed(inner: &Matrix, h: usize, w: usize, top: usize, left: usize) -> TfrImage {
    let m = Matrix::from_fn(h, w, |i, j| {
        let (ok_i, ok_j) = (
            i >= top && i < top + inner.rows(),
            j >= left && j < left + inner.cols(),
        );
        if ok_i && ok_j {
            inner[(i - top, j - left)]
        } else {
            0.0
        }
    });
    TfrImage::new(m).unwrap()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fold_identity(img in unit_matrix(32, 32), b in 2usize..10) {
        let raw = cell_histograms(&gradient(&img).unwrap(), &config(8, b)).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let s = raw.signed(r, c);
                let u = raw.unsigned(r, c);
                for j in 0..b {
                    prop_assert_eq!(u[j], s[j] + s[j + b]);
                }
            }
        }
    }

    #[test]
    fn rotation_by_pi(gx in signed_matrix(24, 24), gy in signed_matrix(24, 24), b in 2usize..10) {
        let cfg = config(8, b);
        let grad = Gradients { gx: gx.clone(), gy: gy.clone() };
        let flipped = Gradients { gx: gx.map(|v| -v), gy: gy.map(|v| -v) };
        let a = cell_histograms(&grad, &cfg).unwrap();
        let f = cell_histograms(&flipped, &cfg).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let (sa, sf) = (a.signed(r, c), f.signed(r, c));
                for j in 0..2 * b {
                    prop_assert!((sf[(j + b) % (2 * b)] - sa[j]).abs() < 1e-12);
                }
                for (x, y) in a.unsigned(r, c).iter().zip(f.unsigned(r, c)) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn clip_bound(img in unit_matrix(32, 48), b in 2usize..10, tau in 0.05..0.5f64) {
        let cfg = HogConfig { clip_tau: tau, ..config(8, b) };
        let grid = hog(&TfrImage::new(img).unwrap(), &cfg).unwrap();
        for r in 0..grid.rows() {
            for c in 0..grid.cols() {
                for v in grid.signed(r, c).iter().chain(grid.unsigned(r, c)) {
                    prop_assert!((0.0..=tau).contains(v));
                }
            }
        }
    }

    #[test]
    fn raw_mass_is_magnitude_sum(img in unit_matrix(40, 40), b in 2usize..10) {
        let grad = gradient(&img).unwrap();
        let raw = cell_histograms(&grad, &config(8, b)).unwrap();
        let magnitude: f64 = grad
            .gx
            .as_slice()
            .iter()
            .zip(grad.gy.as_slice())
            .map(|(x, y)| x.hypot(*y))
            .sum();
        prop_assert!((raw.total_mass() - magnitude).abs() <= 1e-9 * magnitude.max(1e-300));
    }

    #[test]
    fn time_shift_moves_cells(inner in unit_matrix(40, 24), b in 2usize..10) {
        // Content keeps two empty cells on each side before and after the shift.
        let cfg = config(8, b);
        let before = hog(&embed(&inner, 56, 64, 8, 16), &cfg).unwrap();
        let after = hog(&embed(&inner, 56, 64, 8, 24), &cfg).unwrap();
        for r in 0..before.rows() {
            for c in 0..before.cols() - 1 {
                let x: Vec<f64> = before.signed(r, c).iter()
                    .chain(before.unsigned(r, c)).chain(before.factors(r, c)).copied().collect();
                let y: Vec<f64> = after.signed(r, c + 1).iter()
                    .chain(after.unsigned(r, c + 1)).chain(after.factors(r, c + 1)).copied().collect();
                let d: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p - q).collect();
                prop_assert!(l2(&d) <= 1e-9 * l2(&x).max(1e-12), "cell {r},{c}");
            }
        }
    }
}
