//! Seeded random inputs shared by oracle comparisons.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small two-class problem with labels in `{-1, +1}`.
#[derive(Debug, Clone)]
pub struct BinaryProblem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub c: f64,
    /// `None` for the linear kernel.
    pub sigma: Option<f64>,
}

impl BinaryProblem {
    /// Gram matrix written out from the kernel definitions.
    pub fn gram(&self) -> Vec<Vec<f64>> {
        let n = self.x.len();
        let mut k = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.x[i], &self.x[j]);
                k[i][j] = match self.sigma {
                    None => a.iter().zip(b).map(|(p, q)| p * q).sum(),
                    Some(s) => {
                        let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum();
                        (-d2 / (2.0 * s * s)).exp()
                    }
                };
            }
        }
        k
    }
}

/// `count` problems of 4 to 12 points in 2 or 3 dimensions, alternating
/// linear and Gaussian kernels. Both labels always occur; the classes
/// overlap so that some multipliers end up at the bound.
pub fn random_binary_problems(count: usize, seed: u64) -> Vec<BinaryProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(4..=12);
            let d = rng.random_range(2..=3);
            let mut y: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            y[0] = 1.0;
            y[1] = -1.0;
            let x = y
                .iter()
                .map(|&label| {
                    (0..d)
                        .map(|_| 0.6 * label + rng.random_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let c = [0.1, 1.0, 10.0][rng.random_range(0..3)];
            let sigma = if k % 2 == 0 {
                None
            } else {
                Some(rng.random_range(0.5..2.0))
            };
            BinaryProblem { x, y, c, sigma }
        })
        .collect()
}
