use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::kernel::{KernelKind, KernelSpec};
use super::multiclass::{predict_standardized, train_one_vs_one, Hyperparams};
use crate::error::{arg_err, config_err, Result};
use crate::eval::map_score;
use crate::Matrix;

/// Hyperparameter candidates for grid model selection.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrid {
    pub kernel: KernelKind,
    pub c_values: Vec<f64>,
    /// Ignored for the linear kernel.
    pub sigma_values: Vec<f64>,
}

impl ModelGrid {
    /// Ten `C` values log-spaced over `[0.001, 100]` (endpoints included)
    /// and `σ ∈ {1, 5, 10, 20, 50, 100}`.
    pub fn standard(kernel: KernelKind) -> Self {
        Self {
            kernel,
            c_values: Self::log_spaced(1e-3, 100.0, 10),
            sigma_values: alloc::vec![1.0, 5.0, 10.0, 20.0, 50.0, 100.0],
        }
    }

    /// `n` values `10^(log10(lo) + k·(log10(hi) - log10(lo))/(n-1))`.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let (a, b) = (libm::log10(lo), libm::log10(hi));
        match n {
            0 => Vec::new(),
            1 => alloc::vec![lo],
            _ => (0..n)
                .map(|k| libm::pow(10.0, a + k as f64 * (b - a) / (n - 1) as f64))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_values.is_empty() {
            return Err(config_err!("C grid is empty"));
        }
        if self.c_values.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(config_err!("C values must be positive"));
        }
        if self.kernel == KernelKind::Gaussian {
            if self.sigma_values.is_empty() {
                return Err(config_err!("sigma grid is empty"));
            }
            for &s in &self.sigma_values {
                KernelSpec::gaussian(s)?;
            }
        }
        Ok(())
    }

    /// Candidates ordered by ascending `C`, then ascending `σ`.
    pub fn candidates(&self) -> Vec<Hyperparams> {
        let mut cs = self.c_values.clone();
        cs.sort_by(f64::total_cmp);
        let kernels: Vec<KernelSpec> = match self.kernel {
            KernelKind::Linear => alloc::vec![KernelSpec::Linear],
            KernelKind::Gaussian => {
                let mut s = self.sigma_values.clone();
                s.sort_by(f64::total_cmp);
                s.into_iter()
                    .map(|sigma| KernelSpec::Gaussian { sigma })
                    .collect()
            }
        };
        cs.iter()
            .flat_map(|&c| kernels.iter().map(move |&kernel| Hyperparams { c, kernel }))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub best: Hyperparams,
    pub best_score: f64,
    /// Mean validation MAP of every candidate, in candidate order.
    pub scores: Vec<(Hyperparams, f64)>,
    pub warnings: Vec<String>,
}

/// Stratified half/half split: each class is shuffled and its first
/// `ceil(n_c / 2)` examples go to the learning half.
///
/// The generator is ChaCha8 seeded with `seed` on stream `stream`.
pub fn stratified_halves(
    labels: &[usize],
    n_classes: usize,
    seed: u64,
    stream: u64,
) -> (Vec<usize>, Vec<usize>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let (mut learn, mut valid, mut warnings) = (Vec::new(), Vec::new(), Vec::new());
    for class in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() == 1 {
            warnings.push(format!(
                "class {class} has a single training example; it is kept in the learning half"
            ));
        }
        members.shuffle(&mut rng);
        let k = members.len().div_ceil(2);
        learn.extend_from_slice(&members[..k]);
        valid.extend_from_slice(&members[k..]);
    }
    learn.sort_unstable();
    valid.sort_unstable();
    (learn, valid, warnings)
}

/// Picks the candidate with the best validation MAP averaged over
/// `n_resample` stratified half/half resamplings of `x` (already
/// standardized). Ties go to the smaller `C`, then the smaller `σ`.
pub fn model_select(
    x: &Matrix,
    labels: &[usize],
    n_classes: usize,
    grid: &ModelGrid,
    n_resample: usize,
    seed: u64,
    tol: f64,
) -> Result<Selection> {
    grid.validate()?;
    if x.rows() != labels.len() {
        return Err(arg_err!("{} rows but {} labels", x.rows(), labels.len()));
    }
    if n_resample == 0 {
        return Err(config_err!("n_resample must be positive"));
    }
    for class in 0..n_classes {
        if !labels.contains(&class) {
            return Err(arg_err!("class {class} has no training examples"));
        }
    }

    let candidates = grid.candidates();
    let mut totals = alloc::vec![0.0; candidates.len()];
    let mut warnings = Vec::new();
    for r in 0..n_resample {
        let (learn, valid, w) = stratified_halves(labels, n_classes, seed, r as u64);
        if r == 0 {
            warnings = w;
        }
        let x_learn = x.select_rows(&learn);
        let y_learn: Vec<usize> = learn.iter().map(|&i| labels[i]).collect();
        let y_valid: Vec<usize> = valid.iter().map(|&i| labels[i]).collect();
        for (total, hyper) in totals.iter_mut().zip(&candidates) {
            let machines = train_one_vs_one(&x_learn, &y_learn, n_classes, hyper, tol)?;
            let predicted: Vec<usize> = valid
                .iter()
                .map(|&i| predict_standardized(&machines, n_classes, x.row(i)).class)
                .collect();
            *total += if valid.is_empty() {
                0.0
            } else {
                map_score(&y_valid, &predicted, n_classes)?
            };
        }
    }

    let scores: Vec<(Hyperparams, f64)> = candidates
        .iter()
        .zip(&totals)
        .map(|(&h, &t)| (h, t / n_resample as f64))
        .collect();
    let mut best = 0;
    for k in 1..scores.len() {
        if scores[k].1 > scores[best].1 {
            best = k;
        }
    }
    Ok(Selection {
        best: scores[best].0,
        best_score: scores[best].1,
        scores,
        warnings,
    })
}
