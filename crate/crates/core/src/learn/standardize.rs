use alloc::vec::Vec;

use crate::error::{arg_err, Result};
use crate::Matrix;

/// Standard deviations below this are replaced by 1.
pub const STD_FLOOR: f64 = 1e-12;

/// Per-dimension mean and population standard deviation of a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(arg_err!(
                "cannot standardize an empty {}x{} matrix",
                x.rows(),
                x.cols()
            ));
        }
        let n = x.rows() as f64;
        let mut mean = alloc::vec![0.0; x.cols()];
        for i in 0..x.rows() {
            for (m, v) in mean.iter_mut().zip(x.row(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = alloc::vec![0.0; x.cols()];
        for i in 0..x.rows() {
            for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = libm::sqrt(s / n);
                if sd < STD_FLOOR {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(Self { mean, std })
    }

    pub fn from_parts(mean: Vec<f64>, std: Vec<f64>) -> Result<Self> {
        if mean.len() != std.len() {
            return Err(arg_err!(
                "standardizer has {} means but {} deviations",
                mean.len(),
                std.len()
            ));
        }
        if std.iter().any(|s| !(*s >= STD_FLOOR && s.is_finite())) {
            return Err(arg_err!(
                "standard deviations must be finite and >= {STD_FLOOR}"
            ));
        }
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn std(&self) -> &[f64] {
        &self.std
    }

    pub fn apply_row(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(arg_err!(
                "feature has dimension {}, standardizer expects {}",
                row.len(),
                self.dim()
            ));
        }
        Ok(row
            .iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect())
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        let mut out = Vec::with_capacity(x.rows() * x.cols());
        for i in 0..x.rows() {
            out.extend(self.apply_row(x.row(i))?);
        }
        Matrix::from_vec(x.rows(), self.dim(), out)
    }
}
