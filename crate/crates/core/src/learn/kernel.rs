use crate::error::{arg_err, config_err, Result};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    Linear,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Linear,
    /// `exp(-|x - z|^2 / (2 sigma^2))`
    Gaussian {
        sigma: f64,
    },
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        let spec = Self::Gaussian { sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            Self::Linear => KernelKind::Linear,
            Self::Gaussian { .. } => KernelKind::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Gaussian { sigma } if !(sigma > 0.0 && sigma.is_finite()) => {
                Err(config_err!("gaussian sigma must be positive, got {sigma}"))
            }
            _ => Ok(()),
        }
    }

    /// Kernel value for equal-length inputs.
    #[inline]
    pub fn eval(&self, x: &[f64], z: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), z.len());
        match *self {
            Self::Linear => x.iter().zip(z).map(|(a, b)| a * b).sum(),
            Self::Gaussian { sigma } => {
                let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                libm::exp(-d2 / (2.0 * sigma * sigma))
            }
        }
    }
}

/// Checked kernel evaluation.
pub fn kernel(x: &[f64], z: &[f64], spec: &KernelSpec) -> Result<f64> {
    if x.len() != z.len() {
        return Err(arg_err!(
            "kernel inputs differ in dimension ({} vs {})",
            x.len(),
            z.len()
        ));
    }
    spec.validate()?;
    Ok(spec.eval(x, z))
}

/// Symmetric Gram matrix of the rows of `x`.
pub fn kernel_matrix(x: &Matrix, spec: &KernelSpec) -> Matrix {
    let n = x.rows();
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = spec.eval(x.row(i), x.row(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}
