//! Soft-margin SVM dual solved by sequential minimal optimization.
//!
//! Minimizes `f(α) = ½ αᵀQα - Σα` with `Q_ij = y_i y_j K_ij`, subject to
//! `0 ≤ α ≤ C` and `Σ y_i α_i = 0`. Each step picks the maximal violating
//! pair and solves the two-variable subproblem in closed form (the update
//! used by LIBSVM). The dual objective reported everywhere is `-f(α)`.

use alloc::vec;
use alloc::vec::Vec;

use super::kernel::{kernel_matrix, KernelSpec};
use crate::error::{arg_err, Result};
use crate::{Error, Matrix};

/// Stopping tolerance on the maximal KKT violation `m(α) - M(α)`.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Stand-in for a non-positive curvature along the chosen pair.
const MIN_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// `m(α) - M(α)` at exit; at most the tolerance on success.
    pub kkt_gap: f64,
    /// Dual objective `Σα - ½ αᵀQα`.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// Decision values are `Σ α_i y_i K(x_i, x) - rho`.
    pub rho: f64,
    pub stats: SolveStats,
}

/// Solves the dual for a precomputed Gram matrix and labels in `{-1, +1}`.
pub fn solve_dual(gram: &Matrix, y: &[f64], c: f64, tol: f64) -> Result<DualSolution> {
    let n = y.len();
    if gram.rows() != n || gram.cols() != n {
        return Err(arg_err!(
            "gram matrix is {}x{} for {n} labels",
            gram.rows(),
            gram.cols()
        ));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(arg_err!("C must be positive, got {c}"));
    }
    if !(tol > 0.0) {
        return Err(arg_err!("tolerance must be positive, got {tol}"));
    }
    if y.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(arg_err!("labels must be -1 or +1"));
    }
    if !(y.contains(&1.0) && y.contains(&-1.0)) {
        return Err(Error::Training("both classes must be present".into()));
    }

    let q = |i: usize, j: usize| y[i] * y[j] * gram[(i, j)];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = 10_000_000usize.max(100 * n);
    let mut iterations = 0;

    loop {
        let (i, j, gap) = select_pair(&alpha, &grad, y, c);
        if gap < tol {
            break;
        }
        let (i, j) = match (i, j) {
            (Some(i), Some(j)) => (i, j),
            _ => break,
        };
        if iterations == max_iter {
            return Err(Error::Training(alloc::format!(
                "solver did not reach KKT gap {tol} within {max_iter} iterations (gap {gap})"
            )));
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let qij = q(i, j);
        let (qii, qjj) = (gram[(i, i)], gram[(j, j)]);
        if y[i] != y[j] {
            let quad = (qii + qjj + 2.0 * qij).max(MIN_CURVATURE);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(MIN_CURVATURE);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
    }

    let (_, _, gap) = select_pair(&alpha, &grad, y, c);
    let objective = -0.5
        * alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>();
    let rho = compute_rho(&alpha, &grad, y, c);
    Ok(DualSolution {
        alpha,
        rho,
        stats: SolveStats {
            iterations,
            kkt_gap: gap.max(0.0),
            objective,
        },
    })
}

/// Maximal violating pair and the violation `m(α) - M(α)`.
fn select_pair(
    alpha: &[f64],
    grad: &[f64],
    y: &[f64],
    c: f64,
) -> (Option<usize>, Option<usize>, f64) {
    let mut up = (None, f64::NEG_INFINITY);
    let mut low = (None, f64::INFINITY);
    for t in 0..y.len() {
        let v = -y[t] * grad[t];
        let in_up = if y[t] > 0.0 {
            alpha[t] < c
        } else {
            alpha[t] > 0.0
        };
        let in_low = if y[t] > 0.0 {
            alpha[t] > 0.0
        } else {
            alpha[t] < c
        };
        if in_up && v > up.1 {
            up = (Some(t), v);
        }
        if in_low && v < low.1 {
            low = (Some(t), v);
        }
    }
    let gap = if up.0.is_some() && low.0.is_some() {
        up.1 - low.1
    } else {
        0.0
    };
    (up.0, low.0, gap)
}

/// Average of `y_i ∇f_i` over free variables, or the midpoint of the
/// feasible interval when every variable sits at a bound.
fn compute_rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum) = (0usize, 0.0);
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// A trained two-class machine. Positive decision values favor the `+1` class.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarySvm {
    support_vectors: Matrix,
    /// `α_i y_i` per support vector.
    coef: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
    c: f64,
}

impl BinarySvm {
    pub fn from_parts(
        support_vectors: Matrix,
        coef: Vec<f64>,
        bias: f64,
        kernel: KernelSpec,
        c: f64,
    ) -> Result<Self> {
        if support_vectors.rows() != coef.len() {
            return Err(arg_err!(
                "{} support vectors but {} coefficients",
                support_vectors.rows(),
                coef.len()
            ));
        }
        kernel.validate()?;
        if !(c > 0.0) || coef.iter().any(|a| !(a.abs() <= c)) || !bias.is_finite() {
            return Err(arg_err!("machine coefficients are out of range"));
        }
        Ok(Self {
            support_vectors,
            coef,
            bias,
            kernel,
            c,
        })
    }

    pub fn support_vectors(&self) -> &Matrix {
        &self.support_vectors
    }

    pub fn coef(&self) -> &[f64] {
        &self.coef
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.cols()
    }

    pub fn decision(&self, x: &[f64]) -> f64 {
        (0..self.coef.len())
            .map(|i| self.coef[i] * self.kernel.eval(self.support_vectors.row(i), x))
            .sum::<f64>()
            + self.bias
    }
}

/// Trains on rows of `x` with labels in `{-1, +1}`.
pub fn train_binary(
    x: &Matrix,
    y: &[f64],
    c: f64,
    kernel: KernelSpec,
    tol: f64,
) -> Result<(BinarySvm, SolveStats)> {
    if x.rows() != y.len() {
        return Err(arg_err!("{} rows but {} labels", x.rows(), y.len()));
    }
    kernel.validate()?;
    let gram = kernel_matrix(x, &kernel);
    let sol = solve_dual(&gram, y, c, tol)?;
    let sv: Vec<usize> = (0..y.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    let coef = sv.iter().map(|&i| sol.alpha[i] * y[i]).collect();
    let svm = BinarySvm {
        support_vectors: x.select_rows(&sv),
        coef,
        bias: -sol.rho,
        kernel,
        c,
    };
    Ok((svm, sol.stats))
}
