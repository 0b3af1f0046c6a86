//! Exhaustive solver for small soft-margin SVM duals.
//!
//! Maximizes `Σα - ½ Σ_ij α_i α_j y_i y_j K_ij` subject to `0 ≤ α ≤ C` and
//! `Σ y_i α_i = 0` by trying every assignment of the variables to
//! {lower bound, upper bound, free}. For each assignment the free variables
//! solve the stationarity conditions together with the equality multiplier.
//! Some optimum is an extreme point of the optimal set, and there the
//! system is nonsingular, so the search is complete.

/// Best feasible dual objective and the multipliers attaining it.
#[derive(Debug, Clone)]
pub struct QpOptimum {
    pub objective: f64,
    pub alpha: Vec<f64>,
}

pub fn dual_objective(gram: &[Vec<f64>], y: &[f64], alpha: &[f64]) -> f64 {
    let n = y.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i][j];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Panics when `n > 14` (3^n assignments).
pub fn solve_exhaustive(gram: &[Vec<f64>], y: &[f64], c: f64) -> QpOptimum {
    let n = y.len();
    assert!(n <= 14, "exhaustive search is limited to 14 variables");
    let feas_tol = 1e-9 * c.max(1.0);
    let mut best: Option<QpOptimum> = None;
    let mut state = vec![0u8; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut v = code;
        for s in state.iter_mut() {
            *s = (v % 3) as u8;
            v /= 3;
        }
        let Some(alpha) = solve_assignment(gram, y, c, &state) else {
            continue;
        };
        if alpha.iter().any(|&a| a < -feas_tol || a > c + feas_tol) {
            continue;
        }
        let balance: f64 = alpha.iter().zip(y).map(|(a, t)| a * t).sum();
        if balance.abs() > feas_tol * n as f64 {
            continue;
        }
        let objective = dual_objective(gram, y, &alpha);
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(QpOptimum { objective, alpha });
        }
    }
    best.expect("alpha = 0 is always feasible")
}

/// `state[i]`: 0 = at zero, 1 = at C, 2 = free.
fn solve_assignment(gram: &[Vec<f64>], y: &[f64], c: f64, state: &[u8]) -> Option<Vec<f64>> {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    for i in 0..n {
        if state[i] == 1 {
            alpha[i] = c;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
    if free.is_empty() {
        return Some(alpha);
    }
    let m = free.len() + 1;
    // Unknowns: α_free then the multiplier b.
    // Σ_j Q_ij α_j + b y_i = 1 for free i;  Σ y_j α_j = 0.
    let mut a = vec![vec![0.0; m + 1]; m];
    for (r, &i) in free.iter().enumerate() {
        let mut rhs = 1.0;
        for j in 0..n {
            let qij = y[i] * y[j] * gram[i][j];
            if state[j] == 2 {
                let col = free.iter().position(|&f| f == j).unwrap();
                a[r][col] = qij;
            } else {
                rhs -= qij * alpha[j];
            }
        }
        a[r][m - 1] = y[i];
        a[r][m] = rhs;
    }
    let mut rhs = 0.0;
    for j in 0..n {
        if state[j] == 2 {
            let col = free.iter().position(|&f| f == j).unwrap();
            a[m - 1][col] = y[j];
        } else {
            rhs -= y[j] * alpha[j];
        }
    }
    a[m - 1][m] = rhs;
    let x = gauss_solve(a)?;
    for (k, &i) in free.iter().enumerate() {
        alpha[i] = x[k];
    }
    Some(alpha)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
/// Returns `None` for (numerically) singular systems.
pub fn gauss_solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r[..m].iter())
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(1e-300);
    for col in 0..m {
        let pivot = (col..m).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() <= 1e-11 * scale {
            return None;
        }
        a.swap(col, pivot);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            for k in col..=m {
                a[r][k] -= f * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let mut s = a[r][m];
        for k in r + 1..m {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}
