//! Signed-rank statistics by direct enumeration of sign vectors.

/// Average ranks of `|d|`, computed by counting rather than sorting.
pub fn average_ranks(d: &[f64]) -> Vec<f64> {
    d.iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count();
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count();
            // ranks below+1 ..= below+equal
            below as f64 + (equal as f64 + 1.0) / 2.0
        })
        .collect()
}

/// `(W+, W-)` for the nonzero differences `d`.
pub fn rank_sums(d: &[f64]) -> (f64, f64) {
    let r = average_ranks(d);
    let mut plus = 0.0;
    let mut minus = 0.0;
    for (x, rank) in d.iter().zip(r) {
        if *x > 0.0 {
            plus += rank;
        } else {
            minus += rank;
        }
    }
    (plus, minus)
}

/// Two-sided exact p-value: fraction of the `2^n` sign vectors whose
/// `min(W+, W-)` does not exceed the observed one. Zero differences are
/// dropped first.
pub fn exact_p(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|v| *v != 0.0)
        .collect();
    if d.is_empty() {
        return 1.0;
    }
    let ranks = average_ranks(&d);
    let (plus, minus) = rank_sums(&d);
    let observed = plus.min(minus);
    let total: f64 = ranks.iter().sum();
    let hits = count(&ranks, 0, 0.0, total, observed);
    hits as f64 / 2f64.powi(d.len() as i32)
}

fn count(ranks: &[f64], k: usize, plus: f64, total: f64, observed: f64) -> u64 {
    if k == ranks.len() {
        return u64::from(plus.min(total - plus) <= observed);
    }
    count(ranks, k + 1, plus + ranks[k], total, observed)
        + count(ranks, k + 1, plus, total, observed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_positive_five() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(exact_p(&a, &[0.0; 5]), 2.0 / 32.0);
    }

    #[test]
    fn tied_ranks() {
        assert_eq!(average_ranks(&[1.0, -1.0, 3.0]), vec![1.5, 1.5, 3.0]);
    }
}
