//! Mean average precision, confusion matrices, the repeated split protocol
//! and the Wilcoxon signed-rank test used to compare two protocols.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{arg_err, config_err, Result};
use crate::learn::{
    model_select, predict_standardized, train_one_vs_one, Hyperparams, KernelKind, ModelGrid,
    Standardizer, DEFAULT_TOL,
};
use crate::{Error, Matrix};

/// Mean over classes of `correct(i) / predicted_as(i)`.
///
/// A class that is never predicted contributes 0 but still counts in the
/// denominator.
pub fn map_score(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(arg_err!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        ));
    }
    let mut cm = ConfusionMatrix::new(n_classes);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm.record(t, p)?;
    }
    Ok(cm.map())
}

/// Counts indexed `(true, predicted)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    n: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        Self {
            n: n_classes,
            counts: vec![0; n_classes * n_classes],
        }
    }

    pub fn from_counts(n_classes: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n_classes * n_classes {
            return Err(arg_err!("{} counts for {n_classes} classes", counts.len()));
        }
        Ok(Self {
            n: n_classes,
            counts,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.n
    }

    pub fn record(&mut self, truth: usize, predicted: usize) -> Result<()> {
        if truth >= self.n || predicted >= self.n {
            return Err(arg_err!(
                "label pair ({truth}, {predicted}) is out of range for {} classes",
                self.n
            ));
        }
        self.counts[truth * self.n + predicted] += 1;
        Ok(())
    }

    pub fn get(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.n + predicted]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn add(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.n != self.n {
            return Err(arg_err!("confusion matrices differ in size"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }

    fn column_sum(&self, col: usize) -> u64 {
        (0..self.n).map(|r| self.get(r, col)).sum()
    }

    /// MAP read off the matrix: mean of diagonal over column sums.
    pub fn map(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let sum: f64 = (0..self.n)
            .map(|i| match self.column_sum(i) {
                0 => 0.0,
                col => self.get(i, i) as f64 / col as f64,
            })
            .sum();
        sum / self.n as f64
    }

    /// Each column divided by its sum, so the diagonal holds per-class precision.
    pub fn column_normalize(&self) -> ColumnNormalized {
        let mut values = Matrix::zeros(self.n, self.n);
        let mut empty_columns = Vec::new();
        for c in 0..self.n {
            let total = self.column_sum(c);
            if total == 0 {
                empty_columns.push(c);
                continue;
            }
            for r in 0..self.n {
                values[(r, c)] = self.get(r, c) as f64 / total as f64;
            }
        }
        ColumnNormalized {
            values,
            empty_columns,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnNormalized {
    /// Fractions in `[0, 1]`; multiply by 100 for percentages.
    pub values: Matrix,
    /// Columns with no predictions, left at zero.
    pub empty_columns: Vec<usize>,
}

/// How many examples each split trains on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrainSize {
    /// Per class, `floor((1 - f) · n_c)` examples are held out for testing.
    Fraction(f64),
    /// Exactly this many training examples, shared across classes in
    /// proportion to class size (largest remainder).
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub n_splits: usize,
    pub train_size: TrainSize,
    pub seed: u64,
    pub n_resample: usize,
    pub grid: ModelGrid,
    pub tol: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n_splits: 20,
            train_size: TrainSize::Fraction(0.8),
            seed: 0,
            n_resample: 5,
            grid: ModelGrid::standard(KernelKind::Linear),
            tol: DEFAULT_TOL,
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_splits == 0 {
            return Err(config_err!("n_splits must be positive"));
        }
        if self.n_resample == 0 {
            return Err(config_err!("n_resample must be positive"));
        }
        if let TrainSize::Fraction(f) = self.train_size {
            if !(f > 0.0 && f < 1.0) {
                return Err(config_err!("train fraction must be in (0, 1), got {f}"));
            }
        }
        if !(self.tol > 0.0) {
            return Err(config_err!("solver tolerance must be positive"));
        }
        self.grid.validate()
    }
}

/// Independent 64-bit seed for `(seed, purpose, index)` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, purpose: u64, index: u64) -> u64 {
    let mut z = seed
        ^ purpose.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `purpose` values passed to [`derive_seed`].
pub const SPLIT_STREAM: u64 = 1;
pub const SELECT_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn class_members(labels: &[usize], n_classes: usize) -> Vec<Vec<usize>> {
    let mut members = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    members
}

fn train_quotas(sizes: &[usize], train_size: TrainSize) -> Result<Vec<usize>> {
    let total: usize = sizes.iter().sum();
    match train_size {
        TrainSize::Fraction(f) => Ok(sizes
            .iter()
            .map(|&n| {
                let test = libm::floor(n as f64 * (1.0 - f) + 1e-9) as usize;
                n - test.min(n)
            })
            .collect()),
        TrainSize::Count(count) => {
            if count >= total {
                return Err(Error::Protocol(format!(
                    "train count {count} leaves no test examples out of {total}"
                )));
            }
            let exact: Vec<f64> = sizes
                .iter()
                .map(|&n| count as f64 * n as f64 / total as f64)
                .collect();
            let mut quotas: Vec<usize> = exact.iter().map(|&e| libm::floor(e) as usize).collect();
            let mut order: Vec<usize> = (0..sizes.len()).collect();
            order.sort_by(|&a, &b| {
                let (fa, fb) = (exact[a] - quotas[a] as f64, exact[b] - quotas[b] as f64);
                fb.total_cmp(&fa).then(a.cmp(&b))
            });
            let missing = count - quotas.iter().sum::<usize>();
            for &k in order.iter().take(missing) {
                quotas[k] += 1;
            }
            Ok(quotas)
        }
    }
}

/// Stratified random split number `split_index` of the protocol.
pub fn stratified_split(
    labels: &[usize],
    n_classes: usize,
    train_size: TrainSize,
    seed: u64,
    split_index: usize,
) -> Result<Split> {
    if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(arg_err!(
            "label {l} is out of range for {n_classes} classes"
        ));
    }
    let members = class_members(labels, n_classes);
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let quotas = train_quotas(&sizes, train_size)?;
    let too_small: Vec<String> = (0..n_classes)
        .filter(|&c| quotas[c] == 0 || quotas[c] >= sizes[c])
        .map(|c| format!("{c} ({} examples, {} for training)", sizes[c], quotas[c]))
        .collect();
    if !too_small.is_empty() {
        return Err(Error::Protocol(format!(
            "classes cannot appear in both training and test sets: {}",
            too_small.join(", ")
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, SPLIT_STREAM, split_index as u64));
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (mut m, &q) in members.into_iter().zip(&quotas) {
        m.shuffle(&mut rng);
        train.extend_from_slice(&m[..q]);
        test.extend_from_slice(&m[q..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub split_index: usize,
    pub split: Split,
    pub chosen: Hyperparams,
    pub validation_map: f64,
    pub test_map: f64,
    /// Predicted class for each entry of `split.test`.
    pub predictions: Vec<usize>,
    pub confusion: ConfusionMatrix,
    pub warnings: Vec<String>,
}

fn check_protocol_input(x: &Matrix, labels: &[usize], n_classes: usize) -> Result<()> {
    if x.rows() != labels.len() {
        return Err(arg_err!(
            "{} feature rows but {} labels",
            x.rows(),
            labels.len()
        ));
    }
    if n_classes < 2 {
        return Err(Error::Protocol(format!(
            "need at least two classes, got {n_classes}"
        )));
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(arg_err!(
            "label {l} is out of range for {n_classes} classes"
        ));
    }
    let sizes: Vec<usize> = class_members(labels, n_classes)
        .iter()
        .map(Vec::len)
        .collect();
    let small: Vec<String> = (0..n_classes)
        .filter(|&c| sizes[c] < 2)
        .map(|c| format!("{c}"))
        .collect();
    if !small.is_empty() {
        return Err(Error::Protocol(format!(
            "every class needs at least 2 examples; too small: {}",
            small.join(", ")
        )));
    }
    Ok(())
}

/// Runs one split: standardize on train, select hyperparameters on the
/// standardized train set, retrain on all of it and score the test set.
pub fn run_split(
    x: &Matrix,
    labels: &[usize],
    n_classes: usize,
    cfg: &ProtocolConfig,
    split_index: usize,
) -> Result<SplitOutcome> {
    cfg.validate()?;
    check_protocol_input(x, labels, n_classes)?;
    let split = stratified_split(labels, n_classes, cfg.train_size, cfg.seed, split_index)?;

    let x_train = x.select_rows(&split.train);
    let y_train: Vec<usize> = split.train.iter().map(|&i| labels[i]).collect();
    let standardizer = Standardizer::fit(&x_train)?;
    let xs_train = standardizer.apply(&x_train)?;
    let xs_test = standardizer.apply(&x.select_rows(&split.test))?;
    let y_test: Vec<usize> = split.test.iter().map(|&i| labels[i]).collect();

    let select_seed = derive_seed(cfg.seed, SELECT_STREAM, split_index as u64);
    let selection = model_select(
        &xs_train,
        &y_train,
        n_classes,
        &cfg.grid,
        cfg.n_resample,
        select_seed,
        cfg.tol,
    )?;
    let machines = train_one_vs_one(&xs_train, &y_train, n_classes, &selection.best, cfg.tol)?;
    let predictions: Vec<usize> = (0..xs_test.rows())
        .map(|i| predict_standardized(&machines, n_classes, xs_test.row(i)).class)
        .collect();

    let mut confusion = ConfusionMatrix::new(n_classes);
    for (&t, &p) in y_test.iter().zip(&predictions) {
        confusion.record(t, p)?;
    }
    Ok(SplitOutcome {
        split_index,
        split,
        chosen: selection.best,
        validation_map: selection.best_score,
        test_map: confusion.map(),
        predictions,
        confusion,
        warnings: selection.warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub n_classes: usize,
    pub per_split_map: Vec<f64>,
    pub map_mean: f64,
    /// Population standard deviation of `per_split_map`.
    pub map_std: f64,
    pub confusion_sum: ConfusionMatrix,
    /// MAP of the summed confusion matrix (differs from `map_mean` in general).
    pub map_of_confusion: f64,
    pub outcomes: Vec<SplitOutcome>,
}

impl EvalReport {
    /// Assembles per-split outcomes, which must be ordered by split index.
    pub fn from_outcomes(n_classes: usize, outcomes: Vec<SplitOutcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(arg_err!("no split outcomes to report"));
        }
        if outcomes.iter().enumerate().any(|(k, o)| o.split_index != k) {
            return Err(arg_err!("split outcomes are not in split order"));
        }
        let per_split_map: Vec<f64> = outcomes.iter().map(|o| o.test_map).collect();
        let n = per_split_map.len() as f64;
        let map_mean = per_split_map.iter().sum::<f64>() / n;
        let map_std = libm::sqrt(
            per_split_map
                .iter()
                .map(|m| (m - map_mean) * (m - map_mean))
                .sum::<f64>()
                / n,
        );
        let mut confusion_sum = ConfusionMatrix::new(n_classes);
        for o in &outcomes {
            confusion_sum.add(&o.confusion)?;
        }
        Ok(Self {
            n_classes,
            map_of_confusion: confusion_sum.map(),
            per_split_map,
            map_mean,
            map_std,
            confusion_sum,
            outcomes,
        })
    }
}

/// All splits in sequence. See [`run_split`].
pub fn run_protocol(
    x: &Matrix,
    labels: &[usize],
    n_classes: usize,
    cfg: &ProtocolConfig,
) -> Result<EvalReport> {
    cfg.validate()?;
    check_protocol_input(x, labels, n_classes)?;
    let outcomes = (0..cfg.n_splits)
        .map(|s| run_split(x, labels, n_classes, cfg, s))
        .collect::<Result<Vec<_>>>()?;
    EvalReport::from_outcomes(n_classes, outcomes)
}

/// Largest sample size for which p-values are enumerated exactly.
pub const EXACT_MAX_N: usize = 12;
/// Smallest number of nonzero differences accepted.
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Nonzero differences used.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(W+, W-)`
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub method: WilcoxonMethod,
}

/// Ranks of `|d|` (1-based, ties get their average rank).
pub fn abs_ranks(d: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()));
    let mut ranks = vec![0.0; d.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && d[order[end]].abs() == d[order[start]].abs() {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        start = end;
    }
    ranks
}

/// Exact two-sided p-value: the share of the `2^n` sign assignments whose
/// `min(W+, W-)` is at most `statistic`.
pub fn exact_p_value(ranks: &[f64], statistic: f64) -> f64 {
    let n = ranks.len();
    assert!(n <= 30, "exact enumeration is limited to 30 ranks");
    // Ranks are multiples of 1/2; doubling makes the sums exact integers.
    let doubled: Vec<u64> = ranks.iter().map(|r| libm::round(2.0 * r) as u64).collect();
    let total: u64 = doubled.iter().sum();
    let threshold = libm::round(2.0 * statistic) as u64;
    let mut count = 0u64;
    for mask in 0u64..(1u64 << n) {
        let plus: u64 = (0..n)
            .filter(|&k| mask >> k & 1 == 1)
            .map(|k| doubled[k])
            .sum();
        if plus.min(total - plus) <= threshold {
            count += 1;
        }
    }
    count as f64 / (1u64 << n) as f64
}

/// Normal approximation with tie and continuity corrections.
pub fn normal_p_value(ranks: &[f64], statistic: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut k = 0;
    while k < sorted.len() {
        let mut e = k + 1;
        while e < sorted.len() && sorted[e] == sorted[k] {
            e += 1;
        }
        let t = (e - k) as f64;
        tie_term += t * t * t - t;
        k = e;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (statistic - mean + 0.5) / libm::sqrt(var);
    if z >= 0.0 {
        return 1.0;
    }
    libm::erfc(-z / core::f64::consts::SQRT_2).min(1.0)
}

/// Paired two-sided Wilcoxon signed-rank test on `a - b`.
///
/// Zero differences are dropped. Up to [`EXACT_MAX_N`] remaining pairs the
/// p-value is exact; above that the normal approximation is used.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(arg_err!(
            "samples differ in length ({} vs {})",
            a.len(),
            b.len()
        ));
    }
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|&v| v != 0.0)
        .collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(arg_err!("differences must be finite"));
    }
    if d.is_empty() {
        return Ok(WilcoxonResult {
            n: 0,
            w_plus: 0.0,
            w_minus: 0.0,
            statistic: 0.0,
            p_value: 1.0,
            method: WilcoxonMethod::Degenerate,
        });
    }
    if d.len() < MIN_PAIRS {
        return Err(arg_err!(
            "need at least {MIN_PAIRS} nonzero differences, got {}",
            d.len()
        ));
    }
    let ranks = abs_ranks(&d);
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v > 0.0)
        .fold(0.0, |acc, (_, r)| acc + r);
    let w_minus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(v, _)| **v < 0.0)
        .fold(0.0, |acc, (_, r)| acc + r);
    let statistic = w_plus.min(w_minus);
    let (p_value, method) = if d.len() <= EXACT_MAX_N {
        (exact_p_value(&ranks, statistic), WilcoxonMethod::Exact)
    } else {
        (
            normal_p_value(&ranks, statistic),
            WilcoxonMethod::NormalApprox,
        )
    };
    Ok(WilcoxonResult {
        n: d.len(),
        w_plus,
        w_minus,
        statistic,
        p_value,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_examples() {
        assert_eq!(map_score(&[0, 1, 1, 0], &[0, 1, 1, 0], 2).unwrap(), 1.0);
        let m = map_score(&[0, 0, 1, 1], &[0, 1, 1, 1], 2).unwrap();
        assert_eq!(m, (1.0 + 2.0 / 3.0) / 2.0);
        assert_eq!(map_score(&[0, 1], &[0, 0], 2).unwrap(), 0.25);
        assert!(map_score(&[0], &[0, 1], 2).is_err());
        assert!(map_score(&[0], &[2], 2).is_err());
    }

    #[test]
    fn map_is_accuracy_for_balanced_symmetric_confusion() {
        // Every column sums to 4 and the matrix is symmetric.
        let cm = ConfusionMatrix::from_counts(3, vec![2, 1, 1, 1, 3, 0, 1, 0, 3]).unwrap();
        let acc = (2 + 3 + 3) as f64 / 12.0;
        assert!((cm.map() - acc).abs() < 1e-15);
    }

    #[test]
    fn column_normalization() {
        let cm = ConfusionMatrix::from_counts(2, vec![5, 0, 0, 3]).unwrap();
        let n = cm.column_normalize();
        assert_eq!(n.values.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        assert!(n.empty_columns.is_empty());

        let cm = ConfusionMatrix::from_counts(2, vec![2, 0, 2, 0]).unwrap();
        let n = cm.column_normalize();
        assert_eq!(n.values.as_slice(), &[0.5, 0.0, 0.5, 0.0]);
        assert_eq!(n.empty_columns, vec![1]);
    }

    #[test]
    fn fraction_split_sizes() {
        let labels: Vec<usize> = (0..100).map(|i| i % 10).collect();
        let s = stratified_split(&labels, 10, TrainSize::Fraction(0.8), 0, 0).unwrap();
        assert_eq!(s.train.len(), 80);
        assert_eq!(s.test.len(), 20);
        for c in 0..10 {
            assert_eq!(s.test.iter().filter(|&&i| labels[i] == c).count(), 2);
        }
    }

    #[test]
    fn count_split_sizes() {
        let labels: Vec<usize> = (0..200).map(|i| i / 100).collect();
        let s = stratified_split(&labels, 2, TrainSize::Count(40), 5, 3).unwrap();
        assert_eq!(s.train.len(), 40);
        assert_eq!(s.test.len(), 160);
        assert_eq!(s.train.iter().filter(|&&i| labels[i] == 0).count(), 20);
        let again = stratified_split(&labels, 2, TrainSize::Count(40), 5, 3).unwrap();
        assert_eq!(s, again);
        let other = stratified_split(&labels, 2, TrainSize::Count(40), 5, 4).unwrap();
        assert_ne!(s, other);
    }

    #[test]
    fn tiny_class_is_a_protocol_error() {
        let labels = [0, 0, 0, 0, 0, 1, 1];
        let err = stratified_split(&labels, 2, TrainSize::Fraction(0.8), 0, 0).unwrap_err();
        match err {
            Error::Protocol(m) => assert!(m.contains("1 (2 examples")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quotas_by_largest_remainder() {
        assert_eq!(
            train_quotas(&[5, 3, 2], TrainSize::Count(5)).unwrap(),
            vec![3, 1, 1]
        );
        assert!(train_quotas(&[2, 2], TrainSize::Count(4)).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(abs_ranks(&[3.0, -1.0, 2.0, -2.0]), vec![4.0, 1.0, 2.5, 2.5]);
    }

    #[test]
    fn wilcoxon_examples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let r = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(r.w_minus, 0.0);
        assert_eq!(r.w_plus, 15.0);
        assert_eq!(r.p_value, 2.0 / 32.0);
        assert_eq!(r.method, WilcoxonMethod::Exact);

        let r = wilcoxon_signed_rank(&a, &a).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.method, WilcoxonMethod::Degenerate);

        let d = [1.0, -1.0, 2.0, -2.0, 3.0, -3.0];
        let r = wilcoxon_signed_rank(&d, &[0.0; 6]).unwrap();
        assert_eq!(r.w_plus, r.w_minus);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn wilcoxon_errors() {
        assert!(wilcoxon_signed_rank(&[1.0], &[1.0, 2.0]).is_err());
        assert!(wilcoxon_signed_rank(&[1.0, 2.0, 3.0], &[0.0; 3]).is_err());
    }

    #[test]
    fn large_samples_use_normal_approx() {
        let a: Vec<f64> = (1..=20).map(f64::from).collect();
        let r = wilcoxon_signed_rank(&a, &[0.0; 20]).unwrap();
        assert_eq!(r.method, WilcoxonMethod::NormalApprox);
        assert!(r.p_value < 0.005);
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(derive_seed(0, 1, 0), derive_seed(0, 1, 1));
        assert_ne!(derive_seed(0, 1, 0), derive_seed(0, 2, 0));
        assert_eq!(derive_seed(7, 1, 3), derive_seed(7, 1, 3));
    }
}
