use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::kernel::KernelSpec;
use super::smo::{train_binary, BinarySvm};
use super::standardize::Standardizer;
use crate::error::{arg_err, Result};
use crate::{Error, Matrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub c: f64,
    pub kernel: KernelSpec,
}

/// Machine separating class `first` (+1) from class `second` (-1), `first < second`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMachine {
    pub first: usize,
    pub second: usize,
    pub svm: BinarySvm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub votes: Vec<u32>,
    /// Per class, the summed `|decision|` of the machines that voted for it.
    pub strength: Vec<f64>,
}

/// One-vs-one vote.
///
/// A machine votes for `first` when its decision is positive and for
/// `second` otherwise. Most votes wins; ties go to the larger summed
/// `|decision|`, then to the lower class index.
pub fn vote(
    n_classes: usize,
    decisions: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Prediction {
    let mut votes = vec![0u32; n_classes];
    let mut strength = vec![0.0; n_classes];
    for (first, second, d) in decisions {
        let winner = if d > 0.0 { first } else { second };
        votes[winner] += 1;
        strength[winner] += d.abs();
    }
    let mut class = 0;
    for k in 1..n_classes {
        let better =
            votes[k] > votes[class] || (votes[k] == votes[class] && strength[k] > strength[class]);
        if better {
            class = k;
        }
    }
    Prediction {
        class,
        votes,
        strength,
    }
}

/// Trains every class pair on already standardized rows.
pub fn train_one_vs_one(
    x: &Matrix,
    labels: &[usize],
    n_classes: usize,
    hyper: &Hyperparams,
    tol: f64,
) -> Result<Vec<PairMachine>> {
    if x.rows() != labels.len() {
        return Err(arg_err!("{} rows but {} labels", x.rows(), labels.len()));
    }
    if n_classes < 2 {
        return Err(arg_err!("need at least two classes, got {n_classes}"));
    }
    if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
        return Err(arg_err!(
            "label {l} is out of range for {n_classes} classes"
        ));
    }
    let mut machines = Vec::with_capacity(n_classes * (n_classes - 1) / 2);
    for first in 0..n_classes {
        for second in first + 1..n_classes {
            let rows: Vec<usize> = (0..labels.len())
                .filter(|&i| labels[i] == first || labels[i] == second)
                .collect();
            let y: Vec<f64> = rows
                .iter()
                .map(|&i| if labels[i] == first { 1.0 } else { -1.0 })
                .collect();
            let (svm, _) = train_binary(&x.select_rows(&rows), &y, hyper.c, hyper.kernel, tol)
                .map_err(|e| match e {
                    Error::Training(m) => {
                        Error::Training(alloc::format!("classes {first} vs {second}: {m}"))
                    }
                    other => other,
                })?;
            machines.push(PairMachine { first, second, svm });
        }
    }
    Ok(machines)
}

/// Standardizer plus one-vs-one machines, ready to classify raw features.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    classes: Vec<String>,
    standardizer: Standardizer,
    hyper: Hyperparams,
    machines: Vec<PairMachine>,
}

impl SvmModel {
    /// Fits the standardizer on `x` and trains every pair on the standardized rows.
    pub fn fit(
        x: &Matrix,
        labels: &[usize],
        classes: Vec<String>,
        hyper: Hyperparams,
        tol: f64,
    ) -> Result<Self> {
        let standardizer = Standardizer::fit(x)?;
        let xs = standardizer.apply(x)?;
        let machines = train_one_vs_one(&xs, labels, classes.len(), &hyper, tol)?;
        Ok(Self {
            classes,
            standardizer,
            hyper,
            machines,
        })
    }

    pub fn from_parts(
        classes: Vec<String>,
        standardizer: Standardizer,
        hyper: Hyperparams,
        machines: Vec<PairMachine>,
    ) -> Result<Self> {
        let n = classes.len();
        if n < 2 || machines.len() != n * (n - 1) / 2 {
            return Err(arg_err!(
                "{} pair machines do not match {n} classes",
                machines.len()
            ));
        }
        let mut expected = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                expected.push((i, j));
            }
        }
        for (m, &(i, j)) in machines.iter().zip(&expected) {
            if (m.first, m.second) != (i, j) {
                return Err(arg_err!("pair machines are not in canonical order"));
            }
            if m.svm.dim() != standardizer.dim() && m.svm.support_vectors().rows() > 0 {
                return Err(arg_err!("machine dimension differs from the standardizer"));
            }
        }
        Ok(Self {
            classes,
            standardizer,
            hyper,
            machines,
        })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn standardizer(&self) -> &Standardizer {
        &self.standardizer
    }

    pub fn hyperparams(&self) -> Hyperparams {
        self.hyper
    }

    pub fn machines(&self) -> &[PairMachine] {
        &self.machines
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let z = self.standardizer.apply_row(x)?;
        Ok(predict_standardized(&self.machines, self.classes.len(), &z))
    }
}

/// One-vs-one prediction for an already standardized feature vector.
pub fn predict_standardized(machines: &[PairMachine], n_classes: usize, z: &[f64]) -> Prediction {
    vote(
        n_classes,
        machines
            .iter()
            .map(|m| (m.first, m.second, m.svm.decision(z))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::DEFAULT_TOL;
    use alloc::string::ToString;

    #[test]
    fn vote_majority() {
        // votes: class 0 twice, class 1 once, class 2 never.
        let p = vote(3, [(0, 1, 1.0), (0, 2, 0.5), (1, 2, 0.2)]);
        assert_eq!(p.votes, vec![2, 1, 0]);
        assert_eq!(p.class, 0);
    }

    #[test]
    fn vote_tie_uses_strength() {
        // Each class gets one vote; class 2 has the strongest.
        let p = vote(3, [(0, 1, 0.3), (0, 2, -0.9), (1, 2, 0.4)]);
        assert_eq!(p.votes, vec![1, 1, 1]);
        assert_eq!(p.class, 2);
        let p = vote(3, [(0, 1, 0.5), (0, 2, -0.5), (1, 2, 0.5)]);
        assert_eq!(p.class, 0);
    }

    #[test]
    fn two_class_model_is_sign() {
        let x = Matrix::from_vec(4, 1, vec![-2.0, -1.0, 1.0, 2.0]).unwrap();
        let labels = [1, 1, 0, 0];
        let hyper = Hyperparams {
            c: 10.0,
            kernel: KernelSpec::Linear,
        };
        let m = SvmModel::fit(
            &x,
            &labels,
            vec!["a".to_string(), "b".to_string()],
            hyper,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(m.machines().len(), 1);
        for v in [-3.0, -0.5, 0.7, 4.0] {
            let z = m.standardizer().apply_row(&[v]).unwrap();
            let d = m.machines()[0].svm.decision(&z);
            let expect = if d > 0.0 { 0 } else { 1 };
            assert_eq!(m.predict(&[v]).unwrap().class, expect);
        }
        assert_eq!(m.predict(&[3.0]).unwrap().class, 0);
        assert_eq!(m.predict(&[-3.0]).unwrap().class, 1);
    }

    #[test]
    fn three_blobs() {
        let centers = [(0.0, 0.0), (5.0, 0.0), (0.0, 5.0)];
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for (k, &(cx, cy)) in centers.iter().enumerate() {
            for t in 0..6 {
                let a = t as f64;
                rows.push(cx + 0.3 * libm::cos(a));
                rows.push(cy + 0.3 * libm::sin(a));
                labels.push(k);
            }
        }
        let x = Matrix::from_vec(18, 2, rows).unwrap();
        let hyper = Hyperparams {
            c: 1.0,
            kernel: KernelSpec::gaussian(1.0).unwrap(),
        };
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let m = SvmModel::fit(&x, &labels, names, hyper, DEFAULT_TOL).unwrap();
        assert_eq!(m.machines().len(), 3);
        for i in 0..18 {
            assert_eq!(m.predict(x.row(i)).unwrap().class, labels[i]);
        }
    }

    #[test]
    fn from_parts_checks_pairs() {
        let x = Matrix::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        let s = Standardizer::fit(&x).unwrap();
        let hyper = Hyperparams {
            c: 1.0,
            kernel: KernelSpec::Linear,
        };
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        assert!(SvmModel::from_parts(names, s, hyper, Vec::new()).is_err());
    }
}
