use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, softmax_into, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Weight on `0.5 * ||W||^2`; the bias is not penalized.
    pub l2_penalty: f64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            l2_penalty: 1e-4,
            epochs: 500,
            learning_rate: 1.0,
        }
    }
}

/// Multinomial logistic regression.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    /// `classes x features`.
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Classifier {
    pub fn zeros(classes: usize, features: usize) -> Self {
        Classifier {
            weights: Matrix::zeros(classes, features),
            bias: vec![0.0; classes],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.bias.len()
    }

    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter_rows()
            .zip(&self.bias)
            .map(|(w, b)| dot(w, x) + b)
            .collect()
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let scores = self.scores(x);
        let mut p = vec![0.0; scores.len()];
        softmax_into(&scores, &mut p);
        p
    }

    /// Argmax of the scores, lowest class on ties.
    pub fn predict(&self, x: &[f64]) -> usize {
        let scores = self.scores(x);
        let mut best = 0;
        for (c, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = c;
            }
        }
        best
    }
}

fn check(features: &Matrix, labels: &[usize], classes: usize) -> Result<()> {
    if features.rows() != labels.len() {
        return Err(Error::Dimension {
            expected: features.rows(),
            actual: labels.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::data(format!("label {bad} out of range for {classes} classes")));
    }
    Ok(())
}

/// Mean cross-entropy plus `0.5 * l2 * ||W||^2`, and its gradient with
/// respect to the weights and biases.
pub fn classifier_loss(
    clf: &Classifier,
    features: &Matrix,
    labels: &[usize],
    l2_penalty: f64,
) -> Result<(f64, Classifier)> {
    check(features, labels, clf.num_classes())?;
    if features.cols() != clf.weights.cols() {
        return Err(Error::Dimension {
            expected: clf.weights.cols(),
            actual: features.cols(),
        });
    }
    let n = features.rows().max(1) as f64;
    let mut grad = Classifier::zeros(clf.num_classes(), features.cols());
    let mut loss = 0.0;
    for (x, &y) in features.iter_rows().zip(labels) {
        let p = clf.probabilities(x);
        loss -= p[y].max(f64::MIN_POSITIVE).ln() / n;
        for (c, &pc) in p.iter().enumerate() {
            let r = (pc - if c == y { 1.0 } else { 0.0 }) / n;
            grad.bias[c] += r;
            grad.weights.row_mut(c).iter_mut().zip(x).for_each(|(g, xi)| *g += r * xi);
        }
    }
    let w = clf.weights.as_slice();
    loss += 0.5 * l2_penalty * w.iter().map(|v| v * v).sum::<f64>();
    grad.weights
        .as_mut_slice()
        .iter_mut()
        .zip(w)
        .for_each(|(g, v)| *g += l2_penalty * v);
    Ok((loss, grad))
}

/// Batch gradient descent from zero weights. The number of classes is
/// `max(label) + 1`; at least two distinct labels must be present.
pub fn train_classifier(features: &Matrix, labels: &[usize], config: &ClassifierConfig) -> Result<Classifier> {
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    check(features, labels, classes)?;
    if labels.iter().all(|&y| y == labels[0]) {
        return Err(Error::data("training labels contain a single class"));
    }
    if !(config.learning_rate > 0.0) || config.l2_penalty < 0.0 {
        return Err(Error::config("classifier needs a positive learning rate and nonnegative penalty"));
    }
    let mut clf = Classifier::zeros(classes, features.cols());
    for _ in 0..config.epochs {
        let (_, grad) = classifier_loss(&clf, features, labels, config.l2_penalty)?;
        let lr = config.learning_rate;
        clf.weights
            .as_mut_slice()
            .iter_mut()
            .zip(grad.weights.as_slice())
            .for_each(|(w, g)| *w -= lr * g);
        clf.bias.iter_mut().zip(&grad.bias).for_each(|(b, g)| *b -= lr * g);
    }
    if !clf.weights.is_finite() {
        return Err(Error::numerical("classifier weights diverged"));
    }
    Ok(clf)
}

/// Fraction of rows whose prediction equals the label; 0 for no rows.
pub fn accuracy(clf: &Classifier, features: &Matrix, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = features
        .iter_rows()
        .zip(labels)
        .filter(|(x, &y)| clf.predict(x) == y)
        .count();
    hits as f64 / labels.len() as f64
}

/// Row-wise concatenation `[a | b]`.
pub fn concat_features(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.hconcat(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::sampling::seeded_rng;

    fn separable() -> (Matrix, Vec<usize>) {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.1],
            vec![0.9, -0.2],
            vec![1.2, 0.3],
            vec![-1.0, 0.2],
            vec![-0.8, -0.1],
            vec![-1.1, 0.0],
        ])
        .unwrap();
        (x, vec![0, 0, 0, 1, 1, 1])
    }

    #[test]
    fn separable_set_is_fit() {
        let (x, y) = separable();
        let clf = train_classifier(&x, &y, &ClassifierConfig::default()).unwrap();
        assert_eq!(accuracy(&clf, &x, &y), 1.0);
    }

    #[test]
    fn zero_epochs_are_uniform() {
        let (x, mut y) = separable();
        y[0] = 2;
        let cfg = ClassifierConfig {
            epochs: 0,
            ..Default::default()
        };
        let clf = train_classifier(&x, &y, &cfg).unwrap();
        for p in clf.probabilities(x.row(1)) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_class_is_rejected() {
        let (x, _) = separable();
        assert!(train_classifier(&x, &[0; 6], &ClassifierConfig::default()).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = seeded_rng(8);
        let x = Matrix::from_vec(5, 3, (0..15).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
        let y = vec![0, 2, 1, 1, 0];
        let mut clf = Classifier::zeros(3, 3);
        clf.weights.as_mut_slice().iter_mut().for_each(|w| *w = rng.random_range(-1.0..1.0));
        clf.bias.iter_mut().for_each(|b| *b = rng.random_range(-1.0..1.0));
        let l2 = 0.1;
        let (_, grad) = classifier_loss(&clf, &x, &y, l2).unwrap();
        let h = 1e-5;
        for i in 0..9 {
            let mut plus = clf.clone();
            let mut minus = clf.clone();
            plus.weights.as_mut_slice()[i] += h;
            minus.weights.as_mut_slice()[i] -= h;
            let fd = (classifier_loss(&plus, &x, &y, l2).unwrap().0 - classifier_loss(&minus, &x, &y, l2).unwrap().0)
                / (2.0 * h);
            let g = grad.weights.as_slice()[i];
            assert!((fd - g).abs() <= 1e-4 * g.abs().max(1e-3), "{fd} vs {g}");
        }
    }

    #[test]
    fn training_accuracy_does_not_drop_with_epochs() {
        let (x, y) = separable();
        let mut last = 0.0;
        for epochs in [1, 5, 20, 100] {
            let cfg = ClassifierConfig {
                epochs,
                ..Default::default()
            };
            let acc = accuracy(&train_classifier(&x, &y, &cfg).unwrap(), &x, &y);
            assert!(acc >= last);
            last = acc;
        }
    }

    #[test]
    fn concat_keeps_blocks() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![5.0, 6.0, 7.0], vec![8.0, 9.0, 10.0]]).unwrap();
        let c = concat_features(&a, &b).unwrap();
        assert_eq!(c.cols(), 5);
        assert_eq!(&c.row(1)[..2], a.row(1));
        assert_eq!(&c.row(1)[2..], b.row(1));
        assert_eq!(concat_features(&a, &Matrix::zeros(2, 0)).unwrap(), a);
        assert!(concat_features(&a, &Matrix::zeros(3, 1)).is_err());
    }
}
