use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

use super::instance::SvmInstance;

/// Magnitude above which a weight counts as a selected feature.
pub const SELECTION_THRESHOLD: f64 = 1e-5;

/// Percentage of points on the correct side of `uᵀx = b`. Label `+1`
/// needs `uᵀx - b > 0`, label `-1` needs `< 0`; points on the plane count
/// as misclassified.
pub fn pwco<T: Real>(x: &[T], b: T, features: &[Vec<T>], labels: &[i8]) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::UndefinedMetric("no points to classify".into()));
    }
    if features.len() != labels.len() {
        return Err(Error::Dimension("features and labels differ in length".into()));
    }
    let correct = features
        .iter()
        .zip(labels)
        .filter(|(u, &y)| {
            let s = dot(u, x) - b;
            (y > 0 && s > T::zero()) || (y < 0 && s < T::zero())
        })
        .count();
    Ok(100.0 * correct as f64 / features.len() as f64)
}

/// [`pwco`] over the training points of an instance.
pub fn pwco_instance<T: Real>(inst: &SvmInstance<T>, x: &[T], b: T) -> Result<f64> {
    let mut feats = inst.class_a().to_vec();
    feats.extend_from_slice(inst.class_b());
    let mut labels = vec![1i8; inst.n_a()];
    labels.extend(std::iter::repeat_n(-1i8, inst.n_b()));
    pwco(x, b, &feats, &labels)
}

/// Count and indices of the weights whose magnitude exceeds
/// [`SELECTION_THRESHOLD`].
pub fn selected_features<T: Real>(x: &[T]) -> (usize, Vec<usize>) {
    let idx: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs().as_f64() > SELECTION_THRESHOLD)
        .map(|(i, _)| i)
        .collect();
    (idx.len(), idx)
}
