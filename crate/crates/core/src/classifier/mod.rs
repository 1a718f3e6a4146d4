//! Random-forest pixel classification and accuracy metrics.

mod forest;
mod metrics;
mod serialize;

pub use forest::{
    train_forest, tree_seed, DecisionTree, ForestModel, ForestParams, TreeNode,
};
pub use metrics::{evaluate, ConfusionMatrix, Evaluation};
pub use serialize::{decode_model, encode_model};

use crate::error::{Error, Result};
use crate::imagery::LabelMap;
use crate::profiles::ProfileStack;

/// Feature rows and labels of the labeled pixels of `labels`, row-major.
pub fn gather_samples(stack: &ProfileStack, labels: &LabelMap) -> Result<(Vec<f64>, Vec<u16>)> {
    if (stack.width(), stack.height()) != labels.dims() {
        return Err(Error::DimensionMismatch {
            expected: (stack.width(), stack.height()),
            found: labels.dims(),
        });
    }
    let mut features = Vec::with_capacity(labels.labeled_count() * stack.dim());
    let mut y = Vec::with_capacity(labels.labeled_count());
    for p in labels.labeled_pixels() {
        features.extend_from_slice(stack.pixel(p));
        y.push(labels.labels()[p]);
    }
    if y.is_empty() {
        return Err(Error::NoSamples);
    }
    Ok((features, y))
}
