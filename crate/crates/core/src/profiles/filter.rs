use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, AttributeTable, Feature};
use crate::imagery::RealImage;
use crate::tree::Tree;

/// Pruning policy for attribute filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// A node is removed when it or any ancestor fails the criterion.
    Min,
    /// A node is removed when it fails the criterion, regardless of ancestors.
    Direct,
}

/// Per-node retention flags; the root is always retained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetainMask(Vec<bool>);

impl RetainMask {
    pub fn all(node_count: usize) -> Self {
        Self(vec![true; node_count])
    }

    pub fn from_flags(mut flags: Vec<bool>) -> Self {
        if let Some(root) = flags.first_mut() {
            *root = true;
        }
        Self(flags)
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn retained(&self, node: usize) -> bool {
        self.0[node]
    }

    pub fn retained_count(&self) -> usize {
        self.0.iter().filter(|&&r| r).count()
    }
}

pub fn filter_tree(
    tree: &Tree,
    table: &AttributeTable,
    attribute: Attribute,
    threshold: f64,
    rule: Rule,
) -> RetainMask {
    let parents = tree.parents();
    let records = table.records();
    let mut keep = vec![true; tree.node_count()];
    for i in 1..keep.len() {
        let passes = records[i].attribute(attribute) >= threshold;
        keep[i] = match rule {
            Rule::Min => passes && keep[parents[i] as usize],
            Rule::Direct => passes,
        };
    }
    RetainMask(keep)
}

/// Evaluates `value` at each pixel's smallest retained ancestor-or-self.
pub fn map_retained(tree: &Tree, mask: &RetainMask, value: impl Fn(usize) -> f64) -> RealImage {
    let parents = tree.parents();
    let mut representative = vec![0u32; tree.node_count()];
    for i in 1..representative.len() {
        representative[i] = if mask.retained(i) {
            i as u32
        } else {
            representative[parents[i] as usize]
        };
    }
    let node_value: Vec<f64> = (0..tree.node_count()).map(&value).collect();
    RealImage {
        width: tree.width(),
        height: tree.height(),
        values: tree
            .pixel_nodes()
            .iter()
            .map(|&n| node_value[representative[n as usize] as usize])
            .collect(),
    }
}

/// Filtered image. Component trees and the tree of shapes restore node
/// levels; partition trees restore the node mean rounded half up.
pub fn reconstruct(tree: &Tree, table: &AttributeTable, mask: &RetainMask) -> RealImage {
    if tree.kind().is_partition() {
        let records = table.records();
        map_retained(tree, mask, |i| {
            let r = &records[i];
            ((2 * r.gray_sum + r.area) / (2 * r.area)) as f64
        })
    } else {
        let levels = tree.levels();
        map_retained(tree, mask, |i| levels[i])
    }
}

/// Feature of each pixel's smallest retained component, taken from the
/// unfiltered tree's table.
pub fn feature_map(
    tree: &Tree,
    mask: &RetainMask,
    table: &AttributeTable,
    feature: Feature,
) -> RealImage {
    let records = table.records();
    map_retained(tree, mask, |i| records[i].feature(feature))
}
