use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of tree `index`: `splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15)`.
/// Each tree draws from its own xoshiro256++ stream seeded with this value,
/// so results do not depend on the order in which trees are grown.
pub fn tree_seed(seed: u64, index: usize) -> u64 {
    splitmix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index as u64 + 1)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Split {
        feature: u32,
        threshold: f64,
        left: u32,
        right: u32,
    },
    Leaf {
        probabilities: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn leaf_probabilities(&self, sample: &[f64]) -> &[f64] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if sample[*feature as usize] <= *threshold {
                        *left as usize
                    } else {
                        *right as usize
                    };
                }
                TreeNode::Leaf { probabilities } => return probabilities,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    /// Sorted class labels; leaf probabilities are indexed like this list.
    pub classes: Vec<u16>,
    pub dim: usize,
    pub seed: u64,
    pub trees: Vec<DecisionTree>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            seed: 42,
        }
    }
}

/// Random forest of unpruned Gini CART trees on bootstrap resamples,
/// `ceil(sqrt(dim))` candidate features per node.
///
/// `features` is row-major, `labels.len()` rows of `dim` values.
pub fn train_forest(
    features: &[f64],
    dim: usize,
    labels: &[u16],
    params: ForestParams,
) -> Result<ForestModel> {
    let n = labels.len();
    if n == 0 || dim == 0 {
        return Err(Error::NoSamples);
    }
    if features.len() != n * dim {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: n * dim,
        });
    }
    if features.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("NaN in training features".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::InvalidArgument("forest needs at least one tree".into()));
    }
    let mut classes: Vec<u16> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::SingleClass(classes.len()));
    }
    let class_index: Vec<u16> = labels
        .iter()
        .map(|l| classes.binary_search(l).unwrap() as u16)
        .collect();

    let grower = Grower {
        features,
        dim,
        labels: &class_index,
        n_classes: classes.len(),
        mtry: (dim as f64).sqrt().ceil() as usize,
    };
    let indices: Vec<usize> = (0..params.n_trees).collect();
    let trees = crate::par_map(&indices, |&i| {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(tree_seed(params.seed, i));
        let sample: Vec<u32> = (0..n).map(|_| rng.gen_range(0..n as u32)).collect();
        grower.grow(sample, &mut rng)
    });
    Ok(ForestModel {
        classes,
        dim,
        seed: params.seed,
        trees,
    })
}

struct Grower<'a> {
    features: &'a [f64],
    dim: usize,
    labels: &'a [u16],
    n_classes: usize,
    mtry: usize,
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

impl Grower<'_> {
    fn value(&self, sample: u32, feature: usize) -> f64 {
        self.features[sample as usize * self.dim + feature]
    }

    fn grow(&self, root_samples: Vec<u32>, rng: &mut Xoshiro256PlusPlus) -> DecisionTree {
        let mut nodes = vec![TreeNode::Leaf {
            probabilities: Vec::new(),
        }];
        let mut stack = vec![(0usize, root_samples)];
        let mut order: Vec<usize> = (0..self.dim).collect();
        let mut scratch: Vec<(f64, u16)> = Vec::new();

        while let Some((slot, samples)) = stack.pop() {
            let mut counts = vec![0usize; self.n_classes];
            for &s in &samples {
                counts[self.labels[s as usize] as usize] += 1;
            }
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let split = if pure {
                None
            } else {
                self.best_split(&samples, &counts, &mut order, &mut scratch, rng)
            };
            match split {
                None => {
                    let total = samples.len() as f64;
                    nodes[slot] = TreeNode::Leaf {
                        probabilities: counts.iter().map(|&c| c as f64 / total).collect(),
                    };
                }
                Some(best) => {
                    let (left, right): (Vec<u32>, Vec<u32>) = samples
                        .iter()
                        .partition(|&&s| self.value(s, best.feature) <= best.threshold);
                    let l = nodes.len();
                    nodes.push(TreeNode::Leaf {
                        probabilities: Vec::new(),
                    });
                    nodes.push(TreeNode::Leaf {
                        probabilities: Vec::new(),
                    });
                    nodes[slot] = TreeNode::Split {
                        feature: best.feature as u32,
                        threshold: best.threshold,
                        left: l as u32,
                        right: l as u32 + 1,
                    };
                    stack.push((l + 1, right));
                    stack.push((l, left));
                }
            }
        }
        DecisionTree { nodes }
    }

    /// Draws features without replacement until `mtry` non-constant ones have
    /// been scored, or all are exhausted.
    fn best_split(
        &self,
        samples: &[u32],
        counts: &[usize],
        order: &mut [usize],
        scratch: &mut Vec<(f64, u16)>,
        rng: &mut Xoshiro256PlusPlus,
    ) -> Option<BestSplit> {
        let mut best: Option<BestSplit> = None;
        let mut scored = 0;
        let mut left = vec![0usize; self.n_classes];
        for drawn in 0..self.dim {
            if scored == self.mtry {
                break;
            }
            let pick = drawn + rng.gen_range(0..(self.dim - drawn) as u32) as usize;
            order.swap(drawn, pick);
            let feature = order[drawn];

            scratch.clear();
            scratch.extend(
                samples
                    .iter()
                    .map(|&s| (self.value(s, feature), self.labels[s as usize])),
            );
            scratch.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            if scratch[0].0 == scratch[scratch.len() - 1].0 {
                continue;
            }
            scored += 1;

            // maximize sum over children of (sum_c n_c^2) / n, i.e. minimize
            // size-weighted Gini impurity
            left.iter_mut().for_each(|c| *c = 0);
            let mut left_sq = 0.0;
            let mut right_sq: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
            let total = scratch.len();
            for i in 0..total - 1 {
                let class = scratch[i].1 as usize;
                let (l, r) = (left[class] as f64, (counts[class] - left[class]) as f64);
                left_sq += 2.0 * l + 1.0;
                right_sq -= 2.0 * r - 1.0;
                left[class] += 1;
                let (v, next) = (scratch[i].0, scratch[i + 1].0);
                if v == next {
                    continue;
                }
                let n_left = (i + 1) as f64;
                let score = left_sq / n_left + right_sq / (total as f64 - n_left);
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let mut threshold = v + (next - v) / 2.0;
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(BestSplit {
                        score,
                        feature,
                        threshold,
                    });
                }
            }
        }
        best
    }
}

impl ForestModel {
    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    /// Summed leaf probabilities over all trees for one sample.
    pub fn vote(&self, sample: &[f64]) -> Vec<f64> {
        let mut sum = vec![0.0; self.classes.len()];
        for tree in &self.trees {
            for (s, p) in sum.iter_mut().zip(tree.leaf_probabilities(sample)) {
                *s += p;
            }
        }
        sum
    }

    /// Majority vote over probability sums; ties go to the smaller class.
    pub fn predict(&self, features: &[f64]) -> Result<Vec<u16>> {
        if self.dim == 0 || !features.len().is_multiple_of(self.dim) {
            return Err(Error::FeatureDimension {
                expected: self.dim,
                found: features.len(),
            });
        }
        let rows: Vec<&[f64]> = features.chunks_exact(self.dim).collect();
        Ok(crate::par_map(&rows, |row| {
            let votes = self.vote(row);
            let mut best = 0;
            for (c, &v) in votes.iter().enumerate() {
                if v > votes[best] {
                    best = c;
                }
            }
            self.classes[best]
        }))
    }

    /// Like [`predict`](Self::predict) but checks the row width explicitly.
    pub fn predict_rows(&self, features: &[f64], dim: usize) -> Result<Vec<u16>> {
        if dim != self.dim {
            return Err(Error::FeatureDimension {
                expected: self.dim,
                found: dim,
            });
        }
        self.predict(features)
    }
}
