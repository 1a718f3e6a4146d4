//! Attribute profiles and feature profiles.
//!
//! A profile stacks, per pixel, the result of filtering one or two trees at a
//! sequence of attribute thresholds. Attribute profiles (AP) keep the filtered
//! gray value; feature profiles (FP) keep a feature of the component that
//! contains the pixel after filtering.
//!
//! Column order for a component-tree pair is
//! `[φ_K … φ_1, X, γ_1 … γ_K]` (min-tree thickenings, the input, max-tree
//! thinnings). Self-dual trees give `[X, ψ_1 … ψ_K]`. An FP repeats that block
//! once per feature.

mod filter;
mod io;

pub use filter::{feature_map, filter_tree, map_retained, reconstruct, RetainMask, Rule};
pub use io::{read_profile_stack, write_profile_stack, StackHeader};

use serde::{Deserialize, Serialize};

use crate::attributes::{compute_attributes, Attribute, AttributeTable, Feature};
use crate::component::{build_max_tree, build_min_tree};
use crate::error::{Error, Result};
use crate::imagery::{pca_reduce, rescale_to_levels, MultibandImage, RasterImage};
use crate::partition::{build_alpha_tree, build_omega_tree};
use crate::shapes::build_tree_of_shapes;
use crate::tree::{Connectivity, Tree, TreeKind};

/// Area thresholds before scaling to the image size.
pub const BASE_AREA_THRESHOLDS: [f64; 10] = [
    25.0, 100.0, 500.0, 1000.0, 5000.0, 10000.0, 20000.0, 50000.0, 100000.0, 150000.0,
];
pub const DEFAULT_MOMENT_THRESHOLDS: [f64; 4] = [0.2, 0.3, 0.4, 0.5];
const AREA_REFERENCE_PIXELS: f64 = 1e5;

/// Default area thresholds, shrunk proportionally for images under 10^5 pixels.
pub fn default_area_thresholds(pixel_count: usize) -> Vec<f64> {
    let n = pixel_count as f64;
    if n >= AREA_REFERENCE_PIXELS {
        return BASE_AREA_THRESHOLDS.to_vec();
    }
    BASE_AREA_THRESHOLDS.iter().map(|t| t * n / AREA_REFERENCE_PIXELS).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub attribute: Attribute,
    pub thresholds: Vec<f64>,
    pub rule: Rule,
}

impl FilterSpec {
    pub fn new(attribute: Attribute, thresholds: Vec<f64>, rule: Rule) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidArgument("threshold list is empty".into()));
        }
        if thresholds.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("thresholds must be finite".into()));
        }
        if thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "thresholds must be strictly ascending: {thresholds:?}"
            )));
        }
        Ok(Self {
            attribute,
            thresholds,
            rule,
        })
    }

    /// Min rule for increasing attributes, Direct rule otherwise.
    pub fn with_default_rule(attribute: Attribute, thresholds: Vec<f64>) -> Result<Self> {
        let rule = if attribute.is_increasing() {
            Rule::Min
        } else {
            Rule::Direct
        };
        Self::new(attribute, thresholds, rule)
    }

    pub fn default_for(attribute: Attribute, pixel_count: usize) -> Self {
        let thresholds = match attribute {
            Attribute::Area => default_area_thresholds(pixel_count),
            Attribute::MomentOfInertia => DEFAULT_MOMENT_THRESHOLDS.to_vec(),
        };
        Self::with_default_rule(attribute, thresholds).expect("default thresholds are valid")
    }

    pub fn k(&self) -> usize {
        self.thresholds.len()
    }
}

/// Which hierarchy (or pair) a profile is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeFamily {
    /// Min-tree for thickenings plus max-tree for thinnings.
    ComponentPair,
    TreeOfShapes,
    Alpha,
    Omega,
}

impl TreeFamily {
    pub const ALL: [TreeFamily; 4] = [
        TreeFamily::ComponentPair,
        TreeFamily::TreeOfShapes,
        TreeFamily::Alpha,
        TreeFamily::Omega,
    ];

    /// Columns per attribute block and per feature.
    pub fn block_dim(self, k: usize) -> usize {
        match self {
            TreeFamily::ComponentPair => 2 * k + 1,
            _ => k + 1,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            TreeFamily::ComponentPair => "component",
            TreeFamily::TreeOfShapes => "tos",
            TreeFamily::Alpha => "alpha",
            TreeFamily::Omega => "omega",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMode {
    Ap,
    Fp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// Min-tree filter.
    Thickening,
    /// Unfiltered input.
    Original,
    /// Max-tree filter.
    Thinning,
    /// Filter on a self-dual tree.
    SelfDual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColumnContent {
    Gray,
    Feature(Feature),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDescriptor {
    pub band: usize,
    pub tree: Option<TreeKind>,
    pub attribute: Option<Attribute>,
    pub threshold: Option<f64>,
    pub polarity: Polarity,
    pub content: ColumnContent,
}

/// Per-pixel feature vectors, pixel-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileStack {
    width: usize,
    height: usize,
    data: Vec<f64>,
    layout: Vec<ColumnDescriptor>,
}

impl ProfileStack {
    pub fn new(
        width: usize,
        height: usize,
        data: Vec<f64>,
        layout: Vec<ColumnDescriptor>,
    ) -> Result<Self> {
        if data.len() != width * height * layout.len() {
            return Err(Error::LengthMismatch {
                left: data.len(),
                right: width * height * layout.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
            layout,
        })
    }

    /// Assembles a stack from whole-image columns.
    pub fn from_columns(
        width: usize,
        height: usize,
        columns: Vec<(ColumnDescriptor, Vec<f64>)>,
    ) -> Result<Self> {
        let n = width * height;
        let dim = columns.len();
        if let Some((_, bad)) = columns.iter().find(|(_, c)| c.len() != n) {
            return Err(Error::LengthMismatch {
                left: bad.len(),
                right: n,
            });
        }
        let mut data = vec![0.0; n * dim];
        for (c, (_, values)) in columns.iter().enumerate() {
            for (p, &v) in values.iter().enumerate() {
                data[p * dim + c] = v;
            }
        }
        let layout = columns.into_iter().map(|(d, _)| d).collect();
        Self::new(width, height, data, layout)
    }

    /// Single-column stack holding the raw gray values.
    pub fn raw(image: &RasterImage) -> Self {
        Self {
            width: image.width(),
            height: image.height(),
            data: image.values().iter().map(|&v| f64::from(v)).collect(),
            layout: vec![original_column(0)],
        }
    }

    /// Concatenates stacks column-wise, in order.
    pub fn hstack(stacks: &[ProfileStack]) -> Result<Self> {
        let first = stacks
            .first()
            .ok_or_else(|| Error::InvalidArgument("nothing to stack".into()))?;
        let (w, h) = (first.width, first.height);
        for s in stacks {
            if (s.width, s.height) != (w, h) {
                return Err(Error::DimensionMismatch {
                    expected: (w, h),
                    found: (s.width, s.height),
                });
            }
        }
        let dim: usize = stacks.iter().map(|s| s.dim()).sum();
        let mut data = Vec::with_capacity(w * h * dim);
        for p in 0..w * h {
            for s in stacks {
                data.extend_from_slice(s.pixel(p));
            }
        }
        let layout = stacks.iter().flat_map(|s| s.layout.iter().cloned()).collect();
        Self::new(w, h, data, layout)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn layout(&self) -> &[ColumnDescriptor] {
        &self.layout
    }

    pub fn pixel(&self, index: usize) -> &[f64] {
        let d = self.dim();
        &self.data[index * d..(index + 1) * d]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        let d = self.dim();
        self.data.iter().skip(c).step_by(d).copied().collect()
    }
}

fn original_column(band: usize) -> ColumnDescriptor {
    ColumnDescriptor {
        band,
        tree: None,
        attribute: None,
        threshold: None,
        polarity: Polarity::Original,
        content: ColumnContent::Gray,
    }
}

/// The tree(s) of one band with their attribute tables.
pub struct Hierarchy {
    family: TreeFamily,
    /// Component pair: `[min-tree, max-tree]`; otherwise a single tree.
    trees: Vec<(Tree, AttributeTable)>,
    original: Vec<f64>,
    width: usize,
    height: usize,
}

impl Hierarchy {
    pub fn build(image: &RasterImage, family: TreeFamily, connectivity: Connectivity) -> Result<Self> {
        let trees = match family {
            TreeFamily::ComponentPair => vec![
                build_min_tree(image, connectivity),
                build_max_tree(image, connectivity),
            ],
            TreeFamily::TreeOfShapes => vec![build_tree_of_shapes(image)],
            TreeFamily::Alpha => vec![build_alpha_tree(image, connectivity)],
            TreeFamily::Omega => {
                vec![build_omega_tree(&build_alpha_tree(image, connectivity), image)?]
            }
        };
        let trees = trees
            .into_iter()
            .map(|t| {
                let table = compute_attributes(&t, image)?;
                Ok((t, table))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            family,
            trees,
            original: image.values().iter().map(|&v| f64::from(v)).collect(),
            width: image.width(),
            height: image.height(),
        })
    }

    pub fn family(&self) -> TreeFamily {
        self.family
    }

    pub fn trees(&self) -> impl Iterator<Item = (&Tree, &AttributeTable)> {
        self.trees.iter().map(|(t, a)| (t, a))
    }

    /// One block of columns: `content` for every threshold, around `X`.
    fn block(
        &self,
        spec: &FilterSpec,
        content: ColumnContent,
        band: usize,
    ) -> Vec<(ColumnDescriptor, Vec<f64>)> {
        let column = |tree_index: usize, threshold: f64, polarity: Polarity| {
            let (tree, table) = &self.trees[tree_index];
            let mask = filter_tree(tree, table, spec.attribute, threshold, spec.rule);
            let values = match content {
                ColumnContent::Gray => reconstruct(tree, table, &mask).values,
                ColumnContent::Feature(f) => feature_map(tree, &mask, table, f).values,
            };
            let descriptor = ColumnDescriptor {
                band,
                tree: Some(tree.kind()),
                attribute: Some(spec.attribute),
                threshold: Some(threshold),
                polarity,
                content,
            };
            (descriptor, values)
        };

        let mut jobs: Vec<(usize, f64, Polarity)> = Vec::new();
        let mut original_at = 0;
        match self.family {
            TreeFamily::ComponentPair => {
                jobs.extend(spec.thresholds.iter().rev().map(|&t| (0, t, Polarity::Thickening)));
                original_at = jobs.len();
                jobs.extend(spec.thresholds.iter().map(|&t| (1, t, Polarity::Thinning)));
            }
            _ => jobs.extend(spec.thresholds.iter().map(|&t| (0, t, Polarity::SelfDual))),
        }
        let mut columns = crate::par_map(&jobs, |&(tree, t, polarity)| column(tree, t, polarity));
        columns.insert(original_at, (original_column(band), self.original.clone()));
        columns
    }

    /// All blocks for `request`, tagged with `band`.
    pub fn profile(&self, request: &ProfileRequest, band: usize) -> Result<ProfileStack> {
        request.validate()?;
        let mut columns = Vec::new();
        for spec in &request.specs {
            match request.mode {
                ProfileMode::Ap => columns.extend(self.block(spec, ColumnContent::Gray, band)),
                ProfileMode::Fp => {
                    for &f in &request.features {
                        columns.extend(self.block(spec, ColumnContent::Feature(f), band));
                    }
                }
            }
        }
        ProfileStack::from_columns(self.width, self.height, columns)
    }
}

/// Everything needed to turn an image into a profile stack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRequest {
    pub family: TreeFamily,
    pub mode: ProfileMode,
    /// One block per spec, in order.
    pub specs: Vec<FilterSpec>,
    /// FP features, stacked in order. Ignored for APs.
    pub features: Vec<Feature>,
    pub connectivity: Connectivity,
}

impl ProfileRequest {
    pub fn new(family: TreeFamily, mode: ProfileMode, specs: Vec<FilterSpec>) -> Self {
        Self {
            family,
            mode,
            specs,
            features: vec![Feature::StdDev, Feature::Area],
            connectivity: Connectivity::C4,
        }
    }

    pub fn with_features(mut self, features: Vec<Feature>) -> Self {
        self.features = features;
        self
    }

    pub fn with_connectivity(mut self, connectivity: Connectivity) -> Self {
        self.connectivity = connectivity;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.specs.is_empty() {
            return Err(Error::InvalidArgument("no filter specification".into()));
        }
        if self.mode == ProfileMode::Fp && self.features.is_empty() {
            return Err(Error::InvalidArgument("feature profile without features".into()));
        }
        Ok(())
    }

    /// Number of columns produced per band.
    pub fn dim(&self) -> usize {
        let per_feature = match self.mode {
            ProfileMode::Ap => 1,
            ProfileMode::Fp => self.features.len(),
        };
        self.specs
            .iter()
            .map(|s| per_feature * self.family.block_dim(s.k()))
            .sum()
    }
}

pub fn build_profiles(image: &RasterImage, request: &ProfileRequest) -> Result<ProfileStack> {
    request.validate()?;
    Hierarchy::build(image, request.family, request.connectivity)?.profile(request, 0)
}

pub fn build_ap(image: &RasterImage, family: TreeFamily, spec: &FilterSpec) -> Result<ProfileStack> {
    build_profiles(image, &ProfileRequest::new(family, ProfileMode::Ap, vec![spec.clone()]))
}

pub fn build_fp(
    image: &RasterImage,
    family: TreeFamily,
    spec: &FilterSpec,
    features: &[Feature],
) -> Result<ProfileStack> {
    let request = ProfileRequest::new(family, ProfileMode::Fp, vec![spec.clone()])
        .with_features(features.to_vec());
    build_profiles(image, &request)
}

/// Extended profiles: PCA, quantize each component to `levels`, profile each
/// component, concatenate.
pub fn build_extended(
    image: &MultibandImage,
    n_pca: usize,
    levels: u32,
    request: &ProfileRequest,
) -> Result<ProfileStack> {
    request.validate()?;
    let pca = pca_reduce(image, n_pca)?;
    let (w, h) = (image.width(), image.height());
    let bands: Vec<usize> = (0..n_pca).collect();
    let stacks = crate::par_map(&bands, |&b| {
        let quantized = rescale_to_levels(pca.components.band(b), w, h, levels)?;
        Hierarchy::build(&quantized, request.family, request.connectivity)?.profile(request, b)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    ProfileStack::hstack(&stacks)
}
