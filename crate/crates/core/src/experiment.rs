//! End-to-end runs: profile an input, classify it, tabulate AP against FP.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::attributes::{Attribute, Feature};
use crate::classifier::{evaluate, gather_samples, train_forest, ConfusionMatrix, ForestModel, ForestParams};
use crate::error::{Error, Result};
use crate::imagery::{pca_reduce, rescale_to_levels, LabelMap, MultibandImage, RasterImage};
use crate::profiles::{FilterSpec, Hierarchy, ProfileMode, ProfileRequest, ProfileStack, TreeFamily};
use crate::tree::Connectivity;

/// Default quantization of PCA components before tree construction.
pub const PCA_LEVELS: u32 = 256;

/// The integer bands trees are built on: one gray image, or quantized
/// principal components of a multiband image.
#[derive(Debug, Clone)]
pub struct PreparedInput {
    bands: Vec<RasterImage>,
}

impl PreparedInput {
    pub fn gray(image: RasterImage) -> Self {
        Self { bands: vec![image] }
    }

    pub fn multiband(image: &MultibandImage, n_pca: usize, levels: u32) -> Result<Self> {
        let pca = pca_reduce(image, n_pca)?;
        let (w, h) = (image.width(), image.height());
        let bands = (0..n_pca)
            .map(|b| rescale_to_levels(pca.components.band(b), w, h, levels))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bands })
    }

    pub fn bands(&self) -> &[RasterImage] {
        &self.bands
    }

    pub fn dims(&self) -> (usize, usize) {
        self.bands[0].dims()
    }

    pub fn pixel_count(&self) -> usize {
        self.bands[0].len()
    }

    /// The band values themselves, one column per band.
    pub fn raw_stack(&self) -> Result<ProfileStack> {
        let stacks: Vec<ProfileStack> = self.bands.iter().map(ProfileStack::raw).collect();
        ProfileStack::hstack(&stacks)
    }

    pub fn hierarchies(&self, family: TreeFamily, connectivity: Connectivity) -> Result<Vec<Hierarchy>> {
        crate::par_map(&self.bands, |band| Hierarchy::build(band, family, connectivity))
            .into_iter()
            .collect()
    }

    pub fn profile(&self, request: &ProfileRequest) -> Result<ProfileStack> {
        let hierarchies = self.hierarchies(request.family, request.connectivity)?;
        profile_hierarchies(&hierarchies, request)
    }
}

/// Profiles of every band, concatenated in band order.
pub fn profile_hierarchies(hierarchies: &[Hierarchy], request: &ProfileRequest) -> Result<ProfileStack> {
    let stacks = hierarchies
        .iter()
        .enumerate()
        .map(|(b, h)| h.profile(request, b))
        .collect::<Result<Vec<_>>>()?;
    ProfileStack::hstack(&stacks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassAccuracy {
    pub class: u16,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub method: String,
    pub dim: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub overall_accuracy: f64,
    pub kappa: f64,
    pub per_class: Vec<ClassAccuracy>,
    pub confusion: ConfusionMatrix,
}

impl ClassificationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "method      {}", self.method);
        let _ = writeln!(s, "dim         {}", self.dim);
        let _ = writeln!(s, "train/test  {}/{}", self.n_train, self.n_test);
        let _ = writeln!(s, "OA          {:.4}", self.overall_accuracy);
        let _ = writeln!(s, "kappa       {:.4}", self.kappa);
        for c in &self.per_class {
            let _ = writeln!(s, "class {:<5} {:.4}", c.class, c.accuracy);
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub report: ClassificationReport,
    pub model: ForestModel,
    /// Predicted class of every test pixel, 0 elsewhere.
    pub prediction: LabelMap,
}

/// Trains on the labeled pixels of `train` and evaluates on those of `test`.
pub fn classify_stack(
    stack: &ProfileStack,
    train: &LabelMap,
    test: &LabelMap,
    params: ForestParams,
    method: &str,
) -> Result<Classification> {
    let (x, y) = gather_samples(stack, train)?;
    let model = train_forest(&x, stack.dim(), &y, params)?;
    let (tx, ty) = gather_samples(stack, test)?;
    let predicted = model.predict(&tx)?;
    let evaluation = evaluate(&predicted, &ty)?;

    let mut map = vec![0u16; test.labels().len()];
    for (p, &c) in test.labeled_pixels().zip(&predicted) {
        map[p] = c;
    }
    let per_class = evaluation
        .confusion
        .per_class_accuracy()
        .into_iter()
        .map(|(class, accuracy)| ClassAccuracy { class, accuracy })
        .collect();
    Ok(Classification {
        report: ClassificationReport {
            method: method.to_string(),
            dim: stack.dim(),
            n_train: y.len(),
            n_test: ty.len(),
            overall_accuracy: evaluation.overall_accuracy,
            kappa: evaluation.kappa,
            per_class,
            confusion: evaluation.confusion,
        },
        model,
        prediction: LabelMap::new(test.width(), test.height(), map)?,
    })
}

/// Attribute column group of the comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttributeSet {
    Area,
    Moment,
    Both,
}

impl AttributeSet {
    pub const ALL: [AttributeSet; 3] = [AttributeSet::Area, AttributeSet::Moment, AttributeSet::Both];

    pub fn name(self) -> &'static str {
        match self {
            AttributeSet::Area => "area",
            AttributeSet::Moment => "moment",
            AttributeSet::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub families: Vec<TreeFamily>,
    pub modes: Vec<ProfileMode>,
    pub area: FilterSpec,
    pub moment: FilterSpec,
    pub features: Vec<Feature>,
    pub connectivity: Connectivity,
    pub forest: ForestParams,
}

impl CompareConfig {
    pub fn defaults(pixel_count: usize) -> Self {
        Self {
            families: TreeFamily::ALL.to_vec(),
            modes: vec![ProfileMode::Ap, ProfileMode::Fp],
            area: FilterSpec::default_for(Attribute::Area, pixel_count),
            moment: FilterSpec::default_for(Attribute::MomentOfInertia, pixel_count),
            features: vec![Feature::StdDev, Feature::Area],
            connectivity: Connectivity::C4,
            forest: ForestParams::default(),
        }
    }

    fn specs(&self, set: AttributeSet) -> Vec<FilterSpec> {
        match set {
            AttributeSet::Area => vec![self.area.clone()],
            AttributeSet::Moment => vec![self.moment.clone()],
            AttributeSet::Both => vec![self.area.clone(), self.moment.clone()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub overall_accuracy: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mode: ProfileMode,
    pub family: TreeFamily,
    /// Area, moment, both.
    pub scores: [Score; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    /// Random forest on the band values alone.
    pub baseline: Score,
    pub rows: Vec<ComparisonRow>,
}

pub fn mode_name(mode: ProfileMode) -> &'static str {
    match mode {
        ProfileMode::Ap => "ap",
        ProfileMode::Fp => "fp",
    }
}

impl ComparisonTable {
    pub const CSV_HEADER: &'static str =
        "mode,tree,area_oa,area_kappa,moment_oa,moment_kappa,both_oa,both_kappa";

    /// Shortest round-trip decimal for every value.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for row in &self.rows {
            let _ = write!(s, "{},{}", mode_name(row.mode), row.family.short_name());
            for score in &row.scores {
                let _ = write!(s, ",{},{}", score.overall_accuracy, score.kappa);
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<4} {:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "", "", "area", "", "moment", "", "both", ""
        );
        let _ = writeln!(
            s,
            "{:<4} {:<10} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8}",
            "mode", "tree", "OA", "kappa", "OA", "kappa", "OA", "kappa"
        );
        for row in &self.rows {
            let _ = write!(s, "{:<4} {:<10}", mode_name(row.mode), row.family.short_name());
            for score in &row.scores {
                let _ = write!(s, " {:>8.2} {:>8.4}", 100.0 * score.overall_accuracy, score.kappa);
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "raw values: OA {:.2} kappa {:.4}",
            100.0 * self.baseline.overall_accuracy,
            self.baseline.kappa
        );
        s
    }
}

/// Runs the full {AP, FP} x families x {area, moment, both} matrix.
/// Rows are ordered by mode, then family, as given in `config`.
pub fn compare(
    input: &PreparedInput,
    train: &LabelMap,
    test: &LabelMap,
    config: &CompareConfig,
) -> Result<ComparisonTable> {
    if config.families.is_empty() || config.modes.is_empty() {
        return Err(Error::InvalidArgument("nothing to compare".into()));
    }
    let score = |stack: &ProfileStack, method: &str| -> Result<Score> {
        let r = classify_stack(stack, train, test, config.forest, method)?.report;
        Ok(Score {
            overall_accuracy: r.overall_accuracy,
            kappa: r.kappa,
        })
    };
    let baseline = score(&input.raw_stack()?, "raw")?;

    let mut cells = Vec::new();
    for &family in &config.families {
        let hierarchies = input.hierarchies(family, config.connectivity)?;
        for &mode in &config.modes {
            let mut scores = [Score { overall_accuracy: 0.0, kappa: 0.0 }; 3];
            for (i, set) in AttributeSet::ALL.into_iter().enumerate() {
                let request = ProfileRequest::new(family, mode, config.specs(set))
                    .with_features(config.features.clone())
                    .with_connectivity(config.connectivity);
                let stack = profile_hierarchies(&hierarchies, &request)?;
                let method = format!("{}-{}-{}", mode_name(mode), family.short_name(), set.name());
                scores[i] = score(&stack, &method)?;
            }
            cells.push((mode, family, scores));
        }
    }
    let mut rows = Vec::new();
    for &mode in &config.modes {
        for &family in &config.families {
            let (_, _, scores) = cells
                .iter()
                .find(|c| c.0 == mode && c.1 == family)
                .copied()
                .expect("every cell computed");
            rows.push(ComparisonRow { mode, family, scores });
        }
    }
    Ok(ComparisonTable { baseline, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{synthetic_scene, SceneParams};

    fn small_scene() -> crate::synthetic::Scene {
        synthetic_scene(&SceneParams {
            width: 40,
            height: 40,
            blobs: 2,
            squares: 10,
            ..SceneParams::default()
        })
        .unwrap()
    }

    #[test]
    fn classify_reports_counts() {
        let scene = small_scene();
        let input = PreparedInput::gray(scene.image.clone());
        let stack = input.raw_stack().unwrap();
        let params = ForestParams { n_trees: 5, seed: 3 };
        let c = classify_stack(&stack, &scene.train, &scene.test, params, "raw").unwrap();
        assert_eq!(c.report.n_train, scene.train.labeled_count());
        assert_eq!(c.report.n_test, scene.test.labeled_count());
        assert_eq!(c.report.confusion.total() as usize, c.report.n_test);
        assert_eq!(c.prediction.labeled_count(), c.report.n_test);
    }

    #[test]
    fn comparison_shape_and_csv() {
        let scene = small_scene();
        let input = PreparedInput::gray(scene.image.clone());
        let mut config = CompareConfig::defaults(input.pixel_count());
        config.families = vec![TreeFamily::Alpha];
        config.forest.n_trees = 3;
        let table = compare(&input, &scene.train, &scene.test, &config).unwrap();
        assert_eq!(table.rows.len(), 2);
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("ap,alpha,"));
        assert_eq!(lines[2].split(',').count(), 8);
    }
}
