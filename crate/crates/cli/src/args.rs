use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treeprofiles::profiles::{ProfileMode, TreeFamily};
use treeprofiles::{Attribute, Connectivity, Feature, TreeKind};

#[derive(Debug, Parser)]
#[command(name = "treeprof", version, about = "Tree-based attribute and feature profiles")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute profile stacks and write them as <tree>-<mode>.json/.raw.
    Profile(ProfileArgs),
    /// Train a random forest on profiles and report accuracy on the test pixels.
    Classify(ClassifyArgs),
    /// Run the {AP, FP} x tree x {area, moment, both} comparison.
    Compare(CompareArgs),
    /// Print the nodes of one tree, optionally with their attributes.
    TreeDump(TreeDumpArgs),
    /// Write the synthetic three-class scene used by the acceptance suite.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Grayscale PGM image.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Multiband image header (JSON next to a band-sequential .raw file).
    #[arg(long)]
    pub multiband: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub input: Input,
    /// Principal components kept from a multiband image.
    #[arg(long, default_value_t = 4)]
    pub pca: usize,
    /// Gray levels each principal component is quantized to.
    #[arg(long, default_value_t = treeprofiles::experiment::PCA_LEVELS)]
    pub levels: u32,
    /// Key=value file with defaults for any long option; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProfileOptions {
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',', default_values_t = [TreeArg::Component])]
    pub tree: Vec<TreeArg>,
    #[arg(long, value_enum, default_value_t = ModeArg::Fp)]
    pub mode: ModeArg,
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',', default_values_t = [AttrArg::Area])]
    pub attr: Vec<AttrArg>,
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',', default_values_t = [FeatureArg::Stddev, FeatureArg::Area])]
    pub feature: Vec<FeatureArg>,
    /// Comma-separated, ascending. Defaults scale with the image size.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub area_thresholds: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub moment_thresholds: Vec<f64>,
    /// Pixel adjacency for component and partition trees.
    #[arg(long, value_enum, default_value_t = ConnArg::Four)]
    pub connectivity: ConnArg,
}

#[derive(Debug, Args)]
pub struct ForestOptions {
    #[arg(long, default_value_t = 100)]
    pub rf_trees: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub profile: ProfileOptions,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Training labels (PGM, 0 = unlabeled).
    #[arg(long)]
    pub train: PathBuf,
    /// Test labels (PGM, 0 = unlabeled).
    #[arg(long)]
    pub test: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[command(flatten)]
    pub profile: ProfileOptions,
    #[command(flatten)]
    pub forest: ForestOptions,
    /// Classify a stored profile stack instead of computing profiles.
    #[arg(long)]
    pub profile_stack: Option<PathBuf>,
    /// Also classify the raw band values.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub labels: LabelArgs,
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',',
          default_values_t = [TreeArg::Component, TreeArg::Tos, TreeArg::Alpha, TreeArg::Omega])]
    pub tree: Vec<TreeArg>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    #[arg(long, value_enum, num_args = 1.., value_delimiter = ',', default_values_t = [FeatureArg::Stddev, FeatureArg::Area])]
    pub feature: Vec<FeatureArg>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub area_thresholds: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub moment_thresholds: Vec<f64>,
    #[arg(long, value_enum, default_value_t = ConnArg::Four)]
    pub connectivity: ConnArg,
    #[command(flatten)]
    pub forest: ForestOptions,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TreeDumpArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, value_enum)]
    pub tree: DumpTree,
    #[arg(long, value_enum, default_value_t = ConnArg::Four)]
    pub connectivity: ConnArg,
    /// Append area, moment of inertia and standard deviation per node.
    #[arg(long)]
    pub attributes: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long, default_value_t = 128)]
    pub height: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeArg {
    Component,
    Tos,
    Alpha,
    Omega,
}

impl From<TreeArg> for TreeFamily {
    fn from(t: TreeArg) -> Self {
        match t {
            TreeArg::Component => TreeFamily::ComponentPair,
            TreeArg::Tos => TreeFamily::TreeOfShapes,
            TreeArg::Alpha => TreeFamily::Alpha,
            TreeArg::Omega => TreeFamily::Omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpTree {
    Max,
    Min,
    Tos,
    Alpha,
    Omega,
}

impl From<DumpTree> for TreeKind {
    fn from(t: DumpTree) -> Self {
        match t {
            DumpTree::Max => TreeKind::MaxTree,
            DumpTree::Min => TreeKind::MinTree,
            DumpTree::Tos => TreeKind::TreeOfShapes,
            DumpTree::Alpha => TreeKind::AlphaTree,
            DumpTree::Omega => TreeKind::OmegaTree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ap,
    Fp,
    Both,
}

impl ModeArg {
    pub fn modes(self) -> Vec<ProfileMode> {
        match self {
            ModeArg::Ap => vec![ProfileMode::Ap],
            ModeArg::Fp => vec![ProfileMode::Fp],
            ModeArg::Both => vec![ProfileMode::Ap, ProfileMode::Fp],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttrArg {
    Area,
    Moment,
}

impl From<AttrArg> for Attribute {
    fn from(a: AttrArg) -> Self {
        match a {
            AttrArg::Area => Attribute::Area,
            AttrArg::Moment => Attribute::MomentOfInertia,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeatureArg {
    Stddev,
    Area,
}

impl From<FeatureArg> for Feature {
    fn from(f: FeatureArg) -> Self {
        match f {
            FeatureArg::Stddev => Feature::StdDev,
            FeatureArg::Area => Feature::Area,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConnArg {
    #[value(name = "4")]
    Four,
    #[value(name = "8")]
    Eight,
}

impl From<ConnArg> for Connectivity {
    fn from(c: ConnArg) -> Self {
        match c {
            ConnArg::Four => Connectivity::C4,
            ConnArg::Eight => Connectivity::C8,
        }
    }
}
