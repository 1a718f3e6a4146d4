//! Hierarchical image representations (max/min trees, tree of shapes,
//! alpha and omega trees) and the attribute and feature profiles built on
//! them, with a random-forest classifier for pixel labeling.

pub mod attributes;
pub mod classifier;
pub mod component;
pub mod error;
pub mod experiment;
pub mod imagery;
pub mod partition;
pub mod profiles;
pub mod shapes;
pub mod synthetic;
pub mod tree;

pub use attributes::{compute_attributes, Attribute, AttributeTable, Feature, NodeAttributes};
pub use component::{build_max_tree, build_min_tree};
pub use error::{Error, Result};
pub use imagery::{LabelMap, MultibandImage, RasterImage, RealImage};
pub use partition::{build_alpha_tree, build_alpha_tree_from_edges, build_omega_tree, EdgeList};
pub use shapes::{border_median, build_tree_of_shapes};
pub use tree::{Connectivity, NodeId, Tree, TreeKind};

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
