//! WebAssembly bindings for the browser demo in `www/`.

use treeprofiles::experiment::{compare, CompareConfig, PreparedInput};
use treeprofiles::imagery::decode_pgm;
use treeprofiles::profiles::{feature_map, filter_tree, reconstruct, RetainMask, Rule};
use treeprofiles::synthetic::{synthetic_scene, SceneParams};
use treeprofiles::{
    build_alpha_tree, build_max_tree, build_min_tree, build_omega_tree, build_tree_of_shapes,
    compute_attributes, Attribute, AttributeTable, Connectivity, Feature, RasterImage, RealImage, Tree,
};
use wasm_bindgen::prelude::*;

const KINDS: [&str; 5] = ["max", "min", "tos", "alpha", "omega"];

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    image: RasterImage,
    trees: Vec<(Tree, AttributeTable)>,
}

#[wasm_bindgen]
impl Demo {
    /// The three-class synthetic scene.
    pub fn synthetic(width: usize, height: usize, seed: u32) -> Result<Demo, JsError> {
        let scene = synthetic_scene(&SceneParams {
            width,
            height,
            seed: u64::from(seed),
            ..SceneParams::default()
        })
        .map_err(js_err)?;
        Demo::new(scene.image).map_err(js_err)
    }

    /// A grayscale image from PGM file contents (P2 or P5).
    pub fn from_pgm(bytes: &[u8]) -> Result<Demo, JsError> {
        Demo::new(decode_pgm(bytes).map_err(js_err)?).map_err(js_err)
    }

    pub fn width(&self) -> usize {
        self.image.width()
    }

    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn node_count(&self, tree: &str) -> Result<usize, JsError> {
        Ok(self.tree(tree)?.0.node_count())
    }

    pub fn original_rgba(&self) -> Vec<u8> {
        to_rgba(&self.image.to_real())
    }

    /// Removes every node whose attribute is below `threshold` and returns
    /// the reconstructed image.
    pub fn filtered_rgba(&self, tree: &str, attribute: &str, threshold: f64) -> Result<Vec<u8>, JsError> {
        let (t, table) = self.tree(tree)?;
        let mask = mask(t, table, attribute, threshold)?;
        Ok(to_rgba(&reconstruct(t, table, &mask)))
    }

    /// Area or standard deviation of each pixel's surviving component.
    pub fn feature_rgba(
        &self,
        tree: &str,
        attribute: &str,
        threshold: f64,
        feature: &str,
    ) -> Result<Vec<u8>, JsError> {
        let (t, table) = self.tree(tree)?;
        let mask = mask(t, table, attribute, threshold)?;
        let feature = match feature {
            "area" => Feature::Area,
            "stddev" => Feature::StdDev,
            other => return Err(JsError::new(&format!("unknown feature {other:?}"))),
        };
        let mut map = feature_map(t, &mask, table, feature);
        if feature == Feature::Area {
            // areas span orders of magnitude
            for v in &mut map.values {
                *v = v.ln();
            }
        }
        Ok(to_rgba(&map))
    }

    /// How many nodes survive the filter.
    pub fn retained(&self, tree: &str, attribute: &str, threshold: f64) -> Result<usize, JsError> {
        let (t, table) = self.tree(tree)?;
        Ok(mask(t, table, attribute, threshold)?.retained_count())
    }
}

impl Demo {
    fn new(image: RasterImage) -> treeprofiles::Result<Demo> {
        let alpha = build_alpha_tree(&image, Connectivity::C4);
        let omega = build_omega_tree(&alpha, &image)?;
        let trees = [
            build_max_tree(&image, Connectivity::C4),
            build_min_tree(&image, Connectivity::C4),
            build_tree_of_shapes(&image),
            alpha,
            omega,
        ];
        let trees = trees
            .into_iter()
            .map(|t| {
                let table = compute_attributes(&t, &image)?;
                Ok((t, table))
            })
            .collect::<treeprofiles::Result<_>>()?;
        Ok(Demo { image, trees })
    }

    fn tree(&self, name: &str) -> Result<&(Tree, AttributeTable), JsError> {
        KINDS
            .iter()
            .position(|k| *k == name)
            .map(|i| &self.trees[i])
            .ok_or_else(|| JsError::new(&format!("unknown tree {name:?}")))
    }
}

fn mask(tree: &Tree, table: &AttributeTable, attribute: &str, threshold: f64) -> Result<RetainMask, JsError> {
    let (attribute, rule) = match attribute {
        "area" => (Attribute::Area, Rule::Min),
        "moment" => (Attribute::MomentOfInertia, Rule::Direct),
        other => return Err(JsError::new(&format!("unknown attribute {other:?}"))),
    };
    Ok(filter_tree(tree, table, attribute, threshold, rule))
}

/// Gray RGBA, stretched to the value range.
fn to_rgba(image: &RealImage) -> Vec<u8> {
    let lo = image.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = image.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = if hi > lo { 255.0 / (hi - lo) } else { 0.0 };
    image
        .values
        .iter()
        .flat_map(|&v| {
            let g = ((v - lo) * scale).round() as u8;
            [g, g, g, 255]
        })
        .collect()
}

/// CSV followed by JSON of the default comparison on the default synthetic
/// scene; native and wasm builds must produce the same bytes.
#[wasm_bindgen]
pub fn default_comparison() -> Result<String, JsError> {
    let scene = synthetic_scene(&SceneParams::default()).map_err(js_err)?;
    let input = PreparedInput::gray(scene.image);
    let config = CompareConfig::defaults(input.pixel_count());
    let table = compare(&input, &scene.train, &scene.test, &config).map_err(js_err)?;
    Ok(table.to_csv() + &table.to_json())
}
