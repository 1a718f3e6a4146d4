//! Max-tree and min-tree construction.

use crate::imagery::RasterImage;
use crate::tree::{Connectivity, Tree, TreeKind};

const UNSET: u32 = u32::MAX;

/// Max-tree: components of the upper level sets `{p : X(p) >= λ}`.
pub fn build_max_tree(image: &RasterImage, connectivity: Connectivity) -> Tree {
    build_component_tree(image, connectivity, TreeKind::MaxTree)
}

/// Min-tree: components of the lower level sets `{p : X(p) <= λ}`.
pub fn build_min_tree(image: &RasterImage, connectivity: Connectivity) -> Tree {
    build_component_tree(image, connectivity, TreeKind::MinTree)
}

/// Pixel indices sorted by ascending `key` (stable counting sort).
pub(crate) fn sort_pixels(keys: &[u16]) -> Vec<u32> {
    let mut start = vec![0u32; 1 << 16 | 1];
    for &k in keys {
        start[k as usize + 1] += 1;
    }
    for i in 0..1 << 16 {
        start[i + 1] += start[i];
    }
    let mut sorted = vec![0u32; keys.len()];
    for (p, &k) in keys.iter().enumerate() {
        sorted[start[k as usize] as usize] = p as u32;
        start[k as usize] += 1;
    }
    sorted
}

fn find_root(zpar: &mut [u32], mut p: u32) -> u32 {
    while zpar[p as usize] != p {
        let grand = zpar[zpar[p as usize] as usize];
        zpar[p as usize] = grand;
        p = grand;
    }
    p
}

fn build_component_tree(image: &RasterImage, connectivity: Connectivity, kind: TreeKind) -> Tree {
    let (width, height) = image.dims();
    let values = image.values();
    let keys: Vec<u16> = match kind {
        TreeKind::MaxTree => values.to_vec(),
        _ => values.iter().map(|&v| u16::MAX - v).collect(),
    };
    let sorted = sort_pixels(&keys);
    let n = values.len();

    // union-find flooding from the highest key down
    let mut parent = vec![UNSET; n];
    let mut zpar = vec![UNSET; n];
    for &p in sorted.iter().rev() {
        parent[p as usize] = p;
        zpar[p as usize] = p;
        for q in connectivity.neighbors(p as usize, width, height) {
            if zpar[q] != UNSET {
                let r = find_root(&mut zpar, q as u32);
                if r != p {
                    parent[r as usize] = p;
                    zpar[r as usize] = p;
                }
            }
        }
    }

    let root = sorted[0] as usize;
    for &p in &sorted {
        let q = parent[p as usize] as usize;
        if values[parent[q] as usize] == values[q] {
            parent[p as usize] = parent[q];
        }
    }

    let is_canonical = |p: usize| p == root || values[parent[p] as usize] != values[p];
    let mut node_of = vec![UNSET; n];
    let mut levels = Vec::new();
    for p in 0..n {
        if is_canonical(p) {
            node_of[p] = levels.len() as u32;
            levels.push(f64::from(values[p]));
        }
    }
    let mut node_parent = vec![0u32; levels.len()];
    let mut pixel_node = vec![0u32; n];
    for p in 0..n {
        if is_canonical(p) {
            node_parent[node_of[p] as usize] = node_of[parent[p] as usize];
            pixel_node[p] = node_of[p];
        } else {
            pixel_node[p] = node_of[parent[p] as usize];
        }
    }
    Tree::assemble(kind, width, height, &node_parent, &levels, &pixel_node)
}
