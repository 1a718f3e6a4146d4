//! Alpha-tree (quasi-flat zones) and omega-tree (global-range constrained
//! connectivity).

use crate::attributes::compute_attributes;
use crate::error::{Error, Result};
use crate::imagery::{MultibandImage, RasterImage};
use crate::tree::{Connectivity, Tree, TreeKind, DETACHED};

/// Weighted adjacency graph of the pixel grid.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub width: usize,
    pub height: usize,
    /// `(pixel_a, pixel_b, dissimilarity)`, one per unordered adjacent pair.
    pub edges: Vec<(u32, u32, f64)>,
}

impl EdgeList {
    fn build(
        width: usize,
        height: usize,
        connectivity: Connectivity,
        weight: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let mut edges = Vec::new();
        for p in 0..width * height {
            for q in connectivity.neighbors(p, width, height) {
                if q > p {
                    edges.push((p as u32, q as u32, weight(p, q)));
                }
            }
        }
        Self {
            width,
            height,
            edges,
        }
    }

    /// Absolute gray difference.
    pub fn from_image(image: &RasterImage, connectivity: Connectivity) -> Self {
        let v = image.values();
        Self::build(image.width(), image.height(), connectivity, |p, q| {
            f64::from(v[p].abs_diff(v[q]))
        })
    }

    /// Euclidean distance between pixel spectra.
    pub fn from_multiband(image: &MultibandImage, connectivity: Connectivity) -> Self {
        Self::build(image.width(), image.height(), connectivity, |p, q| {
            (0..image.bands())
                .map(|b| {
                    let band = image.band(b);
                    (band[p] - band[q]).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
    }
}

fn find(uf: &mut [u32], mut p: u32) -> u32 {
    while uf[p as usize] != p {
        let grand = uf[uf[p as usize] as usize];
        uf[p as usize] = grand;
        p = grand;
    }
    p
}

pub fn build_alpha_tree(image: &RasterImage, connectivity: Connectivity) -> Tree {
    build_alpha_tree_from_edges(&EdgeList::from_image(image, connectivity))
}

/// Kruskal-style construction: zero-weight edges form the flat-zone leaves,
/// then edges are merged in ascending weight, merges at an equal level
/// collapsing into a single node.
pub fn build_alpha_tree_from_edges(graph: &EdgeList) -> Tree {
    let n = graph.width * graph.height;
    let mut edges = graph.edges.clone();
    edges.sort_by(|a, b| a.2.total_cmp(&b.2));

    let mut uf: Vec<u32> = (0..n as u32).collect();
    let split = edges.partition_point(|e| e.2 <= 0.0);
    for &(a, b, _) in &edges[..split] {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra != rb {
            uf[rb as usize] = ra;
        }
    }

    // one level-0 leaf per flat zone, owned by the zone's union-find root
    let mut node_of = vec![DETACHED; n];
    let mut parent: Vec<u32> = Vec::new();
    let mut level: Vec<f64> = Vec::new();
    let mut pixel_node = vec![0u32; n];
    for p in 0..n as u32 {
        let r = find(&mut uf, p);
        if node_of[r as usize] == DETACHED {
            node_of[r as usize] = parent.len() as u32;
            parent.push(parent.len() as u32);
            level.push(0.0);
        }
        pixel_node[p as usize] = node_of[r as usize];
    }

    for &(a, b, w) in &edges[split..] {
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            continue;
        }
        let (na, nb) = (node_of[ra as usize], node_of[rb as usize]);
        uf[rb as usize] = ra;
        let merged = match (level[na as usize] == w, level[nb as usize] == w) {
            (true, true) => {
                // nb is absorbed; its children are redirected below
                parent[nb as usize] = na;
                na
            }
            (true, false) => {
                parent[nb as usize] = na;
                na
            }
            (false, true) => {
                parent[na as usize] = nb;
                nb
            }
            (false, false) => {
                let c = parent.len() as u32;
                parent.push(c);
                level.push(w);
                parent[na as usize] = c;
                parent[nb as usize] = c;
                c
            }
        };
        node_of[ra as usize] = merged;
    }

    // drop nodes whose parent sits at the same level
    let count = parent.len();
    let mut target = vec![DETACHED; count];
    let mut chain = Vec::new();
    for i in 0..count {
        let mut cur = i;
        while target[cur] == DETACHED {
            let p = parent[cur] as usize;
            if p == cur || level[p] != level[cur] {
                target[cur] = cur as u32;
                break;
            }
            chain.push(cur);
            cur = p;
        }
        let t = target[cur];
        for c in chain.drain(..) {
            target[c] = t;
        }
    }
    let mut final_parent = vec![DETACHED; count];
    for i in 0..count {
        if target[i] as usize != i {
            continue;
        }
        let p = parent[i] as usize;
        final_parent[i] = if p == i { i as u32 } else { target[p] };
    }
    for node in pixel_node.iter_mut() {
        *node = target[*node as usize];
    }
    Tree::assemble(
        TreeKind::AlphaTree,
        graph.width,
        graph.height,
        &final_parent,
        &level,
        &pixel_node,
    )
}

/// Restricts an alpha-tree to the components that are largest under some
/// bound on their global gray range. Node levels become those ranges.
pub fn build_omega_tree(alpha_tree: &Tree, image: &RasterImage) -> Result<Tree> {
    if alpha_tree.kind() != TreeKind::AlphaTree {
        return Err(Error::TreeMismatch(format!(
            "omega-tree needs an alpha-tree, got {:?}",
            alpha_tree.kind()
        )));
    }
    let table = compute_attributes(alpha_tree, image)?;
    let n = alpha_tree.node_count();
    let range: Vec<f64> = (0..n).map(|i| table.records()[i].range()).collect();
    let parents = alpha_tree.parents();

    let mut keep = vec![false; n];
    let mut nearest_kept = vec![0u32; n];
    keep[0] = true;
    for i in 1..n {
        let p = parents[i] as usize;
        keep[i] = range[p] > range[i];
        nearest_kept[i] = if keep[i] { i as u32 } else { nearest_kept[p] };
    }
    let new_parent: Vec<u32> = (0..n)
        .map(|i| match (i, keep[i]) {
            (0, _) => 0,
            (_, true) => nearest_kept[parents[i] as usize],
            _ => DETACHED,
        })
        .collect();
    let pixel_node: Vec<u32> = alpha_tree
        .pixel_nodes()
        .iter()
        .map(|&v| nearest_kept[v as usize])
        .collect();
    Ok(Tree::assemble(
        TreeKind::OmegaTree,
        alpha_tree.width(),
        alpha_tree.height(),
        &new_parent,
        &range,
        &pixel_node,
    ))
}
