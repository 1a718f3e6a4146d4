//! Tree of shapes on the pixel grid.
//!
//! Shapes are the hole-filled connected components of upper and lower level
//! sets. The image is treated as surrounded by a frame whose value is the
//! median of the border pixels (midpoint of the two central values for an
//! even count), and the root is the shape containing that frame.
//!
//! Connectivity depends on which side of the frame value a level set lies:
//! upper sets above it and lower sets below it are 4-connected, upper and
//! lower sets reaching toward it are 8-connected. Holes always use the dual
//! connectivity. Giving both polarities 4-connected components would let an
//! upper and a lower shape overlap without nesting; tying the choice to the
//! frame keeps shapes nested and the whole construction symmetric under
//! level complementation.
//!
//! Construction starts from max-trees and min-trees in both connectivities:
//! each component that does not merge with the frame is saturated, and the
//! resulting shapes are painted onto an ownership map in order of decreasing
//! area. Because shapes are nested or disjoint, the owner a shape overwrites
//! is its parent, and a previous owner with the same area is the same shape.

use crate::component::{build_max_tree, build_min_tree};
use crate::imagery::RasterImage;
use crate::tree::{Connectivity, NodeId, Tree, TreeKind};

/// Frame value used for the tree of shapes.
pub fn border_median(image: &RasterImage) -> f64 {
    let (w, h) = image.dims();
    let mut border: Vec<u16> = (0..w * h)
        .filter(|&p| {
            let (x, y) = (p % w, p / w);
            x == 0 || y == 0 || x == w - 1 || y == h - 1
        })
        .map(|p| image.values()[p])
        .collect();
    border.sort_unstable();
    let n = border.len();
    if n % 2 == 1 {
        f64::from(border[n / 2])
    } else {
        (f64::from(border[n / 2 - 1]) + f64::from(border[n / 2])) / 2.0
    }
}

#[derive(Debug, Clone, Copy)]
struct BBox {
    x0: usize,
    y0: usize,
    x1: usize,
    y1: usize,
}

impl BBox {
    fn empty() -> Self {
        Self {
            x0: usize::MAX,
            y0: usize::MAX,
            x1: 0,
            y1: 0,
        }
    }

    fn add(&mut self, x: usize, y: usize) {
        self.x0 = self.x0.min(x);
        self.y0 = self.y0.min(y);
        self.x1 = self.x1.max(x);
        self.y1 = self.y1.max(y);
    }

    fn merge(&mut self, o: &BBox) {
        self.x0 = self.x0.min(o.x0);
        self.y0 = self.y0.min(o.y0);
        self.x1 = self.x1.max(o.x1);
        self.y1 = self.y1.max(o.y1);
    }
}

/// Per-tree data needed to enumerate and saturate components.
struct Source {
    tree: Tree,
    /// Holes are 8-connected (the components are 4-connected).
    eight_holes: bool,
    child_start: Vec<u32>,
    children: Vec<u32>,
    bbox: Vec<BBox>,
    touches_border: Vec<bool>,
}

impl Source {
    fn new(tree: Tree, connectivity: Connectivity) -> Self {
        let (w, h) = (tree.width(), tree.height());
        let n = tree.node_count();
        let mut bbox = vec![BBox::empty(); n];
        let mut touches_border = vec![false; n];
        for (p, &node) in tree.pixel_nodes().iter().enumerate() {
            let (x, y) = (p % w, p / w);
            bbox[node as usize].add(x, y);
            if x == 0 || y == 0 || x == w - 1 || y == h - 1 {
                touches_border[node as usize] = true;
            }
        }
        for i in (1..n).rev() {
            let p = tree.parents()[i] as usize;
            let b = bbox[i];
            bbox[p].merge(&b);
            touches_border[p] |= touches_border[i];
        }
        let (child_start, children) = tree.children();
        Self {
            tree,
            eight_holes: connectivity == Connectivity::C4,
            child_start,
            children,
            bbox,
            touches_border,
        }
    }
}

struct Saturator {
    width: usize,
    stamp: u32,
    inside: Vec<u32>,
    seen: Vec<u32>,
    nodes: Vec<u32>,
    flood: Vec<usize>,
    region: Vec<usize>,
}

impl Saturator {
    fn new(width: usize, pixels: usize) -> Self {
        Self {
            width,
            stamp: 0,
            inside: vec![0; pixels],
            seen: vec![0; pixels],
            nodes: Vec::new(),
            flood: Vec::new(),
            region: Vec::new(),
        }
    }

    /// Pixels of the component at `node`, plus its holes, appended to `out`.
    fn saturate(&mut self, src: &Source, node: usize, out: &mut Vec<usize>) {
        out.clear();
        self.stamp += 1;
        let stamp = self.stamp;

        self.nodes.clear();
        self.nodes.push(node as u32);
        while let Some(n) = self.nodes.pop() {
            for &p in src.tree.node_pixels(NodeId(n)) {
                self.inside[p as usize] = stamp;
                out.push(p as usize);
            }
            let (s, e) = (src.child_start[n as usize], src.child_start[n as usize + 1]);
            self.nodes.extend_from_slice(&src.children[s as usize..e as usize]);
        }

        let b = src.bbox[node];
        let w = self.width;
        for y in b.y0..=b.y1 {
            for x in b.x0..=b.x1 {
                let start = y * w + x;
                if self.inside[start] == stamp || self.seen[start] == stamp {
                    continue;
                }
                // flood of the complement, clipped to the box; touching the
                // box edge means reaching the exterior
                let mut exterior = false;
                self.region.clear();
                self.flood.clear();
                self.flood.push(start);
                self.seen[start] = stamp;
                while let Some(p) = self.flood.pop() {
                    self.region.push(p);
                    let (px, py) = (p % w, p / w);
                    if px == b.x0 || px == b.x1 || py == b.y0 || py == b.y1 {
                        exterior = true;
                    }
                    for ny in py.saturating_sub(1).max(b.y0)..=(py + 1).min(b.y1) {
                        for nx in px.saturating_sub(1).max(b.x0)..=(px + 1).min(b.x1) {
                            if !src.eight_holes && nx != px && ny != py {
                                continue;
                            }
                            let q = ny * w + nx;
                            if self.inside[q] != stamp && self.seen[q] != stamp {
                                self.seen[q] = stamp;
                                self.flood.push(q);
                            }
                        }
                    }
                }
                if !exterior {
                    out.extend_from_slice(&self.region);
                }
            }
        }
    }
}

struct Candidate {
    source: usize,
    node: usize,
    area: usize,
    level: f64,
}

pub fn build_tree_of_shapes(image: &RasterImage) -> Tree {
    let (width, height) = image.dims();
    let n = width * height;
    let frame = border_median(image);

    // (tree, upper polarity); 4-connected trees first
    let sources = [
        (Source::new(build_max_tree(image, Connectivity::C4), Connectivity::C4), true),
        (Source::new(build_min_tree(image, Connectivity::C4), Connectivity::C4), false),
        (Source::new(build_max_tree(image, Connectivity::C8), Connectivity::C8), true),
        (Source::new(build_min_tree(image, Connectivity::C8), Connectivity::C8), false),
    ];
    let mut saturator = Saturator::new(width, n);
    let mut pixels = Vec::new();

    let mut candidates = Vec::new();
    for (s, (src, upper)) in sources.iter().enumerate() {
        let four = src.eight_holes;
        for node in 1..src.tree.node_count() {
            let level = src.tree.levels()[node];
            let parent_level = src.tree.levels()[src.tree.parents()[node] as usize];
            // a node stands for the thresholds between its parent's level
            // and its own; 4-connected trees supply those beyond the frame,
            // 8-connected trees the rest, where touching the border means
            // merging with the frame
            let standalone = match (four, *upper) {
                (true, true) => level > frame,
                (true, false) => level < frame,
                (false, true) => parent_level < frame && !src.touches_border[node],
                (false, false) => parent_level > frame && !src.touches_border[node],
            };
            if standalone {
                saturator.saturate(src, node, &mut pixels);
                candidates.push(Candidate {
                    source: s,
                    node,
                    area: pixels.len(),
                    level,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.area
            .cmp(&a.area)
            .then(a.source.cmp(&b.source))
            .then(a.node.cmp(&b.node))
    });

    let mut owner = vec![0u32; n];
    let mut shape_area = vec![n];
    let mut shape_parent = vec![0u32];
    let mut shape_level = vec![frame];
    for c in &candidates {
        saturator.saturate(&sources[c.source].0, c.node, &mut pixels);
        let previous = owner[pixels[0]];
        if shape_area[previous as usize] == c.area {
            continue;
        }
        debug_assert!(pixels.iter().all(|&p| owner[p] == previous));
        let id = shape_area.len() as u32;
        shape_area.push(c.area);
        shape_parent.push(previous);
        shape_level.push(c.level);
        for &p in &pixels {
            owner[p] = id;
        }
    }

    // a shape's level is the gray value of the pixels it owns directly
    let mut assigned = vec![false; shape_area.len()];
    for (p, &s) in owner.iter().enumerate() {
        if !assigned[s as usize] {
            assigned[s as usize] = true;
            shape_level[s as usize] = f64::from(image.values()[p]);
        }
    }
    Tree::assemble(
        TreeKind::TreeOfShapes,
        width,
        height,
        &shape_parent,
        &shape_level,
        &owner,
    )
}
