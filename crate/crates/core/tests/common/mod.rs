//! Brute-force reference implementations, deliberately naive: every answer is
//! recomputed from pixel sets by flood fill.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use treeprofiles::{Connectivity, NodeId, RasterImage, Tree};

pub type PixelSet = Vec<usize>;

pub fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, max_side: usize, max_levels: u32) -> RasterImage {
    let w = rng.gen_range(1..=max_side as u32) as usize;
    let h = rng.gen_range(1..=max_side as u32) as usize;
    let levels = rng.gen_range(1..=max_levels);
    let values = (0..w * h).map(|_| rng.gen_range(0..levels) as u16).collect();
    RasterImage::new(w, h, levels, values).unwrap()
}

pub fn image_strategy(max_side: usize, max_levels: u32) -> impl Strategy<Value = RasterImage> {
    (1..=max_side, 1..=max_side, 1..=max_levels).prop_flat_map(|(w, h, levels)| {
        proptest::collection::vec(0..levels as u16, w * h)
            .prop_map(move |v| RasterImage::new(w, h, levels, v).unwrap())
    })
}

pub fn connectivity_strategy() -> impl Strategy<Value = Connectivity> {
    prop_oneof![Just(Connectivity::C4), Just(Connectivity::C8)]
}

fn neighbors(p: usize, w: usize, h: usize, eight: bool) -> Vec<usize> {
    let (x, y) = ((p % w) as i64, (p / w) as i64);
    let mut out = Vec::new();
    for dy in -1..=1i64 {
        for dx in -1..=1i64 {
            if (dx, dy) == (0, 0) || (!eight && dx != 0 && dy != 0) {
                continue;
            }
            let (nx, ny) = (x + dx, y + dy);
            if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                out.push(ny as usize * w + nx as usize);
            }
        }
    }
    out
}

/// Connected components of `mask`, each sorted.
pub fn components(mask: &[bool], w: usize, h: usize, eight: bool) -> Vec<PixelSet> {
    let mut seen = vec![false; mask.len()];
    let mut out = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut comp = Vec::new();
        while let Some(p) = queue.pop_front() {
            comp.push(p);
            for q in neighbors(p, w, h, eight) {
                if mask[q] && !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn distinct_levels(image: &RasterImage) -> Vec<u16> {
    let set: BTreeSet<u16> = image.values().iter().copied().collect();
    set.into_iter().collect()
}

/// All connected components of all upper (`upper = true`) or lower level sets.
pub fn level_set_components(image: &RasterImage, conn: Connectivity, upper: bool) -> BTreeSet<PixelSet> {
    let (w, h) = image.dims();
    let eight = conn == Connectivity::C8;
    let mut out = BTreeSet::new();
    for l in distinct_levels(image) {
        let mask: Vec<bool> = image
            .values()
            .iter()
            .map(|&v| if upper { v >= l } else { v <= l })
            .collect();
        out.extend(components(&mask, w, h, eight));
    }
    out
}

pub fn tree_node_sets(tree: &Tree) -> Vec<PixelSet> {
    (0..tree.node_count())
        .map(|i| tree.component_pixels(tree.node(i).unwrap()))
        .collect()
}

/// Area opening (`upper`) or closing by thresholding: each pixel takes the
/// most extreme level at which its level-set component has area >= `t`. The
/// extreme level of the image always survives (the root is never removed).
pub fn area_filter(image: &RasterImage, conn: Connectivity, t: f64, upper: bool) -> Vec<f64> {
    let (w, h) = image.dims();
    let eight = conn == Connectivity::C8;
    let mut levels = distinct_levels(image);
    if !upper {
        levels.reverse();
    }
    let mut out = vec![f64::from(levels[0]); w * h];
    for &l in &levels[1..] {
        let mask: Vec<bool> = image
            .values()
            .iter()
            .map(|&v| if upper { v >= l } else { v <= l })
            .collect();
        for comp in components(&mask, w, h, eight) {
            if comp.len() as f64 >= t {
                for p in comp {
                    out[p] = f64::from(l);
                }
            }
        }
    }
    out
}

/// Median of the border values, as a half-integer when the count is even.
pub fn frame_value(image: &RasterImage) -> f64 {
    let (w, h) = image.dims();
    let mut b: Vec<f64> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if x == 0 || y == 0 || x + 1 == w || y + 1 == h {
                b.push(f64::from(image.get(x, y)));
            }
        }
    }
    b.sort_by(f64::total_cmp);
    let n = b.len();
    if n % 2 == 1 {
        b[n / 2]
    } else {
        (b[n / 2 - 1] + b[n / 2]) / 2.0
    }
}

/// Shapes by definition: pad the image with a one-pixel frame holding the
/// border median, take every connected component of every upper and lower
/// level set, fill the holes of the complement (dual connectivity) that do
/// not reach the padded border, and restrict to the original domain.
/// Components that contain the frame become the whole domain.
///
/// Level sets on the far side of the frame value (upper sets above it, lower
/// sets below it) are 4-connected; those reaching toward it are 8-connected.
pub fn shape_oracle(image: &RasterImage) -> BTreeSet<PixelSet> {
    let (w, h) = image.dims();
    let (pw, ph) = (w + 2, h + 2);
    // doubled values keep the half-integer frame integral
    let frame = (2.0 * frame_value(image)) as i64;
    let mut padded = vec![frame; pw * ph];
    for y in 0..h {
        for x in 0..w {
            padded[(y + 1) * pw + x + 1] = 2 * i64::from(image.get(x, y));
        }
    }
    let thresholds: BTreeSet<i64> = padded.iter().copied().collect();
    let inner = |p: usize| {
        let (x, y) = (p % pw, p / pw);
        (x >= 1 && y >= 1 && x <= w && y <= h).then(|| (y - 1) * w + x - 1)
    };
    let touches_border = |set: &[usize]| {
        set.iter()
            .any(|&p| p % pw == 0 || p / pw == 0 || p % pw == pw - 1 || p / pw == ph - 1)
    };

    let all: PixelSet = (0..w * h).collect();
    let mut shapes = BTreeSet::new();
    for &l in &thresholds {
        for upper in [true, false] {
            let mask: Vec<bool> = padded
                .iter()
                .map(|&v| if upper { v >= l } else { v <= l })
                .collect();
            let eight = if upper { l <= frame } else { l >= frame };
            for comp in components(&mask, pw, ph, eight) {
                if comp.contains(&0) {
                    shapes.insert(all.clone());
                    continue;
                }
                let mut filled = vec![false; pw * ph];
                for &p in &comp {
                    filled[p] = true;
                }
                let outside: Vec<bool> = filled.iter().map(|&f| !f).collect();
                for hole in components(&outside, pw, ph, !eight) {
                    if !touches_border(&hole) {
                        for p in hole {
                            filled[p] = true;
                        }
                    }
                }
                let mut set: PixelSet = (0..pw * ph).filter(|&p| filled[p]).filter_map(inner).collect();
                set.sort_unstable();
                shapes.insert(set);
            }
        }
    }
    shapes
}

/// 4- or 8-adjacent pixel pairs with their absolute gray difference.
pub fn gray_edges(image: &RasterImage, conn: Connectivity) -> Vec<(usize, usize, f64)> {
    let (w, h) = image.dims();
    let eight = conn == Connectivity::C8;
    let mut out = Vec::new();
    for p in 0..w * h {
        for q in neighbors(p, w, h, eight) {
            if q > p {
                let d = (f64::from(image.values()[p]) - f64::from(image.values()[q])).abs();
                out.push((p, q, d));
            }
        }
    }
    out
}

/// Partition of the pixels linked by edges of weight <= `alpha`, as sorted blocks.
pub fn alpha_cut_oracle(image: &RasterImage, conn: Connectivity, alpha: f64) -> BTreeSet<PixelSet> {
    let n = image.len();
    let mut adjacency = vec![Vec::new(); n];
    for (p, q, d) in gray_edges(image, conn) {
        if d <= alpha {
            adjacency[p].push(q);
            adjacency[q].push(p);
        }
    }
    let mut seen = vec![false; n];
    let mut blocks = BTreeSet::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut block = Vec::new();
        while let Some(p) = stack.pop() {
            block.push(p);
            for &q in &adjacency[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        block.sort_unstable();
        blocks.insert(block);
    }
    blocks
}

/// Partition given by the tree at `alpha`: each pixel goes to its highest
/// ancestor whose level is <= `alpha`.
pub fn tree_cut(tree: &Tree, alpha: f64) -> BTreeSet<PixelSet> {
    let mut blocks: std::collections::BTreeMap<usize, PixelSet> = Default::default();
    for p in 0..tree.pixel_count() {
        let mut node = tree.pixel_nodes()[p] as usize;
        while node != 0 {
            let parent = tree.parents()[node] as usize;
            if tree.levels()[parent] > alpha {
                break;
            }
            node = parent;
        }
        blocks.entry(node).or_default().push(p);
    }
    blocks.into_values().collect()
}

/// Attribute values recomputed from a node's pixel list.
#[derive(Debug, Clone, PartialEq)]
pub struct Recomputed {
    pub area: u64,
    pub inertia: f64,
    pub mean: f64,
    pub std_dev: f64,
    pub min: u16,
    pub max: u16,
}

pub fn recompute(tree: &Tree, image: &RasterImage, node: NodeId) -> Recomputed {
    let pixels = tree.component_pixels(node);
    let w = image.width();
    let n = pixels.len() as f64;
    let cx = pixels.iter().map(|&p| (p % w) as f64).sum::<f64>() / n;
    let cy = pixels.iter().map(|&p| (p / w) as f64).sum::<f64>() / n;
    let second: f64 = pixels
        .iter()
        .map(|&p| ((p % w) as f64 - cx).powi(2) + ((p / w) as f64 - cy).powi(2))
        .sum();
    let grays: Vec<f64> = pixels.iter().map(|&p| f64::from(image.values()[p])).collect();
    let mean = grays.iter().sum::<f64>() / n;
    let var = grays.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / n;
    Recomputed {
        area: pixels.len() as u64,
        inertia: second / (n * n),
        mean,
        std_dev: var.sqrt(),
        min: pixels.iter().map(|&p| image.values()[p]).min().unwrap(),
        max: pixels.iter().map(|&p| image.values()[p]).max().unwrap(),
    }
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
