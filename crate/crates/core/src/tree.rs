//! Parent-array hierarchy shared by every tree kind.
//!
//! Nodes are stored in topological order: node 0 is the root and every other
//! node's parent has a smaller index. Bottom-up passes therefore iterate node
//! indices in reverse, top-down passes in order.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeKind {
    MaxTree,
    MinTree,
    TreeOfShapes,
    AlphaTree,
    OmegaTree,
}

impl TreeKind {
    pub fn is_partition(self) -> bool {
        matches!(self, TreeKind::AlphaTree | TreeKind::OmegaTree)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Connectivity {
    #[default]
    C4,
    C8,
}

const C4_OFFSETS: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const C8_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl Connectivity {
    pub fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::C4 => &C4_OFFSETS,
            Connectivity::C8 => &C8_OFFSETS,
        }
    }

    /// In-bounds neighbors of row-major pixel `p`.
    pub fn neighbors(
        self,
        p: usize,
        width: usize,
        height: usize,
    ) -> impl Iterator<Item = usize> {
        let x = (p % width) as isize;
        let y = (p / width) as isize;
        self.offsets().iter().filter_map(move |&(dx, dy)| {
            let nx = x + dx;
            let ny = y + dy;
            (nx >= 0 && ny >= 0 && (nx as usize) < width && (ny as usize) < height)
                .then(|| ny as usize * width + nx as usize)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Marks a node that was discarded during construction.
pub(crate) const DETACHED: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct Tree {
    kind: TreeKind,
    width: usize,
    height: usize,
    parent: Vec<u32>,
    level: Vec<f64>,
    pixel_node: Vec<u32>,
    pixel_start: Vec<u32>,
    pixel_list: Vec<u32>,
}

impl Tree {
    /// Renumbers an arbitrary parent array into root-first topological order.
    ///
    /// `parent[root] == root`; nodes with `parent == DETACHED` are dropped.
    /// Every surviving node must be reachable from the root.
    pub(crate) fn assemble(
        kind: TreeKind,
        width: usize,
        height: usize,
        parent: &[u32],
        level: &[f64],
        pixel_node: &[u32],
    ) -> Self {
        let n = parent.len();
        let root = (0..n)
            .find(|&i| parent[i] as usize == i)
            .expect("tree without root");

        let mut child_count = vec![0u32; n + 1];
        for (i, &p) in parent.iter().enumerate() {
            if p != DETACHED && p as usize != i {
                child_count[p as usize + 1] += 1;
            }
        }
        for i in 0..n {
            child_count[i + 1] += child_count[i];
        }
        let mut fill = child_count.clone();
        let mut children = vec![0u32; child_count[n] as usize];
        for (i, &p) in parent.iter().enumerate() {
            if p != DETACHED && p as usize != i {
                children[fill[p as usize] as usize] = i as u32;
                fill[p as usize] += 1;
            }
        }

        let mut new_id = vec![DETACHED; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root as u32]);
        while let Some(node) = queue.pop_front() {
            new_id[node as usize] = order.len() as u32;
            order.push(node);
            let (s, e) = (child_count[node as usize], child_count[node as usize + 1]);
            queue.extend(&children[s as usize..e as usize]);
        }

        let new_parent: Vec<u32> = order
            .iter()
            .map(|&old| new_id[parent[old as usize] as usize])
            .collect();
        let new_level: Vec<f64> = order.iter().map(|&old| level[old as usize]).collect();
        let new_pixel_node: Vec<u32> = pixel_node.iter().map(|&o| new_id[o as usize]).collect();
        debug_assert!(new_pixel_node.iter().all(|&v| v != DETACHED));

        Self::from_ordered(kind, width, height, new_parent, new_level, new_pixel_node)
    }

    fn from_ordered(
        kind: TreeKind,
        width: usize,
        height: usize,
        parent: Vec<u32>,
        level: Vec<f64>,
        pixel_node: Vec<u32>,
    ) -> Self {
        let n = parent.len();
        let mut pixel_start = vec![0u32; n + 1];
        for &node in &pixel_node {
            pixel_start[node as usize + 1] += 1;
        }
        for i in 0..n {
            pixel_start[i + 1] += pixel_start[i];
        }
        let mut fill = pixel_start.clone();
        let mut pixel_list = vec![0u32; pixel_node.len()];
        for (p, &node) in pixel_node.iter().enumerate() {
            pixel_list[fill[node as usize] as usize] = p as u32;
            fill[node as usize] += 1;
        }
        Self {
            kind,
            width,
            height,
            parent,
            level,
            pixel_node,
            pixel_start,
            pixel_list,
        }
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.pixel_node.len()
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn node(&self, index: usize) -> Result<NodeId> {
        if index < self.node_count() {
            Ok(NodeId(index as u32))
        } else {
            Err(Error::InvalidNode {
                node: index,
                count: self.node_count(),
            })
        }
    }

    pub fn parent(&self, node: NodeId) -> NodeId {
        NodeId(self.parent[node.index()])
    }

    pub fn level(&self, node: NodeId) -> f64 {
        self.level[node.index()]
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn levels(&self) -> &[f64] {
        &self.level
    }

    /// Smallest node of every pixel, row-major.
    pub fn pixel_nodes(&self) -> &[u32] {
        &self.pixel_node
    }

    /// Pixels whose smallest node is `node`.
    pub fn node_pixels(&self, node: NodeId) -> &[u32] {
        let i = node.index();
        &self.pixel_list[self.pixel_start[i] as usize..self.pixel_start[i + 1] as usize]
    }

    /// The canonical node of the smallest component containing `(x, y)`.
    pub fn smallest_node(&self, x: usize, y: usize) -> Result<NodeId> {
        if x >= self.width || y >= self.height {
            return Err(Error::OutOfBounds {
                x,
                y,
                width: self.width,
                height: self.height,
            });
        }
        Ok(NodeId(self.pixel_node[y * self.width + x]))
    }

    /// Ancestors of `node`, starting with `node` itself and ending at the root.
    pub fn ancestors(&self, node: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let mut next = Some(node);
        std::iter::from_fn(move || {
            let cur = next?;
            let p = self.parent(cur);
            next = (p != cur).then_some(p);
            Some(cur)
        })
    }

    pub fn is_ancestor(&self, ancestor: NodeId, node: NodeId) -> bool {
        ancestor <= node && self.ancestors(node).any(|a| a == ancestor)
    }

    /// Number of pixels in each node's full component.
    pub fn areas(&self) -> Vec<u64> {
        let mut area: Vec<u64> = (0..self.node_count())
            .map(|i| u64::from(self.pixel_start[i + 1] - self.pixel_start[i]))
            .collect();
        for i in (1..self.node_count()).rev() {
            area[self.parent[i] as usize] += area[i];
        }
        area
    }

    /// Full pixel set of `node`, sorted.
    pub fn component_pixels(&self, node: NodeId) -> Vec<usize> {
        let start = node.index();
        let mut inside = vec![false; self.node_count()];
        inside[start] = true;
        for i in start + 1..self.node_count() {
            inside[i] = inside[self.parent[i] as usize];
        }
        let mut pixels: Vec<usize> = (0..self.pixel_count())
            .filter(|&p| inside[self.pixel_node[p] as usize])
            .collect();
        pixels.sort_unstable();
        pixels
    }

    /// Child lists in CSR form: `(offsets, children)`.
    pub fn children(&self) -> (Vec<u32>, Vec<u32>) {
        let n = self.node_count();
        let mut start = vec![0u32; n + 1];
        for &p in &self.parent[1..] {
            start[p as usize + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut list = vec![0u32; n.saturating_sub(1)];
        for i in 1..n {
            let p = self.parent[i] as usize;
            list[fill[p] as usize] = i as u32;
            fill[p] += 1;
        }
        (start, list)
    }

    /// Structural checks: ordering, level monotonicity per kind, pixel coverage.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if n == 0 || self.parent[0] != 0 {
            return Err(Error::Internal("node 0 is not the root".into()));
        }
        let mut has_content = vec![false; n];
        for i in 1..n {
            let p = self.parent[i] as usize;
            if p >= i {
                return Err(Error::Internal(format!("node {i} has parent {p} after it")));
            }
            let (c, pl) = (self.level[i], self.level[p]);
            let ok = match self.kind {
                TreeKind::MaxTree => c > pl,
                TreeKind::MinTree
                | TreeKind::AlphaTree
                | TreeKind::OmegaTree => c < pl,
                // an upper shape can hold a single lower shape at its own
                // level, leaving the parent with no pixels of its own
                TreeKind::TreeOfShapes => true,
            };
            if !ok {
                return Err(Error::Internal(format!(
                    "{:?} node {i} level {c} against parent {p} level {pl}",
                    self.kind
                )));
            }
        }
        if self.pixel_node.len() != self.width * self.height {
            return Err(Error::Internal("pixel map size differs from image".into()));
        }
        for &node in &self.pixel_node {
            if node as usize >= n {
                return Err(Error::Internal(format!("pixel mapped to missing node {node}")));
            }
            has_content[node as usize] = true;
        }
        for i in (1..n).rev() {
            if has_content[i] {
                has_content[self.parent[i] as usize] = true;
            }
        }
        if let Some(empty) = has_content.iter().position(|&c| !c) {
            return Err(Error::Internal(format!("node {empty} covers no pixel")));
        }
        Ok(())
    }

    /// One line per node: `id parent level area`.
    pub fn dump(&self) -> String {
        let areas = self.areas();
        let mut out = String::new();
        for (i, area) in areas.iter().enumerate() {
            let _ = writeln!(out, "{i} {} {} {area}", self.parent[i], self.level[i]);
        }
        out
    }

    pub(crate) fn same_domain(&self, width: usize, height: usize) -> Result<()> {
        if (self.width, self.height) != (width, height) {
            return Err(Error::TreeMismatch(format!(
                "tree built on {}x{}, image is {width}x{height}",
                self.width, self.height
            )));
        }
        Ok(())
    }
}
