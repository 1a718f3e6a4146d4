//! Per-node attributes accumulated bottom-up over any tree.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagery::RasterImage;
use crate::tree::{NodeId, Tree};

/// Filtering criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attribute {
    Area,
    MomentOfInertia,
}

impl Attribute {
    /// Whether the attribute never decreases from child to parent.
    pub fn is_increasing(self) -> bool {
        matches!(self, Attribute::Area)
    }
}

/// Values reported in feature profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feature {
    StdDev,
    Area,
}

/// Raw accumulators for one node's full pixel set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeAttributes {
    pub area: u64,
    pub sum_x: u64,
    pub sum_y: u64,
    pub sum_xx: u128,
    pub sum_yy: u128,
    pub gray_sum: u64,
    pub gray_sum_sq: u128,
    pub gray_min: u16,
    pub gray_max: u16,
    /// `(xmin, ymin, xmax, ymax)`
    pub bbox: (u32, u32, u32, u32),
}

impl NodeAttributes {
    fn empty() -> Self {
        Self {
            area: 0,
            sum_x: 0,
            sum_y: 0,
            sum_xx: 0,
            sum_yy: 0,
            gray_sum: 0,
            gray_sum_sq: 0,
            gray_min: u16::MAX,
            gray_max: 0,
            bbox: (u32::MAX, u32::MAX, 0, 0),
        }
    }

    pub fn of_pixel(x: u32, y: u32, gray: u16) -> Self {
        let mut r = Self::empty();
        r.add_pixel(x, y, gray);
        r
    }

    pub fn add_pixel(&mut self, x: u32, y: u32, gray: u16) {
        let (xw, yw, g) = (u64::from(x), u64::from(y), u64::from(gray));
        self.area += 1;
        self.sum_x += xw;
        self.sum_y += yw;
        self.sum_xx += u128::from(xw * xw);
        self.sum_yy += u128::from(yw * yw);
        self.gray_sum += g;
        self.gray_sum_sq += u128::from(g * g);
        self.gray_min = self.gray_min.min(gray);
        self.gray_max = self.gray_max.max(gray);
        self.bbox.0 = self.bbox.0.min(x);
        self.bbox.1 = self.bbox.1.min(y);
        self.bbox.2 = self.bbox.2.max(x);
        self.bbox.3 = self.bbox.3.max(y);
    }

    pub fn merge(&mut self, o: &NodeAttributes) {
        self.area += o.area;
        self.sum_x += o.sum_x;
        self.sum_y += o.sum_y;
        self.sum_xx += o.sum_xx;
        self.sum_yy += o.sum_yy;
        self.gray_sum += o.gray_sum;
        self.gray_sum_sq += o.gray_sum_sq;
        self.gray_min = self.gray_min.min(o.gray_min);
        self.gray_max = self.gray_max.max(o.gray_max);
        self.bbox.0 = self.bbox.0.min(o.bbox.0);
        self.bbox.1 = self.bbox.1.min(o.bbox.1);
        self.bbox.2 = self.bbox.2.max(o.bbox.2);
        self.bbox.3 = self.bbox.3.max(o.bbox.3);
    }

    /// `(μ20 + μ02) / area²` with central spatial moments.
    pub fn moment_of_inertia(&self) -> f64 {
        let a = u128::from(self.area);
        let sx = u128::from(self.sum_x);
        let sy = u128::from(self.sum_y);
        // area * μ20 and area * μ02, exact
        let num = (a * self.sum_xx - sx * sx) + (a * self.sum_yy - sy * sy);
        let a = self.area as f64;
        num as f64 / (a * a * a)
    }

    pub fn mean(&self) -> f64 {
        self.gray_sum as f64 / self.area as f64
    }

    /// Population standard deviation of the gray values.
    pub fn std_dev(&self) -> f64 {
        let a = u128::from(self.area);
        let s = u128::from(self.gray_sum);
        let num = a * self.gray_sum_sq - s * s;
        (num as f64).max(0.0).sqrt() / self.area as f64
    }

    pub fn range(&self) -> f64 {
        f64::from(self.gray_max - self.gray_min)
    }

    pub fn attribute(&self, attribute: Attribute) -> f64 {
        match attribute {
            Attribute::Area => self.area as f64,
            Attribute::MomentOfInertia => self.moment_of_inertia(),
        }
    }

    pub fn feature(&self, feature: Feature) -> f64 {
        match feature {
            Feature::StdDev => self.std_dev(),
            Feature::Area => self.area as f64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AttributeTable {
    records: Vec<NodeAttributes>,
}

/// Single bottom-up pass: directly attached pixels, then children into parents.
pub fn compute_attributes(tree: &Tree, image: &RasterImage) -> Result<AttributeTable> {
    tree.same_domain(image.width(), image.height())?;
    let w = image.width();
    let mut records = vec![NodeAttributes::empty(); tree.node_count()];
    for (p, (&node, &gray)) in tree.pixel_nodes().iter().zip(image.values()).enumerate() {
        records[node as usize].add_pixel((p % w) as u32, (p / w) as u32, gray);
    }
    let parents = tree.parents();
    for i in (1..records.len()).rev() {
        let child = records[i];
        records[parents[i] as usize].merge(&child);
    }
    Ok(AttributeTable { records })
}

impl AttributeTable {
    #[cfg(test)]
    pub(crate) fn from_records(records: Vec<NodeAttributes>) -> Self {
        Self { records }
    }

    pub fn records(&self) -> &[NodeAttributes] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, node: NodeId) -> Result<&NodeAttributes> {
        self.records.get(node.index()).ok_or(Error::InvalidNode {
            node: node.index(),
            count: self.records.len(),
        })
    }

    pub fn area(&self, node: NodeId) -> Result<u64> {
        Ok(self.get(node)?.area)
    }

    pub fn moment_of_inertia(&self, node: NodeId) -> Result<f64> {
        Ok(self.get(node)?.moment_of_inertia())
    }

    pub fn std_dev(&self, node: NodeId) -> Result<f64> {
        Ok(self.get(node)?.std_dev())
    }

    /// Dump lines `id area inertia stddev`.
    pub fn dump(&self) -> String {
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                format!("{i} {} {} {}\n", r.area, r.moment_of_inertia(), r.std_dev())
            })
            .collect()
    }
}
