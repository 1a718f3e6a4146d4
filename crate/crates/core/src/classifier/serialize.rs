//! Binary model format, all integers and floats little-endian:
//!
//! ```text
//! magic      b"TPRF"
//! version    u32 (= 1)
//! seed       u64
//! dim        u32
//! n_classes  u32, then n_classes x u16 class labels
//! n_trees    u32
//! per tree:  n_nodes u32, then per node
//!            0u8, n_classes x f64 probabilities          (leaf)
//!            1u8, feature u32, threshold f64, left u32, right u32   (split)
//! ```

use super::forest::{DecisionTree, ForestModel, TreeNode};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"TPRF";
const VERSION: u32 = 1;

pub fn encode_model(model: &ForestModel) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&model.seed.to_le_bytes());
    out.extend_from_slice(&(model.dim as u32).to_le_bytes());
    out.extend_from_slice(&(model.classes.len() as u32).to_le_bytes());
    for c in &model.classes {
        out.extend_from_slice(&c.to_le_bytes());
    }
    out.extend_from_slice(&(model.trees.len() as u32).to_le_bytes());
    for tree in &model.trees {
        out.extend_from_slice(&(tree.nodes.len() as u32).to_le_bytes());
        for node in &tree.nodes {
            match node {
                TreeNode::Leaf { probabilities } => {
                    out.push(0);
                    for p in probabilities {
                        out.extend_from_slice(&p.to_le_bytes());
                    }
                }
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    out.push(1);
                    out.extend_from_slice(&feature.to_le_bytes());
                    out.extend_from_slice(&threshold.to_le_bytes());
                    out.extend_from_slice(&left.to_le_bytes());
                    out.extend_from_slice(&right.to_le_bytes());
                }
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let slice = self
            .bytes
            .get(self.pos..self.pos + N)
            .ok_or_else(|| Error::ModelFormat(format!("truncated at byte {}", self.pos)))?;
        self.pos += N;
        Ok(slice.try_into().unwrap())
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<ForestModel> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<4>()? != MAGIC {
        return Err(Error::ModelFormat("bad magic".into()));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::ModelFormat(format!("unsupported version {version}")));
    }
    let seed = r.u64()?;
    let dim = r.u32()? as usize;
    let n_classes = r.u32()? as usize;
    let classes = (0..n_classes).map(|_| r.u16()).collect::<Result<Vec<_>>>()?;
    let n_trees = r.u32()? as usize;
    let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
    for _ in 0..n_trees {
        let n_nodes = r.u32()? as usize;
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
        for _ in 0..n_nodes {
            let node = match r.u8()? {
                0 => TreeNode::Leaf {
                    probabilities: (0..n_classes).map(|_| r.f64()).collect::<Result<_>>()?,
                },
                1 => {
                    let feature = r.u32()?;
                    let threshold = r.f64()?;
                    let left = r.u32()?;
                    let right = r.u32()?;
                    if feature as usize >= dim
                        || left as usize >= n_nodes
                        || right as usize >= n_nodes
                    {
                        return Err(Error::ModelFormat("split references out of range".into()));
                    }
                    TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    }
                }
                tag => return Err(Error::ModelFormat(format!("unknown node tag {tag}"))),
            };
            nodes.push(node);
        }
        trees.push(DecisionTree { nodes });
    }
    if r.pos != bytes.len() {
        return Err(Error::ModelFormat("trailing bytes".into()));
    }
    Ok(ForestModel {
        classes,
        dim,
        seed,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{train_forest, ForestParams};

    #[test]
    fn round_trip() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let model = train_forest(&x, 2, &[1, 2, 1], ForestParams { n_trees: 4, seed: 1 }).unwrap();
        let bytes = encode_model(&model);
        assert_eq!(&bytes[..4], b"TPRF");
        assert_eq!(decode_model(&bytes).unwrap(), model);
        assert!(decode_model(&bytes[..bytes.len() - 1]).is_err());
    }
}
