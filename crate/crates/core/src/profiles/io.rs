use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ColumnDescriptor, ProfileStack};
use crate::error::{Error, Result};

/// JSON sidecar of a stored profile stack. The `.raw` file next to it holds
/// little-endian `f32` values, pixel-major, columns in `layout` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackHeader {
    pub width: usize,
    pub height: usize,
    pub dim: usize,
    pub dtype: String,
    pub layout: Vec<ColumnDescriptor>,
}

pub fn write_profile_stack(path: impl AsRef<Path>, stack: &ProfileStack) -> Result<()> {
    let json_path = path.as_ref().with_extension("json");
    let raw_path = path.as_ref().with_extension("raw");
    let header = StackHeader {
        width: stack.width(),
        height: stack.height(),
        dim: stack.dim(),
        dtype: "f32".into(),
        layout: stack.layout().to_vec(),
    };
    let json = serde_json::to_string_pretty(&header).map_err(|e| Error::Header(e.to_string()))?;
    fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
    let mut blob = Vec::with_capacity(stack.data().len() * 4);
    for &v in stack.data() {
        blob.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(&raw_path, blob).map_err(|e| Error::io(&raw_path, e))
}

pub fn read_profile_stack(path: impl AsRef<Path>) -> Result<ProfileStack> {
    let json_path = path.as_ref().with_extension("json");
    let raw_path = path.as_ref().with_extension("raw");
    let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let header: StackHeader =
        serde_json::from_str(&text).map_err(|e| Error::Header(e.to_string()))?;
    if header.dtype != "f32" {
        return Err(Error::Header(format!("unsupported dtype {:?}", header.dtype)));
    }
    if header.dim != header.layout.len() {
        return Err(Error::Header(format!(
            "dim {} disagrees with {} layout entries",
            header.dim,
            header.layout.len()
        )));
    }
    let blob = fs::read(&raw_path).map_err(|e| Error::io(&raw_path, e))?;
    let expected = header.width * header.height * header.dim * 4;
    if blob.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: blob.len(),
        });
    }
    let data = blob
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect();
    ProfileStack::new(header.width, header.height, data, header.layout)
}
