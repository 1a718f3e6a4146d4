use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::MultibandImage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleType {
    U8,
    U16,
    F32,
}

impl SampleType {
    pub fn size(self) -> usize {
        match self {
            SampleType::U8 => 1,
            SampleType::U16 => 2,
            SampleType::F32 => 4,
        }
    }
}

/// JSON sidecar describing a `.raw` band-sequential blob.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultibandHeader {
    pub width: usize,
    pub height: usize,
    pub bands: usize,
    pub dtype: String,
    pub interleave: String,
}

impl MultibandHeader {
    fn sample_type(&self) -> Result<SampleType> {
        match self.dtype.as_str() {
            "u8" => Ok(SampleType::U8),
            "u16" => Ok(SampleType::U16),
            "f32" => Ok(SampleType::F32),
            other => Err(Error::Header(format!("unsupported dtype {other:?}"))),
        }
    }
}

fn raw_path(header_path: &Path) -> PathBuf {
    header_path.with_extension("raw")
}

/// Loads `<name>.json` plus the `<name>.raw` blob next to it.
pub fn load_multiband(header_path: impl AsRef<Path>) -> Result<MultibandImage> {
    let header_path = header_path.as_ref();
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header: MultibandHeader =
        serde_json::from_str(&text).map_err(|e| Error::Header(e.to_string()))?;
    let dtype = header.sample_type()?;
    if !header.interleave.eq_ignore_ascii_case("bsq") {
        return Err(Error::Header(format!(
            "unsupported interleave {:?}",
            header.interleave
        )));
    }
    let blob_path = raw_path(header_path);
    let blob = fs::read(&blob_path).map_err(|e| Error::io(&blob_path, e))?;
    decode_bsq(&header, dtype, &blob)
}

fn decode_bsq(header: &MultibandHeader, dtype: SampleType, blob: &[u8]) -> Result<MultibandImage> {
    let count = header.width * header.height * header.bands;
    let expected = count * dtype.size();
    if blob.len() != expected {
        return Err(Error::SizeMismatch {
            expected,
            found: blob.len(),
        });
    }
    let values: Vec<f64> = match dtype {
        SampleType::U8 => blob.iter().map(|&b| f64::from(b)).collect(),
        SampleType::U16 => blob
            .chunks_exact(2)
            .map(|c| f64::from(u16::from_le_bytes([c[0], c[1]])))
            .collect(),
        SampleType::F32 => blob
            .chunks_exact(4)
            .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
            .collect(),
    };
    MultibandImage::new(header.width, header.height, header.bands, values)
}

/// Writes `<stem>.json` and `<stem>.raw`. Values are cast to `dtype` without
/// range checks, so callers writing integer types must pass integral data.
pub fn write_multiband(
    header_path: impl AsRef<Path>,
    image: &MultibandImage,
    dtype: SampleType,
) -> Result<()> {
    let header_path = header_path.as_ref().with_extension("json");
    let header = MultibandHeader {
        width: image.width(),
        height: image.height(),
        bands: image.bands(),
        dtype: serde_json::to_value(dtype)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default(),
        interleave: "bsq".into(),
    };
    let mut blob = Vec::with_capacity(image.values().len() * dtype.size());
    for &v in image.values() {
        match dtype {
            SampleType::U8 => blob.push(v as u8),
            SampleType::U16 => blob.extend_from_slice(&(v as u16).to_le_bytes()),
            SampleType::F32 => blob.extend_from_slice(&(v as f32).to_le_bytes()),
        }
    }
    let json = serde_json::to_string_pretty(&header).map_err(|e| Error::Header(e.to_string()))?;
    fs::write(&header_path, json).map_err(|e| Error::io(&header_path, e))?;
    let blob_path = raw_path(&header_path);
    fs::write(&blob_path, blob).map_err(|e| Error::io(&blob_path, e))
}
