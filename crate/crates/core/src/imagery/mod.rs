//! Raster containers, file formats and spectral preprocessing.

mod multiband;
mod pca;
mod pgm;

pub use multiband::{load_multiband, write_multiband, MultibandHeader, SampleType};
pub use pca::{pca_reduce, rescale_to_levels, symmetric_eigen, PcaResult};
pub use pgm::{decode_pgm, encode_pgm, load_grayscale, write_pgm, PgmEncoding};

use std::path::Path;

use crate::error::{Error, Result};

/// Largest supported number of gray levels.
pub const MAX_LEVELS: u32 = 65536;

/// Single-band integer image, row-major, values in `[0, levels - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    levels: u32,
    values: Vec<u16>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, levels: u32, values: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: width * height,
            });
        }
        if !(1..=MAX_LEVELS).contains(&levels) {
            return Err(Error::InvalidArgument(format!(
                "level count {levels} outside 1..={MAX_LEVELS}"
            )));
        }
        if let Some(v) = values.iter().find(|&&v| u32::from(v) >= levels) {
            return Err(Error::InvalidArgument(format!(
                "value {v} exceeds the declared range [0, {}]",
                levels - 1
            )));
        }
        Ok(Self {
            width,
            height,
            levels,
            values,
        })
    }

    /// Builds an image whose level range is the smallest one covering `values`.
    pub fn from_values(width: usize, height: usize, values: Vec<u16>) -> Result<Self> {
        let levels = values.iter().copied().max().map_or(1, |m| u32::from(m) + 1);
        Self::new(width, height, levels, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn values(&self) -> &[u16] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.values[y * self.width + x]
    }

    /// `L - 1 - X`.
    pub fn complement(&self) -> Self {
        let top = (self.levels - 1) as u16;
        Self {
            width: self.width,
            height: self.height,
            levels: self.levels,
            values: self.values.iter().map(|&v| top - v).collect(),
        }
    }

    pub fn to_real(&self) -> RealImage {
        RealImage {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

/// Real-valued single-band image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

/// Band-sequential real-valued image.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibandImage {
    width: usize,
    height: usize,
    bands: usize,
    values: Vec<f64>,
}

impl MultibandImage {
    pub fn new(width: usize, height: usize, bands: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || bands == 0 {
            return Err(Error::InvalidArgument(format!(
                "multiband dimensions must be positive, got {width}x{height}x{bands}"
            )));
        }
        if values.len() != width * height * bands {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: width * height * bands,
            });
        }
        Ok(Self {
            width,
            height,
            bands,
            values,
        })
    }

    pub fn from_raster(image: &RasterImage) -> Self {
        Self {
            width: image.width,
            height: image.height,
            bands: 1,
            values: image.values.iter().map(|&v| f64::from(v)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn band(&self, index: usize) -> &[f64] {
        let n = self.pixel_count();
        &self.values[index * n..(index + 1) * n]
    }
}

/// Per-pixel class ids: 0 is unlabeled, `1..=C` are classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u16>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, labels: Vec<u16>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: width * height,
            });
        }
        Ok(Self {
            width,
            height,
            labels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u16] {
        &self.labels
    }

    /// Row-major indices of labeled pixels.
    pub fn labeled_pixels(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l != 0)
            .map(|(i, _)| i)
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l != 0).count()
    }

    /// Sorted `(class, count)` pairs over labeled pixels.
    pub fn class_counts(&self) -> Vec<(u16, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &l in self.labels.iter().filter(|&&l| l != 0) {
            *counts.entry(l).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }
}

/// Reads a PGM label map and checks it against the paired image size.
pub fn load_labels(path: impl AsRef<Path>, expected_dims: (usize, usize)) -> Result<LabelMap> {
    let image = load_grayscale(path)?;
    if image.dims() != expected_dims {
        return Err(Error::DimensionMismatch {
            expected: expected_dims,
            found: image.dims(),
        });
    }
    LabelMap::new(image.width, image.height, image.values)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &LabelMap) -> Result<()> {
    let max = labels.labels.iter().copied().max().unwrap_or(0).max(1);
    let image = RasterImage::new(
        labels.width,
        labels.height,
        u32::from(max) + 1,
        labels.labels.clone(),
    )?;
    write_pgm(path, &image, PgmEncoding::Binary)
}
