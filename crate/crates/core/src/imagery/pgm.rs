use std::fs;
use std::path::Path;

use super::RasterImage;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// P2
    Ascii,
    /// P5
    Binary,
}

pub fn load_grayscale(path: impl AsRef<Path>) -> Result<RasterImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_pgm(&bytes)
}

pub fn write_pgm(path: impl AsRef<Path>, image: &RasterImage, encoding: PgmEncoding) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(image, encoding)).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Pgm {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn unsigned(&mut self, what: &str) -> Result<u64> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or_else(|| self.error(format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(match self.bytes.get(self.pos) {
                None => self.error(format!("unexpected end of file, expected {what}")),
                Some(_) => self.error(format!("expected {what}")),
            });
        }
        Ok(value)
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<RasterImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let encoding = match bytes.get(..2) {
        Some(b"P2") => PgmEncoding::Ascii,
        Some(b"P5") => PgmEncoding::Binary,
        _ => return Err(cur.error("missing P2/P5 magic number")),
    };
    cur.pos = 2;
    let width = cur.unsigned("width")? as usize;
    let height = cur.unsigned("height")? as usize;
    let maxval_offset = cur.pos;
    let maxval = cur.unsigned("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.error(format!("zero image dimension {width}x{height}")));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Pgm {
            offset: maxval_offset,
            message: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| cur.error("image dimensions overflow"))?;
    let mut values = Vec::with_capacity(count);

    match encoding {
        PgmEncoding::Ascii => {
            for i in 0..count {
                let v = cur.unsigned(&format!("pixel {i}"))?;
                if v > maxval {
                    return Err(cur.error(format!("pixel {i} value {v} exceeds maxval {maxval}")));
                }
                values.push(v as u16);
            }
        }
        PgmEncoding::Binary => {
            // exactly one whitespace byte separates the header from the raster
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(cur.error("expected a single whitespace after maxval")),
            }
            let sample = if maxval < 256 { 1 } else { 2 };
            let data = &bytes[cur.pos..];
            if data.len() < count * sample {
                let available = data.len() / sample;
                return Err(Error::Pgm {
                    offset: cur.pos + available * sample,
                    message: format!(
                        "truncated raster at pixel {available}: header declares {count} pixels"
                    ),
                });
            }
            for (i, chunk) in data.chunks_exact(sample).take(count).enumerate() {
                let v = if sample == 1 {
                    u64::from(chunk[0])
                } else {
                    u64::from(u16::from_be_bytes([chunk[0], chunk[1]]))
                };
                if v > maxval {
                    return Err(Error::Pgm {
                        offset: cur.pos + i * sample,
                        message: format!("pixel {i} value {v} exceeds maxval {maxval}"),
                    });
                }
                values.push(v as u16);
            }
        }
    }
    RasterImage::new(width, height, maxval as u32 + 1, values)
}

pub fn encode_pgm(image: &RasterImage, encoding: PgmEncoding) -> Vec<u8> {
    let maxval = image.levels().saturating_sub(1).max(1);
    let mut out = Vec::new();
    match encoding {
        PgmEncoding::Ascii => {
            out.extend_from_slice(
                format!("P2\n{} {}\n{}\n", image.width(), image.height(), maxval).as_bytes(),
            );
            for row in image.values().chunks(image.width()) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Binary => {
            out.extend_from_slice(
                format!("P5\n{} {}\n{}\n", image.width(), image.height(), maxval).as_bytes(),
            );
            if maxval < 256 {
                out.extend(image.values().iter().map(|&v| v as u8));
            } else {
                for &v in image.values() {
                    out.extend_from_slice(&v.to_be_bytes());
                }
            }
        }
    }
    out
}
