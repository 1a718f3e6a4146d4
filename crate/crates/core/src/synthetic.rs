//! Generated three-class scene whose classes differ in region size and local
//! variance rather than in gray level.
//!
//! * class 1: small bright squares (3-4 px wide)
//! * class 2: large blobs with a smooth gray ramp
//! * class 3: background of independent uniform noise

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::Result;
use crate::imagery::{LabelMap, RasterImage};

pub const SQUARE_CLASS: u16 = 1;
pub const BLOB_CLASS: u16 = 2;
pub const BACKGROUND_CLASS: u16 = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneParams {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    /// Fraction of all pixels drawn as training samples; the rest are test.
    pub train_fraction: f64,
    pub blobs: usize,
    pub squares: usize,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 128,
            height: 128,
            seed: 42,
            train_fraction: 0.1,
            blobs: 7,
            squares: 90,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub image: RasterImage,
    pub truth: LabelMap,
    pub train: LabelMap,
    pub test: LabelMap,
}

pub fn synthetic_scene(params: &SceneParams) -> Result<Scene> {
    let (w, h) = (params.width, params.height);
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(params.seed);
    let mut values: Vec<u16> = (0..w * h).map(|_| rng.gen_range(0..256u32) as u16).collect();
    let mut truth = vec![BACKGROUND_CLASS; w * h];

    let short = w.min(h) as f64;
    for _ in 0..params.blobs {
        let radius = short * rng.gen_range(0.09..0.15);
        let cx = rng.gen_range(0.0..w as f64);
        let cy = rng.gen_range(0.0..h as f64);
        let base = rng.gen_range(50.0..206.0);
        // no transcendental functions: their last bit varies across libms
        let gx = rng.gen_range(-1.5..1.5);
        let gy = rng.gen_range(-1.5..1.5);
        for y in 0..h {
            for x in 0..w {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                if dx * dx + dy * dy <= radius * radius {
                    let v = base + gx * dx + gy * dy + rng.gen_range(-1.0..1.0);
                    values[y * w + x] = v.round().clamp(0.0, 255.0) as u16;
                    truth[y * w + x] = BLOB_CLASS;
                }
            }
        }
    }

    let mut placed = 0;
    let mut attempts = 0;
    while placed < params.squares && attempts < params.squares * 50 {
        attempts += 1;
        let size = rng.gen_range(3..5u32) as usize;
        if w < size + 2 || h < size + 2 {
            break;
        }
        let x0 = rng.gen_range(1..(w - size - 1) as u32) as usize;
        let y0 = rng.gen_range(1..(h - size - 1) as u32) as usize;
        // keep a one-pixel background margin around each square
        let clear = (y0 - 1..y0 + size + 1)
            .all(|y| (x0 - 1..x0 + size + 1).all(|x| truth[y * w + x] == BACKGROUND_CLASS));
        if !clear {
            continue;
        }
        let v = rng.gen_range(170..256u32) as u16;
        for y in y0..y0 + size {
            for x in x0..x0 + size {
                values[y * w + x] = v;
                truth[y * w + x] = SQUARE_CLASS;
            }
        }
        placed += 1;
    }

    let mut order: Vec<usize> = (0..w * h).collect();
    order.shuffle(&mut rng);
    let n_train = ((w * h) as f64 * params.train_fraction).round() as usize;
    let mut train = vec![0u16; w * h];
    let mut test = truth.clone();
    for &p in &order[..n_train] {
        train[p] = truth[p];
        test[p] = 0;
    }

    Ok(Scene {
        image: RasterImage::new(w, h, 256, values)?,
        truth: LabelMap::new(w, h, truth)?,
        train: LabelMap::new(w, h, train)?,
        test: LabelMap::new(w, h, test)?,
    })
}
