use super::{MultibandImage, RasterImage, MAX_LEVELS};
use crate::error::{Error, Result};

const JACOBI_TOLERANCE: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// `matrix` is `n x n` row-major. Returns eigenvalues sorted descending and
/// the matching unit eigenvectors as columns of a row-major `n x n` matrix.
/// Each eigenvector's sign is fixed so that its largest-magnitude coordinate
/// is positive.
pub fn symmetric_eigen(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if matrix.len() != n * n {
        return Err(Error::LengthMismatch {
            left: matrix.len(),
            right: n * n,
        });
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= JACOBI_TOLERANCE * frobenius {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > JACOBI_TOLERANCE * frobenius {
        return Err(Error::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (col, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        for k in 0..n {
            if v[k * n + src].abs() > v[pivot * n + src].abs() {
                pivot = k;
            }
        }
        let sign = if v[pivot * n + src] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            vectors[k * n + col] = sign * v[k * n + src];
        }
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

/// Principal components together with the decomposition that produced them.
#[derive(Debug, Clone)]
pub struct PcaResult {
    pub components: MultibandImage,
    /// Eigenvalues of the (population) band covariance, descending.
    pub eigenvalues: Vec<f64>,
    /// Row-major `bands x bands`, eigenvectors as columns.
    pub eigenvectors: Vec<f64>,
    pub means: Vec<f64>,
}

/// Projects mean-centered spectra onto the leading covariance eigenvectors.
/// Bands are centered but not standardized.
pub fn pca_reduce(image: &MultibandImage, n_components: usize) -> Result<PcaResult> {
    let bands = image.bands();
    let pixels = image.pixel_count();
    if n_components == 0 || n_components > bands {
        return Err(Error::InvalidArgument(format!(
            "requested {n_components} components from {bands} bands"
        )));
    }
    if pixels < n_components {
        return Err(Error::InvalidArgument(format!(
            "{pixels} pixels cannot support {n_components} components"
        )));
    }

    let means: Vec<f64> = (0..bands)
        .map(|b| image.band(b).iter().sum::<f64>() / pixels as f64)
        .collect();
    let centered: Vec<Vec<f64>> = (0..bands)
        .map(|b| image.band(b).iter().map(|x| x - means[b]).collect())
        .collect();

    let mut cov = vec![0.0; bands * bands];
    for i in 0..bands {
        for j in i..bands {
            let c = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / pixels as f64;
            cov[i * bands + j] = c;
            cov[j * bands + i] = c;
        }
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen(&cov, bands)?;

    let mut values = vec![0.0; pixels * n_components];
    for c in 0..n_components {
        let out = &mut values[c * pixels..(c + 1) * pixels];
        for (b, band) in centered.iter().enumerate() {
            let w = eigenvectors[b * bands + c];
            for (o, x) in out.iter_mut().zip(band) {
                *o += w * x;
            }
        }
    }
    Ok(PcaResult {
        components: MultibandImage::new(image.width(), image.height(), n_components, values)?,
        eigenvalues,
        eigenvectors,
        means,
    })
}

/// Affine min-max quantization of one band to `[0, levels - 1]`, rounding
/// half up. A constant band maps to zeros.
pub fn rescale_to_levels(
    band: &[f64],
    width: usize,
    height: usize,
    levels: u32,
) -> Result<RasterImage> {
    if !(2..=MAX_LEVELS).contains(&levels) {
        return Err(Error::InvalidArgument(format!(
            "quantization needs 2..={MAX_LEVELS} levels, got {levels}"
        )));
    }
    let (lo, hi) = band
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let top = f64::from(levels - 1);
    let values = if hi > lo {
        band.iter()
            .map(|&v| ((v - lo) / (hi - lo) * top + 0.5).floor().clamp(0.0, top) as u16)
            .collect()
    } else {
        vec![0; band.len()]
    };
    RasterImage::new(width, height, levels, values)
}
