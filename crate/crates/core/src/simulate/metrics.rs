//! Full-reference quality metrics over 8-bit planes.
//!
//! PSNR uses the exact integer sum of squared errors. SSIM follows the
//! standard structural-similarity definition with its canonical settings:
//! an 11×11 Gaussian window with σ = 1.5, K1 = 0.01, K2 = 0.03 and a
//! dynamic range of 255, averaged over every fully-contained window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::image::ImagePlane;

pub const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
const DYNAMIC_RANGE: f64 = 255.0;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("dimension mismatch: {aw}x{ah} vs {bw}x{bh}")]
    DimensionMismatch {
        aw: usize,
        ah: usize,
        bw: usize,
        bh: usize,
    },
    #[error("image {width}x{height} is smaller than the {window}x{window} SSIM window")]
    ImageTooSmall {
        width: usize,
        height: usize,
        window: usize,
    },
}

/// PSNR and SSIM of one reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub psnr: f64,
    pub ssim: f64,
}

fn check_dimensions(a: &ImagePlane, b: &ImagePlane) -> Result<(), MetricError> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(MetricError::DimensionMismatch {
            aw: a.width(),
            ah: a.height(),
            bw: b.width(),
            bh: b.height(),
        });
    }
    Ok(())
}

/// Peak signal-to-noise ratio in dB against a 255 peak; infinite for
/// identical planes.
pub fn psnr(a: &ImagePlane, b: &ImagePlane) -> Result<f64, MetricError> {
    check_dimensions(a, b)?;
    let sse: u64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(&x, &y)| {
            let d = i64::from(x) - i64::from(y);
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / (a.width() * a.height()) as f64;
    Ok(10.0 * (DYNAMIC_RANGE * DYNAMIC_RANGE / mse).log10())
}

/// Mean structural similarity over all fully-contained windows.
pub fn ssim(a: &ImagePlane, b: &ImagePlane) -> Result<f64, MetricError> {
    check_dimensions(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricError::ImageTooSmall {
            width: w,
            height: h,
            window: SSIM_WINDOW,
        });
    }

    let x: Vec<f64> = a.samples().iter().map(|&v| f64::from(v)).collect();
    let y: Vec<f64> = b.samples().iter().map(|&v| f64::from(v)).collect();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u * v).collect();

    let kernel = gaussian_kernel();
    let mu_x = filter_valid(&x, w, h, &kernel);
    let mu_y = filter_valid(&y, w, h, &kernel);
    let e_xx = filter_valid(&xx, w, h, &kernel);
    let e_yy = filter_valid(&yy, w, h, &kernel);
    let e_xy = filter_valid(&xy, w, h, &kernel);

    let c1 = (K1 * DYNAMIC_RANGE).powi(2);
    let c2 = (K2 * DYNAMIC_RANGE).powi(2);
    let mut sum = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = e_xx[i] - mx * mx;
        let var_y = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2))
            / ((mx * mx + my * my + c1) * (var_x + var_y + c2));
    }
    Ok(sum / mu_x.len() as f64)
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut kernel = [0.0f64; SSIM_WINDOW];
    let center = (SSIM_WINDOW / 2) as f64;
    let mut total = 0.0;
    for (t, k) in kernel.iter_mut().enumerate() {
        let d = t as f64 - center;
        *k = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        total += *k;
    }
    for k in &mut kernel {
        *k /= total;
    }
    kernel
}

// Separable Gaussian filter keeping only fully-covered positions; the
// result is (w - window + 1) x (h - window + 1).
fn filter_valid(data: &[f64], w: usize, h: usize, kernel: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let ow = w - SSIM_WINDOW + 1;
    let oh = h - SSIM_WINDOW + 1;
    // horizontal pass: h rows of ow columns
    let mut hpass = vec![0.0f64; h * ow];
    for row in 0..h {
        for col in 0..ow {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * data[row * w + col + t];
            }
            hpass[row * ow + col] = acc;
        }
    }
    // vertical pass: oh rows of ow columns
    let mut out = vec![0.0f64; oh * ow];
    for row in 0..oh {
        for col in 0..ow {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                acc += k * hpass[(row + t) * ow + col];
            }
            out[row * ow + col] = acc;
        }
    }
    out
}
