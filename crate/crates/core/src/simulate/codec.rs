//! The intra-only block pipeline: pad, transform, quantize, dequantize,
//! inverse transform, clamp. Blocks are independent and processed in
//! row-major order; all arithmetic is deterministic and the rate proxy is
//! accumulated in integer arithmetic, so identical inputs always produce
//! bit-identical outputs.

use serde::{Deserialize, Serialize};

use super::dct::Dct2d;
use super::image::ImagePlane;
use super::metrics::psnr;
use super::quant::{dequantize, quantize, QuantConfig};

/// One point on a rate-distortion curve: proxy bits and quality in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub rate: f64,
    pub quality: f64,
}

/// Codes a plane through the transform/quantization pipeline and returns
/// the reconstruction and its rate-distortion point.
///
/// Rate is an entropy proxy: `ceil(log2(1 + |level|)) + 1` bits per
/// nonzero level. Quality is the PSNR of the reconstruction against the
/// input (infinite for a lossless round trip).
pub fn code_image(img: &ImagePlane, config: &QuantConfig) -> (ImagePlane, RdPoint) {
    let n = config.block_size();
    let dct = Dct2d::new(n).expect("config holds a supported size");
    let (w, h) = (img.width(), img.height());
    let blocks_x = w.div_ceil(n);
    let blocks_y = h.div_ceil(n);

    // Replicate-pad to a block multiple.
    let (pw, ph) = (blocks_x * n, blocks_y * n);
    let mut padded = vec![0.0f64; pw * ph];
    for y in 0..ph {
        for x in 0..pw {
            padded[y * pw + x] = f64::from(img.get(x.min(w - 1), y.min(h - 1)));
        }
    }

    let mut rate_bits: u64 = 0;
    let mut block = vec![0.0f64; n * n];
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            // gather
            for row in 0..n {
                let src = (by * n + row) * pw + bx * n;
                block[row * n..(row + 1) * n].copy_from_slice(&padded[src..src + n]);
            }
            let levels = quantize(&dct.forward(&block), config);
            for &level in &levels {
                if level != 0 {
                    rate_bits += ceil_log2(1 + level.unsigned_abs() as u64) + 1;
                }
            }
            let restored = dct.inverse(&dequantize(&levels, config));
            // scatter
            for row in 0..n {
                let dst = (by * n + row) * pw + bx * n;
                padded[dst..dst + n].copy_from_slice(&restored[row * n..(row + 1) * n]);
            }
        }
    }

    let reconstructed = ImagePlane::from_fn(w, h, img.component(), |x, y| {
        padded[y * pw + x].round().clamp(0.0, 255.0) as u8
    });
    let quality = psnr(img, &reconstructed).expect("dimensions match by construction");
    (
        reconstructed,
        RdPoint {
            rate: rate_bits as f64,
            quality,
        },
    )
}

fn ceil_log2(x: u64) -> u64 {
    debug_assert!(x >= 2);
    64 - u64::from((x - 1).leading_zeros())
}
