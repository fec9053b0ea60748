//! Desk-scale codec harness and evaluation metrics.
//!
//! An intra-only pipeline: blocks are transformed with an orthonormal 2D
//! DCT, quantized with QM-weighted step sizes, dequantized and inverse
//! transformed. Reconstruction quality is measured with PSNR and SSIM,
//! and rate-distortion curves are compared with Bjontegaard delta rate.
//!
//! The harness trades codec realism for tractability: no prediction, no
//! entropy coder (a magnitude-entropy proxy stands in for rate), and a
//! floating-point transform instead of the integer core transform. That
//! is enough to measure how matrix choices move quality and rate.

pub mod bdrate;
pub mod codec;
pub mod dct;
pub mod image;
pub mod metrics;
pub mod quant;

pub use bdrate::bd_rate;
pub use codec::{code_image, RdPoint};
pub use dct::{forward_dct, inverse_dct, Dct2d};
pub use image::{Component, ImagePlane, YuvFrame};
pub use metrics::{psnr, ssim, QualityReport};
pub use quant::{dequantize, qstep, quantize, QuantConfig};
