//! Display-adaptive quantization matrix toolkit.
//!
//! The crate generates the human-visual-system weighting matrices behind
//! block-transform quantization matrices, adapts them to a target display
//! resolution, and evaluates the result in a small intra-only DCT codec
//! harness.
//!
//! The pipeline runs in three stages:
//!
//! 1. [`csf`] builds a frequency weighting matrix from a contrast
//!    sensitivity model of the viewer and display.
//! 2. [`adapt`] reshapes that matrix for a specific display resolution by
//!    exponentiating each weight with a distance-dependent exponent.
//! 3. [`qm`] rounds weighting matrices into integer quantization matrices,
//!    derives inter matrices through an affine model, replicates 8×8
//!    matrices up to 16×16/32×32, and serializes scaling-list documents.
//!
//! [`simulate`] provides the measurement side: a block DCT codec with
//! QM-weighted quantization, PSNR/SSIM metrics, and Bjontegaard delta-rate
//! computation over rate-distortion curves.

pub mod adapt;
pub mod csf;
pub mod qm;
pub mod simulate;

pub use adapt::{adapt_fwm, normalized_distance, DisplayGeometry, ExponentField};
pub use csf::{build_fwm, CsfParams, FrequencyWeightingMatrix, FwmKind};
pub use qm::{
    derive_inter, derive_qm, replicate, InterModelParams, MatrixKind, Provenance,
    QuantizationMatrix, QM_SCALE,
};
