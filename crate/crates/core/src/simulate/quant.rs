//! QM-weighted scalar quantization of transform coefficients.
//!
//! Each coefficient position gets step `Qstep(qp) · qm(i,j) / 16`, where
//! `Qstep(qp) = 2^((qp-4)/6)` doubles every six QP steps and is exactly
//! 1.0 at qp 4. A flat matrix of 16 therefore reduces quantization to
//! plain rounding at qp 4.

use thiserror::Error;

use crate::qm::{QuantizationMatrix, QM_SCALE};

/// Largest supported quantization parameter.
pub const MAX_QP: u8 = 51;

#[derive(Debug, Error, PartialEq)]
pub enum QuantError {
    #[error("qp must be in [0, {MAX_QP}], got {0}")]
    QpOutOfRange(u8),
}

/// Base quantization step for a QP: `2^((qp-4)/6)`.
pub fn qstep(qp: u8) -> f64 {
    2.0f64.powf((f64::from(qp) - 4.0) / 6.0)
}

/// A validated (qp, matrix) pair; the block size is the matrix size.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantConfig {
    qp: u8,
    qm: QuantizationMatrix,
}

impl QuantConfig {
    pub fn new(qp: u8, qm: QuantizationMatrix) -> Result<Self, QuantError> {
        if qp > MAX_QP {
            return Err(QuantError::QpOutOfRange(qp));
        }
        Ok(Self { qp, qm })
    }

    pub fn qp(&self) -> u8 {
        self.qp
    }

    pub fn qm(&self) -> &QuantizationMatrix {
        &self.qm
    }

    pub fn block_size(&self) -> usize {
        self.qm.size()
    }

    /// Effective step at coefficient position (i, j).
    pub fn step(&self, i: usize, j: usize) -> f64 {
        qstep(self.qp) * f64::from(self.qm.get(i, j)) / f64::from(QM_SCALE)
    }
}

/// Quantizes row-major coefficients to integer levels, rounding half away
/// from zero.
pub fn quantize(coeffs: &[f64], config: &QuantConfig) -> Vec<i32> {
    let n = config.block_size();
    assert_eq!(coeffs.len(), n * n, "coefficient count must be {}", n * n);
    coeffs
        .iter()
        .enumerate()
        .map(|(idx, &c)| (c / config.step(idx / n, idx % n)).round() as i32)
        .collect()
}

/// Reconstructs coefficients from levels: `level · step`.
pub fn dequantize(levels: &[i32], config: &QuantConfig) -> Vec<f64> {
    let n = config.block_size();
    assert_eq!(levels.len(), n * n, "level count must be {}", n * n);
    levels
        .iter()
        .enumerate()
        .map(|(idx, &l)| f64::from(l) * config.step(idx / n, idx % n))
        .collect()
}
