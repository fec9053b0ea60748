//! Orthonormal 2D DCT-II over square blocks of size 4, 8, 16 or 32.
//!
//! The transform is separable: `Y = C X Cᵀ` with basis rows
//! `C[k][x] = α(k) cos(π (2x+1) k / 2n)`, `α(0) = √(1/n)`,
//! `α(k>0) = √(2/n)`. Orthonormality makes the inverse the transpose
//! product, and a constant block of value v transforms to a single DC
//! coefficient `n·v`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::qm::SUPPORTED_SIZES;

#[derive(Debug, Error, PartialEq)]
pub enum DctError {
    #[error("unsupported block size {0}; expected one of 4, 8, 16, 32")]
    UnsupportedSize(usize),
}

/// Precomputed basis for one block size; reuse it across blocks.
#[derive(Debug, Clone)]
pub struct Dct2d {
    size: usize,
    // basis[k * size + x] = α(k) cos(π (2x+1) k / 2n)
    basis: Vec<f64>,
}

impl Dct2d {
    pub fn new(size: usize) -> Result<Self, DctError> {
        if !SUPPORTED_SIZES.contains(&size) {
            return Err(DctError::UnsupportedSize(size));
        }
        let n = size as f64;
        let mut basis = vec![0.0f64; size * size];
        for k in 0..size {
            let alpha = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for x in 0..size {
                basis[k * size + x] =
                    alpha * (PI * (2.0 * x as f64 + 1.0) * k as f64 / (2.0 * n)).cos();
            }
        }
        Ok(Self { size, basis })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Forward transform of a row-major block; returns row-major
    /// coefficients with DC at index 0.
    pub fn forward(&self, block: &[f64]) -> Vec<f64> {
        self.apply(block, false)
    }

    /// Inverse transform of row-major coefficients back to samples.
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        self.apply(coeffs, true)
    }

    fn apply(&self, input: &[f64], inverse: bool) -> Vec<f64> {
        let n = self.size;
        assert_eq!(input.len(), n * n, "block length must be {}", n * n);
        // rows pass
        let mut tmp = vec![0.0f64; n * n];
        for r in 0..n {
            for k in 0..n {
                let mut acc = 0.0;
                for x in 0..n {
                    let c = if inverse {
                        self.basis[x * n + k]
                    } else {
                        self.basis[k * n + x]
                    };
                    acc += c * input[r * n + x];
                }
                tmp[r * n + k] = acc;
            }
        }
        // columns pass
        let mut out = vec![0.0f64; n * n];
        for k in 0..n {
            for c_idx in 0..n {
                let mut acc = 0.0;
                for x in 0..n {
                    let c = if inverse {
                        self.basis[x * n + k]
                    } else {
                        self.basis[k * n + x]
                    };
                    acc += c * tmp[x * n + c_idx];
                }
                out[k * n + c_idx] = acc;
            }
        }
        out
    }
}

/// One-shot forward transform; prefer [`Dct2d`] when processing many
/// blocks of the same size.
pub fn forward_dct(block: &[f64], size: usize) -> Result<Vec<f64>, DctError> {
    Ok(Dct2d::new(size)?.forward(block))
}

/// One-shot inverse transform.
pub fn inverse_dct(coeffs: &[f64], size: usize) -> Result<Vec<f64>, DctError> {
    Ok(Dct2d::new(size)?.inverse(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_block(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n * n).map(|_| rng.random_range(-255.0..255.0)).collect()
    }

    // Direct double-sum evaluation of the DCT-II definition, independent
    // of the separable implementation.
    fn oracle_forward(block: &[f64], n: usize) -> Vec<f64> {
        let nf = n as f64;
        let alpha = |k: usize| {
            if k == 0 {
                (1.0 / nf).sqrt()
            } else {
                (2.0 / nf).sqrt()
            }
        };
        let mut out = vec![0.0f64; n * n];
        for u in 0..n {
            for v in 0..n {
                let mut acc = 0.0;
                for x in 0..n {
                    for y in 0..n {
                        acc += block[x * n + y]
                            * (PI * (2.0 * x as f64 + 1.0) * u as f64 / (2.0 * nf)).cos()
                            * (PI * (2.0 * y as f64 + 1.0) * v as f64 / (2.0 * nf)).cos();
                    }
                }
                out[u * n + v] = alpha(u) * alpha(v) * acc;
            }
        }
        out
    }

    #[test]
    fn constant_block_concentrates_in_dc() {
        for &n in &SUPPORTED_SIZES {
            let dct = Dct2d::new(n).unwrap();
            let coeffs = dct.forward(&vec![7.0; n * n]);
            assert!((coeffs[0] - 7.0 * n as f64).abs() < 1e-9, "n={n}");
            for (idx, &c) in coeffs.iter().enumerate().skip(1) {
                assert!(c.abs() < 1e-10, "n={n} idx={idx} c={c}");
            }
        }
    }

    #[test]
    fn round_trip_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &n in &SUPPORTED_SIZES {
            let dct = Dct2d::new(n).unwrap();
            for _ in 0..10 {
                let block = random_block(&mut rng, n);
                let back = dct.inverse(&dct.forward(&block));
                for (a, b) in block.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-9, "n={n}");
                }
            }
        }
    }

    #[test]
    fn matches_definition_and_preserves_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &n in &[4usize, 8] {
            let block = random_block(&mut rng, n);
            let fast = forward_dct(&block, n).unwrap();
            let slow = oracle_forward(&block, n);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9);
            }
            let in_energy: f64 = block.iter().map(|v| v * v).sum();
            let out_energy: f64 = fast.iter().map(|v| v * v).sum();
            assert!((in_energy - out_energy).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_unsupported_sizes() {
        assert_eq!(Dct2d::new(7).unwrap_err(), DctError::UnsupportedSize(7));
        assert_eq!(forward_dct(&[0.0; 9], 3).unwrap_err(), DctError::UnsupportedSize(3));
    }
}
