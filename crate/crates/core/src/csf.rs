//! Contrast-sensitivity frequency weighting.
//!
//! Builds an N×N matrix of perceptual importance weights for block-transform
//! coefficients. Discrete display frequencies are converted to cycles per
//! degree of visual angle at the viewing distance, corrected for the angular
//! fall-off of sensitivity at oblique orientations, and passed through a
//! lowpass modulation transfer function. The DC weight is always 1.0 and
//! weights decay toward the high-frequency corner.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapt::DisplayGeometry;

#[derive(Debug, Error, PartialEq)]
pub enum CsfError {
    #[error("dot pitch must be positive, got {0}")]
    InvalidDotPitch(f64),
    #[error("viewing distance must be positive, got {0}")]
    InvalidViewingDistance(f64),
    #[error("symmetry must be in (0, 1], got {0}")]
    InvalidSymmetry(f64),
    #[error("lowpass cutoff must be positive, got {0}")]
    InvalidCutoff(f64),
    #[error("matrix size must be at least 2, got {0}")]
    InvalidSize(usize),
}

/// Parameters of the contrast-sensitivity model.
///
/// The defaults reproduce the weighting matrix behind the stock HEVC 8×8
/// intra quantization matrix: a 0.25mm dot pitch viewed from 512mm, with
/// the classic MTF regression constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsfParams {
    /// MTF gain.
    pub a: f64,
    /// MTF offset.
    pub b: f64,
    /// MTF frequency scale.
    pub c: f64,
    /// MTF exponent.
    pub d: f64,
    /// Millimeters per pixel on the reference display.
    pub dot_pitch: f64,
    /// Viewing distance in millimeters.
    pub viewing_distance: f64,
    /// Angular symmetry parameter; 1.0 disables the oblique correction.
    pub symmetry: f64,
    /// Lowpass cutoff in cycles per degree.
    pub f_max: f64,
    /// Matrix dimension.
    pub n: usize,
}

impl Default for CsfParams {
    fn default() -> Self {
        Self {
            a: 2.2,
            b: 0.192,
            c: 0.114,
            d: 1.1,
            dot_pitch: 0.25,
            viewing_distance: 512.0,
            symmetry: 0.7,
            f_max: 8.0,
            n: 8,
        }
    }
}

impl CsfParams {
    /// Checks the parameter invariants. Comparisons are written so that
    /// NaN fails every check.
    pub fn validate(&self) -> Result<(), CsfError> {
        if !(self.dot_pitch > 0.0) {
            return Err(CsfError::InvalidDotPitch(self.dot_pitch));
        }
        if !(self.viewing_distance > 0.0) {
            return Err(CsfError::InvalidViewingDistance(self.viewing_distance));
        }
        if !(self.symmetry > 0.0 && self.symmetry <= 1.0) {
            return Err(CsfError::InvalidSymmetry(self.symmetry));
        }
        if !(self.f_max > 0.0) {
            return Err(CsfError::InvalidCutoff(self.f_max));
        }
        if self.n < 2 {
            return Err(CsfError::InvalidSize(self.n));
        }
        Ok(())
    }
}

/// Whether a weighting matrix is the base CSF matrix or has been adapted
/// to a display geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FwmKind {
    Base,
    Adapted(DisplayGeometry),
}

/// N×N grid of perceptual weights in (0, 1], DC at (0, 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyWeightingMatrix {
    size: usize,
    kind: FwmKind,
    values: Vec<Vec<f64>>,
}

impl FrequencyWeightingMatrix {
    pub(crate) fn new(size: usize, kind: FwmKind, values: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(values.len(), size);
        Self { size, kind, values }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> FwmKind {
        self.kind
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }
}

/// Discrete horizontal (and, identically, vertical) frequencies in cycles
/// per millimeter: `f(u) = (u-1) / (dot_pitch * 2N)` for `u = 1..=N`.
/// The first entry is the DC position at zero frequency.
pub fn discrete_frequencies(params: &CsfParams) -> Vec<f64> {
    let denom = params.dot_pitch * 2.0 * params.n as f64;
    (1..=params.n).map(|u| (u - 1) as f64 / denom).collect()
}

/// Converts a pair of on-screen frequencies (cycles/mm) into the radial
/// frequency in cycles per degree of visual angle at the given viewing
/// distance (mm). The conversion factor is ≈8.936 mm/degree at 512mm.
pub fn radial_frequency_cpd(fu: f64, fv: f64, viewing_distance: f64) -> f64 {
    let mm_per_degree =
        PI / (180.0 * (1.0 / (1.0 + viewing_distance * viewing_distance).sqrt()).asin());
    mm_per_degree * (fu * fu + fv * fv).sqrt()
}

/// Angular sensitivity factor `S(θ) = ((1-s)/2)·cos(4θ) + (1+s)/2` with
/// `θ = arctan(fu/fv)`. At `fv = 0` the angle is taken as π/2 (and 0 at
/// DC); either convention gives the same factor because cos(4θ) is
/// invariant under θ ↔ π/2−θ.
pub fn angular_symmetry(fu: f64, fv: f64, symmetry: f64) -> f64 {
    let theta = if fv == 0.0 {
        if fu == 0.0 {
            0.0
        } else {
            FRAC_PI_2
        }
    } else {
        (fu / fv).atan()
    };
    0.5 * (1.0 - symmetry) * (4.0 * theta).cos() + 0.5 * (1.0 + symmetry)
}

/// Lowpass modulation transfer function on the normalized radial frequency
/// (cycles per degree). Frequencies at or below the cutoff keep full
/// weight; above it the weight is `a(b + c·f′)·exp(-(c·f′)^d)`.
pub fn mtf(f_prime: f64, params: &CsfParams) -> f64 {
    if f_prime > params.f_max {
        let cf = params.c * f_prime;
        params.a * (params.b + cf) * (-cf.powf(params.d)).exp()
    } else {
        1.0
    }
}

/// Builds the base frequency weighting matrix from the full model:
/// discrete frequencies → radial cycles per degree → angular
/// normalization → lowpass MTF.
pub fn build_fwm(params: &CsfParams) -> Result<FrequencyWeightingMatrix, CsfError> {
    params.validate()?;
    let freqs = discrete_frequencies(params);
    let n = params.n;
    let mut values = vec![vec![0.0f64; n]; n];
    for (i, row) in values.iter_mut().enumerate() {
        for (j, value) in row.iter_mut().enumerate() {
            let (fu, fv) = (freqs[i], freqs[j]);
            let radial = radial_frequency_cpd(fu, fv, params.viewing_distance);
            let normalized = radial / angular_symmetry(fu, fv, params.symmetry);
            *value = mtf(normalized, params);
        }
    }
    Ok(FrequencyWeightingMatrix::new(n, FwmKind::Base, values))
}
