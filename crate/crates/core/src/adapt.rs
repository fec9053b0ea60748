//! Display-resolution adaptation of weighting matrices.
//!
//! A target display is summarized by one scalar `w` derived from its pixel
//! hypotenuse relative to a theoretical maximum. Each weight of the base
//! matrix is raised to an exponent `A(i, j) = exp(-d(i, j) / w)`, where
//! `d` is the normalized distance of the coefficient from DC. Larger
//! displays give smaller `w`, hence smaller exponents, hence weights pulled
//! toward 1.0 and lighter quantization of medium/high frequencies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csf::{FrequencyWeightingMatrix, FwmKind};

/// Default theoretical maximum display dimension (the largest image size
/// the JPEG standard can describe).
pub const DEFAULT_MAX_DIMENSION: u32 = 65535;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("display dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: u32, height: u32 },
    #[error("maximum dimensions must be positive, got {max_width}x{max_height}")]
    ZeroMaximum { max_width: u32, max_height: u32 },
    #[error("display {width}x{height} exceeds maxima {max_width}x{max_height}")]
    ExceedsMaximum {
        width: u32,
        height: u32,
        max_width: u32,
        max_height: u32,
    },
}

#[derive(Debug, Error, PartialEq)]
pub enum AdaptError {
    #[error("matrix size {matrix} does not match exponent field size {field}")]
    SizeMismatch { matrix: usize, field: usize },
    #[error("matrix is already adapted; adaptation starts from a base matrix")]
    AlreadyAdapted,
}

/// A target display and the resolution parameter derived from it.
///
/// All derived quantities are computed once at construction and carried at
/// full precision; nothing is rounded until integer matrix derivation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GeometryDimensions", into = "GeometryDimensions")]
pub struct DisplayGeometry {
    width: u32,
    height: u32,
    max_width: u32,
    max_height: u32,
    actual_hypotenuse: f64,
    theoretical_hypotenuse: f64,
    normalized_hypotenuse: f64,
    resolution_parameter: f64,
}

/// Serialized form of a geometry: just the four dimensions, with the
/// derived values recomputed on deserialization.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct GeometryDimensions {
    width: u32,
    height: u32,
    max_width: u32,
    max_height: u32,
}

impl TryFrom<GeometryDimensions> for DisplayGeometry {
    type Error = GeometryError;

    fn try_from(d: GeometryDimensions) -> Result<Self, GeometryError> {
        DisplayGeometry::with_maxima(d.width, d.height, d.max_width, d.max_height)
    }
}

impl From<DisplayGeometry> for GeometryDimensions {
    fn from(g: DisplayGeometry) -> Self {
        Self {
            width: g.width,
            height: g.height,
            max_width: g.max_width,
            max_height: g.max_height,
        }
    }
}

impl DisplayGeometry {
    /// Geometry against the default 65535×65535 maxima.
    pub fn new(width: u32, height: u32) -> Result<Self, GeometryError> {
        Self::with_maxima(width, height, DEFAULT_MAX_DIMENSION, DEFAULT_MAX_DIMENSION)
    }

    /// Geometry against explicit theoretical maxima.
    ///
    /// `h_a = hypot(width, height)`, `h_t = hypot(max_width, max_height)`,
    /// `p = h_a / h_t`, `w = h_t^(-p)`.
    pub fn with_maxima(
        width: u32,
        height: u32,
        max_width: u32,
        max_height: u32,
    ) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::ZeroDimension { width, height });
        }
        if max_width == 0 || max_height == 0 {
            return Err(GeometryError::ZeroMaximum {
                max_width,
                max_height,
            });
        }
        if width > max_width || height > max_height {
            return Err(GeometryError::ExceedsMaximum {
                width,
                height,
                max_width,
                max_height,
            });
        }
        let actual_hypotenuse = f64::from(width).hypot(f64::from(height));
        let theoretical_hypotenuse = f64::from(max_width).hypot(f64::from(max_height));
        let normalized_hypotenuse = actual_hypotenuse / theoretical_hypotenuse;
        let resolution_parameter = theoretical_hypotenuse.powf(-normalized_hypotenuse);
        Ok(Self {
            width,
            height,
            max_width,
            max_height,
            actual_hypotenuse,
            theoretical_hypotenuse,
            normalized_hypotenuse,
            resolution_parameter,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn max_width(&self) -> u32 {
        self.max_width
    }

    pub fn max_height(&self) -> u32 {
        self.max_height
    }

    /// Pixel hypotenuse of the display itself.
    pub fn actual_hypotenuse(&self) -> f64 {
        self.actual_hypotenuse
    }

    /// Pixel hypotenuse of the theoretical maximum display.
    pub fn theoretical_hypotenuse(&self) -> f64 {
        self.theoretical_hypotenuse
    }

    /// Normalized hypotenuse `p` in (0, 1].
    pub fn normalized_hypotenuse(&self) -> f64 {
        self.normalized_hypotenuse
    }

    /// Display resolution parameter `w` in (0, 1]; strictly decreasing
    /// in `p`.
    pub fn resolution_parameter(&self) -> f64 {
        self.resolution_parameter
    }
}

/// Normalized Euclidean distance of coefficient position `(i, j)` from DC
/// at `(0, 0)`, scaled so the farthest AC position `(n-1, n-1)` maps
/// to 1.0.
pub fn normalized_distance(i: usize, j: usize, n: usize) -> f64 {
    debug_assert!(n >= 2 && i < n && j < n);
    let far = 2 * (n - 1) * (n - 1);
    (((i * i + j * j) as f64) / far as f64).sqrt()
}

/// Per-position exponents `A(i, j) = exp(-d(i, j) / w)` for one display
/// geometry. The DC exponent is exactly 1.0 and values shrink with
/// distance from DC.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    size: usize,
    geometry: DisplayGeometry,
    values: Vec<Vec<f64>>,
}

impl ExponentField {
    pub fn new(geometry: DisplayGeometry, n: usize) -> Self {
        assert!(n >= 2, "exponent field needs n >= 2, got {n}");
        let w = geometry.resolution_parameter();
        let values = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (-normalized_distance(i, j, n) / w).exp())
                    .collect()
            })
            .collect();
        Self {
            size: n,
            geometry,
            values,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn geometry(&self) -> DisplayGeometry {
        self.geometry
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }
}

/// Raises each base weight to its exponent: `H'(i,j) = H(i,j)^A(i,j)`.
///
/// Since the weights lie in (0, 1] and the exponents in [0, 1], the
/// adapted matrix dominates the base matrix elementwise.
pub fn adapt_fwm(
    base: &FrequencyWeightingMatrix,
    field: &ExponentField,
) -> Result<FrequencyWeightingMatrix, AdaptError> {
    if base.kind() != FwmKind::Base {
        return Err(AdaptError::AlreadyAdapted);
    }
    if base.size() != field.size() {
        return Err(AdaptError::SizeMismatch {
            matrix: base.size(),
            field: field.size(),
        });
    }
    let n = base.size();
    let values = (0..n)
        .map(|i| (0..n).map(|j| base.get(i, j).powf(field.get(i, j))).collect())
        .collect();
    Ok(FrequencyWeightingMatrix::new(
        n,
        FwmKind::Adapted(field.geometry()),
        values,
    ))
}
