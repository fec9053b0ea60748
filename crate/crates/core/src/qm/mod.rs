//! Integer quantization matrices.
//!
//! Weighting matrices become quantization matrices by rounding
//! `scale / weight` per entry (scale 16, so a weight of 1.0 gives the
//! neutral entry 16). Inter matrices come from an affine model applied to
//! the intra matrix; 16×16 and 32×32 matrices are produced by replicating
//! the 8×8 matrix.

pub mod scaling_list;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adapt::DisplayGeometry;
use crate::csf::{FrequencyWeightingMatrix, FwmKind};

/// Scaling value used when deriving integer matrices; also the neutral
/// entry (flat matrices of 16 leave quantization steps unchanged).
pub const QM_SCALE: u32 = 16;

/// Matrix sizes accepted by the codec path and the scaling-list format.
pub const SUPPORTED_SIZES: [usize; 4] = [4, 8, 16, 32];

/// The stock HEVC default 8×8 intra scaling list, from the standard text.
pub const HEVC_DEFAULT_INTRA_8X8: [[u32; 8]; 8] = [
    [16, 16, 16, 16, 17, 18, 21, 24],
    [16, 16, 16, 16, 17, 19, 22, 25],
    [16, 16, 17, 18, 20, 22, 25, 29],
    [16, 16, 18, 21, 24, 27, 31, 36],
    [17, 17, 20, 24, 30, 35, 41, 47],
    [18, 19, 22, 27, 35, 44, 54, 65],
    [21, 22, 25, 31, 41, 54, 70, 88],
    [24, 25, 29, 36, 47, 65, 88, 115],
];

/// The stock HEVC default 8×8 inter scaling list, from the standard text.
pub const HEVC_DEFAULT_INTER_8X8: [[u32; 8]; 8] = [
    [16, 16, 16, 16, 17, 18, 20, 24],
    [16, 16, 16, 17, 18, 20, 24, 25],
    [16, 16, 17, 18, 20, 24, 25, 28],
    [16, 17, 18, 20, 24, 25, 28, 33],
    [17, 18, 20, 24, 25, 28, 33, 41],
    [18, 20, 24, 25, 28, 33, 41, 54],
    [20, 24, 25, 28, 33, 41, 54, 71],
    [24, 25, 28, 33, 41, 54, 71, 91],
];

#[derive(Debug, Error, PartialEq)]
pub enum QmError {
    #[error("unsupported matrix size {0}; expected one of 4, 8, 16, 32")]
    UnsupportedSize(usize),
    #[error("matrix rows are not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("matrix entries must be >= 1, got {value} at ({i}, {j})")]
    EntryOutOfRange { i: usize, j: usize, value: u32 },
    #[error("scale must be >= 1, got {0}")]
    InvalidScale(u32),
    #[error("inter derivation requires an intra source matrix")]
    SourceNotIntra,
    #[error("inter model maps entry {entry} at ({i}, {j}) to non-positive value {mapped:.4}")]
    NonPositiveModelOutput {
        i: usize,
        j: usize,
        entry: u32,
        mapped: f64,
    },
    #[error("replication source must be 8x8, got {0}x{0}")]
    ReplicationSourceNotEight(usize),
    #[error("replication target must be 16 or 32, got {0}")]
    UnsupportedReplicationTarget(usize),
    #[error("model fit requires matrices of equal size, got {source_size} and {target_size}")]
    FitSizeMismatch {
        source_size: usize,
        target_size: usize,
    },
    #[error("model fit is degenerate: source matrix entries are all equal")]
    DegenerateFit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Intra,
    Inter,
}

impl MatrixKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatrixKind::Intra => "intra",
            MatrixKind::Inter => "inter",
        }
    }
}

/// Where a matrix came from: the static default derivation or the
/// display-adaptive pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Default,
    Adaptive(DisplayGeometry),
}

/// An integer quantization matrix, tagged intra/inter and by provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationMatrix {
    size: usize,
    kind: MatrixKind,
    provenance: Provenance,
    values: Vec<Vec<u32>>,
}

impl QuantizationMatrix {
    /// Builds a matrix from explicit rows, validating shape and range.
    /// This is the entry point for pass-through user data (e.g. 4×4
    /// matrices outside the derivation path).
    pub fn from_values(
        kind: MatrixKind,
        provenance: Provenance,
        values: Vec<Vec<u32>>,
    ) -> Result<Self, QmError> {
        let size = values.len();
        if !SUPPORTED_SIZES.contains(&size) {
            return Err(QmError::UnsupportedSize(size));
        }
        for (row, r) in values.iter().enumerate() {
            if r.len() != size {
                return Err(QmError::NotSquare {
                    row,
                    len: r.len(),
                    expected: size,
                });
            }
            for (j, &v) in r.iter().enumerate() {
                if v < 1 {
                    return Err(QmError::EntryOutOfRange { i: row, j, value: v });
                }
            }
        }
        Ok(Self {
            size,
            kind,
            provenance,
            values,
        })
    }

    /// A matrix with every entry equal to `value` (16 disables weighting).
    pub fn flat(size: usize, kind: MatrixKind, value: u32) -> Result<Self, QmError> {
        Self::from_values(kind, Provenance::Default, vec![vec![value; size]; size])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.values
    }

    /// Equality on size, kind and values, ignoring provenance (which is
    /// not carried by the serialized formats).
    pub fn same_matrix(&self, other: &Self) -> bool {
        self.size == other.size && self.kind == other.kind && self.values == other.values
    }
}

/// The HEVC default intra matrix as a [`QuantizationMatrix`].
pub fn hevc_default_intra() -> QuantizationMatrix {
    QuantizationMatrix::from_values(
        MatrixKind::Intra,
        Provenance::Default,
        HEVC_DEFAULT_INTRA_8X8.iter().map(|r| r.to_vec()).collect(),
    )
    .expect("standard table is valid")
}

/// The HEVC default inter matrix as a [`QuantizationMatrix`].
pub fn hevc_default_inter() -> QuantizationMatrix {
    QuantizationMatrix::from_values(
        MatrixKind::Inter,
        Provenance::Default,
        HEVC_DEFAULT_INTER_8X8.iter().map(|r| r.to_vec()).collect(),
    )
    .expect("standard table is valid")
}

fn round_half_away(x: f64) -> i64 {
    // f64::round rounds half away from zero, which is the tie rule fixed
    // for all integer derivation here.
    x.round() as i64
}

/// Rounds a weighting matrix into an intra quantization matrix:
/// `value(i, j) = round(scale / weight(i, j))`, ties away from zero.
/// Provenance follows the matrix kind (base → default, adapted →
/// adaptive with the originating geometry).
pub fn derive_qm(
    fwm: &FrequencyWeightingMatrix,
    scale: u32,
) -> Result<QuantizationMatrix, QmError> {
    if scale < 1 {
        return Err(QmError::InvalidScale(scale));
    }
    let n = fwm.size();
    if !SUPPORTED_SIZES.contains(&n) {
        return Err(QmError::UnsupportedSize(n));
    }
    let provenance = match fwm.kind() {
        FwmKind::Base => Provenance::Default,
        FwmKind::Adapted(geometry) => Provenance::Adaptive(geometry),
    };
    let values = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| round_half_away(f64::from(scale) / fwm.get(i, j)).max(1) as u32)
                .collect()
        })
        .collect();
    Ok(QuantizationMatrix {
        size: n,
        kind: MatrixKind::Intra,
        provenance,
        values,
    })
}

/// Affine model mapping an intra matrix onto an inter matrix entrywise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterModelParams {
    pub slope: f64,
    pub intercept: f64,
}

impl InterModelParams {
    /// Identity model: inter equals intra. Shipped as the default because
    /// no universal coefficients exist; fit against a reference matrix
    /// when one is available.
    pub const IDENTITY: InterModelParams = InterModelParams {
        slope: 1.0,
        intercept: 0.0,
    };

    /// Least-squares fit of `target ≈ slope·source + intercept` over all
    /// entries of two equally-sized matrices.
    pub fn fit(
        source: &QuantizationMatrix,
        target: &QuantizationMatrix,
    ) -> Result<Self, QmError> {
        if source.size() != target.size() {
            return Err(QmError::FitSizeMismatch {
                source_size: source.size(),
                target_size: target.size(),
            });
        }
        let n = (source.size() * source.size()) as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..source.size() {
            for j in 0..source.size() {
                let x = f64::from(source.get(i, j));
                let y = f64::from(target.get(i, j));
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
        }
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-9 {
            return Err(QmError::DegenerateFit);
        }
        let slope = (n * sxy - sx * sy) / denom;
        let intercept = (sy - slope * sx) / n;
        Ok(Self { slope, intercept })
    }

    /// The model fitted from the stock HEVC default intra matrix to the
    /// stock HEVC default inter matrix.
    pub fn hevc_fit() -> Self {
        Self::fit(&hevc_default_intra(), &hevc_default_inter())
            .expect("standard tables give a non-degenerate fit")
    }
}

/// Applies the affine inter model to an intra matrix. Entries that the
/// model maps to a non-positive value are rejected; rounded results are
/// clamped below at 1.
pub fn derive_inter(
    intra: &QuantizationMatrix,
    model: &InterModelParams,
) -> Result<QuantizationMatrix, QmError> {
    if intra.kind() != MatrixKind::Intra {
        return Err(QmError::SourceNotIntra);
    }
    let n = intra.size();
    let mut values = vec![vec![0u32; n]; n];
    for i in 0..n {
        for j in 0..n {
            let entry = intra.get(i, j);
            let mapped = model.slope * f64::from(entry) + model.intercept;
            if mapped <= 0.0 {
                return Err(QmError::NonPositiveModelOutput { i, j, entry, mapped });
            }
            values[i][j] = round_half_away(mapped).max(1) as u32;
        }
    }
    Ok(QuantizationMatrix {
        size: n,
        kind: MatrixKind::Inter,
        provenance: intra.provenance(),
        values,
    })
}

/// Nearest-neighbor replication of an 8×8 matrix to 16×16 or 32×32:
/// `value(i, j) = source(i / k, j / k)` with `k = target / 8`.
pub fn replicate(
    qm8: &QuantizationMatrix,
    target_size: usize,
) -> Result<QuantizationMatrix, QmError> {
    if qm8.size() != 8 {
        return Err(QmError::ReplicationSourceNotEight(qm8.size()));
    }
    if target_size != 16 && target_size != 32 {
        return Err(QmError::UnsupportedReplicationTarget(target_size));
    }
    let k = target_size / 8;
    let values = (0..target_size)
        .map(|i| (0..target_size).map(|j| qm8.get(i / k, j / k)).collect())
        .collect();
    Ok(QuantizationMatrix {
        size: target_size,
        kind: qm8.kind(),
        provenance: qm8.provenance(),
        values,
    })
}
