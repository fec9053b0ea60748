//! Scaling-list document emission and parsing.
//!
//! The text format is line-oriented and deterministic:
//!
//! ```text
//! AQM-SCALING-LIST v1
//! [SIZE=8 KIND=intra LAYER=0 DC=16]
//! 16 16 16 16 17 18 21 24
//! ...seven more rows...
//! ```
//!
//! One section per (size, kind, layer), each carrying its DC entry
//! explicitly (always the top-left value; larger sizes inherit it from
//! replication) followed by the full matrix in row-major order. The JSON
//! format mirrors the same fields. Both round-trip matrices bit-exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{MatrixKind, Provenance, QmError, QuantizationMatrix};

const TEXT_HEADER: &str = "AQM-SCALING-LIST v1";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScalingListError {
    #[error("scaling list requires at least one matrix")]
    EmptySet,
    #[error("duplicate section: size {size} {kind} layer {layer}")]
    DuplicateSection {
        size: usize,
        kind: &'static str,
        layer: u32,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("section at line {line}: DC={dc} does not match top-left entry {corner}")]
    DcMismatch { line: usize, dc: u32, corner: u32 },
    #[error("unsupported document version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Matrix(#[from] QmError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One matrix tagged with the layer it is signaled for.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingListEntry {
    pub layer_id: u32,
    pub matrix: QuantizationMatrix,
}

/// An ordered set of scaling-list sections, possibly spanning layers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalingListDocument {
    entries: Vec<ScalingListEntry>,
}

#[derive(Serialize, Deserialize)]
struct JsonDocument {
    version: u32,
    sections: Vec<JsonSection>,
}

#[derive(Serialize, Deserialize)]
struct JsonSection {
    size: usize,
    kind: MatrixKind,
    layer: u32,
    dc: u32,
    values: Vec<Vec<u32>>,
}

impl ScalingListDocument {
    /// Builds a single-layer document from a set of matrices.
    pub fn new(
        matrices: &[QuantizationMatrix],
        layer_id: u32,
    ) -> Result<Self, ScalingListError> {
        let mut doc = Self::default();
        doc.append_layer(matrices, layer_id)?;
        Ok(doc)
    }

    /// Appends another layer's matrices, keeping (size, kind, layer)
    /// unique across the document.
    pub fn append_layer(
        &mut self,
        matrices: &[QuantizationMatrix],
        layer_id: u32,
    ) -> Result<(), ScalingListError> {
        if matrices.is_empty() {
            return Err(ScalingListError::EmptySet);
        }
        for m in matrices {
            self.check_unique(m.size(), m.kind(), layer_id)?;
            self.entries.push(ScalingListEntry {
                layer_id,
                matrix: m.clone(),
            });
        }
        Ok(())
    }

    fn check_unique(
        &self,
        size: usize,
        kind: MatrixKind,
        layer: u32,
    ) -> Result<(), ScalingListError> {
        if self.entries.iter().any(|e| {
            e.layer_id == layer && e.matrix.size() == size && e.matrix.kind() == kind
        }) {
            return Err(ScalingListError::DuplicateSection {
                size,
                kind: kind.as_str(),
                layer,
            });
        }
        Ok(())
    }

    pub fn entries(&self) -> &[ScalingListEntry] {
        &self.entries
    }

    /// Serializes to the canonical text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from(TEXT_HEADER);
        out.push('\n');
        for entry in &self.entries {
            let m = &entry.matrix;
            out.push_str(&format!(
                "[SIZE={} KIND={} LAYER={} DC={}]\n",
                m.size(),
                m.kind().as_str(),
                entry.layer_id,
                m.get(0, 0)
            ));
            for row in m.rows() {
                let line: Vec<String> = row.iter().map(u32::to_string).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// Parses the text format, validating structure, ranges and the DC
    /// consistency of every section.
    pub fn from_text(text: &str) -> Result<Self, ScalingListError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(idx, line)| (idx + 1, line.trim()))
            .filter(|(_, line)| !line.is_empty());

        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty document"))?;
        if header != TEXT_HEADER {
            return Err(parse_err(
                line_no,
                format!("expected header '{TEXT_HEADER}', got '{header}'"),
            ));
        }

        let mut doc = Self::default();
        let mut pending = lines.next();
        while let Some((line_no, line)) = pending {
            let (size, kind, layer, dc) = parse_section_header(line_no, line)?;
            let mut values = Vec::with_capacity(size);
            for _ in 0..size {
                let (row_no, row_line) = lines.next().ok_or_else(|| {
                    parse_err(line_no, format!("section truncated: expected {size} rows"))
                })?;
                let row: Vec<u32> = row_line
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<u32>()
                            .map_err(|_| parse_err(row_no, format!("invalid integer '{tok}'")))
                    })
                    .collect::<Result<_, _>>()?;
                if row.len() != size {
                    return Err(parse_err(
                        row_no,
                        format!("expected {size} entries per row, got {}", row.len()),
                    ));
                }
                values.push(row);
            }
            let matrix =
                QuantizationMatrix::from_values(kind, Provenance::Default, values)?;
            if dc != matrix.get(0, 0) {
                return Err(ScalingListError::DcMismatch {
                    line: line_no,
                    dc,
                    corner: matrix.get(0, 0),
                });
            }
            doc.check_unique(size, kind, layer)?;
            doc.entries.push(ScalingListEntry {
                layer_id: layer,
                matrix,
            });
            pending = lines.next();
        }
        if doc.entries.is_empty() {
            return Err(ScalingListError::EmptySet);
        }
        Ok(doc)
    }

    /// Serializes to the JSON mirror of the text format.
    pub fn to_json_string(&self) -> String {
        let json = JsonDocument {
            version: FORMAT_VERSION,
            sections: self
                .entries
                .iter()
                .map(|e| JsonSection {
                    size: e.matrix.size(),
                    kind: e.matrix.kind(),
                    layer: e.layer_id,
                    dc: e.matrix.get(0, 0),
                    values: e.matrix.rows().to_vec(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&json).expect("document serialization cannot fail")
    }

    pub fn from_json_str(text: &str) -> Result<Self, ScalingListError> {
        let json: JsonDocument = serde_json::from_str(text)?;
        if json.version != FORMAT_VERSION {
            return Err(ScalingListError::UnsupportedVersion(json.version));
        }
        let mut doc = Self::default();
        for (idx, section) in json.sections.into_iter().enumerate() {
            if section.values.len() != section.size {
                return Err(parse_err(
                    idx + 1,
                    format!(
                        "section {} declares size {} but has {} rows",
                        idx,
                        section.size,
                        section.values.len()
                    ),
                ));
            }
            let matrix = QuantizationMatrix::from_values(
                section.kind,
                Provenance::Default,
                section.values,
            )?;
            if section.dc != matrix.get(0, 0) {
                return Err(ScalingListError::DcMismatch {
                    line: idx + 1,
                    dc: section.dc,
                    corner: matrix.get(0, 0),
                });
            }
            doc.check_unique(matrix.size(), matrix.kind(), section.layer)?;
            doc.entries.push(ScalingListEntry {
                layer_id: section.layer,
                matrix,
            });
        }
        if doc.entries.is_empty() {
            return Err(ScalingListError::EmptySet);
        }
        Ok(doc)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> ScalingListError {
    ScalingListError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_section_header(
    line_no: usize,
    line: &str,
) -> Result<(usize, MatrixKind, u32, u32), ScalingListError> {
    let inner = line
        .strip_prefix('[')
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or_else(|| parse_err(line_no, format!("expected section header, got '{line}'")))?;
    let mut fields = inner.split_whitespace();
    let mut expect = |key: &str| -> Result<String, ScalingListError> {
        let field = fields
            .next()
            .ok_or_else(|| parse_err(line_no, format!("missing {key} field")))?;
        let (k, v) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, format!("malformed field '{field}'")))?;
        if k != key {
            return Err(parse_err(line_no, format!("expected {key}, got {k}")));
        }
        Ok(v.to_string())
    };
    let size: usize = expect("SIZE")?
        .parse()
        .map_err(|_| parse_err(line_no, "invalid SIZE"))?;
    let kind = match expect("KIND")?.as_str() {
        "intra" => MatrixKind::Intra,
        "inter" => MatrixKind::Inter,
        other => return Err(parse_err(line_no, format!("unknown KIND '{other}'"))),
    };
    let layer: u32 = expect("LAYER")?
        .parse()
        .map_err(|_| parse_err(line_no, "invalid LAYER"))?;
    let dc: u32 = expect("DC")?
        .parse()
        .map_err(|_| parse_err(line_no, "invalid DC"))?;
    if fields.next().is_some() {
        return Err(parse_err(line_no, "trailing fields in section header"));
    }
    Ok((size, kind, layer, dc))
}
