//! 8-bit image planes and the two supported input formats: binary PGM
//! (P5) for single planes and planar raw YUV 4:2:0 with externally
//! supplied dimensions.

use std::io::{self, BufRead, Read, Seek, SeekFrom, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a binary PGM: expected magic P5, got '{0}'")]
    BadMagic(String),
    #[error("malformed PGM header: {0}")]
    BadHeader(String),
    #[error("unsupported max sample value {0}; only 8-bit planes are supported")]
    UnsupportedMaxval(u32),
    #[error("file truncated: expected {expected} sample bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("YUV 4:2:0 requires even dimensions, got {width}x{height}")]
    OddDimensions { width: usize, height: usize },
    #[error("sample buffer of {len} bytes does not match {width}x{height}")]
    LengthMismatch {
        len: usize,
        width: usize,
        height: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Luma,
    Chroma,
}

/// A single 8-bit plane, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    component: Component,
    samples: Vec<u8>,
}

impl ImagePlane {
    pub fn new(
        width: usize,
        height: usize,
        component: Component,
        samples: Vec<u8>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        if samples.len() != width * height {
            return Err(ImageError::LengthMismatch {
                len: samples.len(),
                width,
                height,
            });
        }
        Ok(Self {
            width,
            height,
            component,
            samples,
        })
    }

    /// Builds a plane by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        component: Component,
        f: impl Fn(usize, usize) -> u8,
    ) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            component,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn component(&self) -> Component {
        self.component
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    /// Reads a binary PGM (P5). Header comments are accepted; only 8-bit
    /// sample depth is supported.
    pub fn read_pgm<R: BufRead>(reader: &mut R) -> Result<Self, ImageError> {
        let magic = next_header_token(reader)?;
        if magic != "P5" {
            return Err(ImageError::BadMagic(magic));
        }
        let width: usize = parse_header_field(reader, "width")?;
        let height: usize = parse_header_field(reader, "height")?;
        let maxval: u32 = parse_header_field(reader, "maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(ImageError::UnsupportedMaxval(maxval));
        }
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        let mut samples = vec![0u8; width * height];
        read_exact_or_truncated(reader, &mut samples)?;
        Self::new(width, height, Component::Luma, samples)
    }

    /// Writes the plane as a binary PGM (P5).
    pub fn write_pgm<W: Write>(&self, writer: &mut W) -> io::Result<()> {
        write!(writer, "P5\n{} {}\n255\n", self.width, self.height)?;
        writer.write_all(&self.samples)
    }
}

/// The three planes of one YUV 4:2:0 frame.
#[derive(Debug, Clone, PartialEq)]
pub struct YuvFrame {
    pub y: ImagePlane,
    pub u: ImagePlane,
    pub v: ImagePlane,
}

impl YuvFrame {
    pub fn plane(&self, name: PlaneSelector) -> &ImagePlane {
        match name {
            PlaneSelector::Y => &self.y,
            PlaneSelector::U => &self.u,
            PlaneSelector::V => &self.v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneSelector {
    Y,
    U,
    V,
}

/// Reads one frame from a planar raw YUV 4:2:0 stream. Luma dimensions
/// come from the caller; chroma planes are half size in each direction.
pub fn read_yuv420<R: Read + Seek>(
    reader: &mut R,
    width: usize,
    height: usize,
    frame_index: usize,
) -> Result<YuvFrame, ImageError> {
    if width == 0 || height == 0 {
        return Err(ImageError::ZeroDimension { width, height });
    }
    if width % 2 != 0 || height % 2 != 0 {
        return Err(ImageError::OddDimensions { width, height });
    }
    let (cw, ch) = (width / 2, height / 2);
    let frame_bytes = width * height + 2 * cw * ch;
    reader.seek(SeekFrom::Start((frame_index * frame_bytes) as u64))?;

    let mut y = vec![0u8; width * height];
    read_exact_or_truncated(reader, &mut y)?;
    let mut u = vec![0u8; cw * ch];
    read_exact_or_truncated(reader, &mut u)?;
    let mut v = vec![0u8; cw * ch];
    read_exact_or_truncated(reader, &mut v)?;

    Ok(YuvFrame {
        y: ImagePlane::new(width, height, Component::Luma, y)?,
        u: ImagePlane::new(cw, ch, Component::Chroma, u)?,
        v: ImagePlane::new(cw, ch, Component::Chroma, v)?,
    })
}

fn read_exact_or_truncated<R: Read>(reader: &mut R, buf: &mut [u8]) -> Result<(), ImageError> {
    let mut filled = 0;
    while filled < buf.len() {
        let n = reader.read(&mut buf[filled..])?;
        if n == 0 {
            return Err(ImageError::Truncated {
                expected: buf.len(),
                got: filled,
            });
        }
        filled += n;
    }
    Ok(())
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
// The byte that terminates the token is consumed, which after the maxval
// token is exactly the single whitespace separating header from samples.
fn next_header_token<R: BufRead>(reader: &mut R) -> Result<String, ImageError> {
    let mut token = String::new();
    let mut in_comment = false;
    loop {
        let mut byte = [0u8; 1];
        let n = reader.read(&mut byte)?;
        if n == 0 {
            if token.is_empty() {
                return Err(ImageError::BadHeader("unexpected end of header".into()));
            }
            return Ok(token);
        }
        let b = byte[0];
        if in_comment {
            if b == b'\n' {
                in_comment = false;
            }
            continue;
        }
        match b {
            b'#' if token.is_empty() => in_comment = true,
            b' ' | b'\t' | b'\r' | b'\n' => {
                if !token.is_empty() {
                    return Ok(token);
                }
            }
            _ => token.push(b as char),
        }
    }
}

fn parse_header_field<R: BufRead, T: std::str::FromStr>(
    reader: &mut R,
    name: &str,
) -> Result<T, ImageError> {
    let token = next_header_token(reader)?;
    token
        .parse()
        .map_err(|_| ImageError::BadHeader(format!("invalid {name} '{token}'")))
}
