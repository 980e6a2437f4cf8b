//! Binary field snapshots.
//!
//! Layout, all integers and floats little-endian:
//!
//! | offset | size | content                                        |
//! |--------|------|------------------------------------------------|
//! | 0      | 8    | magic `b"SDFIELD\0"`                           |
//! | 8      | 4    | endianness tag `0x01020304` (u32)              |
//! | 12     | 4    | format version, currently 1 (u32)              |
//! | 16     | 4    | dimension n (u32)                              |
//! | 20     | 4    | points per axis N (u32)                        |
//! | 24     | 8    | extent L (f64)                                 |
//! | 32     | 8    | time t (f64)                                   |
//! | 40     | 4    | bytes per complex sample, 8 or 16 (u32)        |
//! | 44     | 4    | reserved, zero                                 |
//! | 48     | ...  | `N^n` physical samples as (re, im) pairs       |
//!
//! Samples are in grid storage order (axis 0 slowest). With 8-byte samples
//! each component is an f32 (complex64), with 16-byte samples an f64
//! (complex128).

use std::io::{self, Read, Write};

use rustfft::num_complex::Complex64;
use thiserror::Error;

use super::{Grid, SpectralError, SpectralField};

pub const MAGIC: [u8; 8] = *b"SDFIELD\0";
pub const ENDIAN_TAG: u32 = 0x0102_0304;
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Two f32 per sample.
    Complex64,
    /// Two f64 per sample.
    Complex128,
}

impl Precision {
    fn sample_bytes(self) -> u32 {
        match self {
            Precision::Complex64 => 8,
            Precision::Complex128 => 16,
        }
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a field snapshot (bad magic)")]
    Magic,
    #[error("unsupported byte order tag {0:#010x}")]
    Endianness(u32),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("unsupported sample width {0}")]
    SampleWidth(u32),
    #[error("invalid grid in header: {0}")]
    Grid(#[from] SpectralError),
}

/// A decoded snapshot.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub field: SpectralField,
    pub time: f64,
}

pub fn write_snapshot<W: Write>(mut w: W, field: &SpectralField, time: f64, precision: Precision) -> io::Result<()> {
    let grid = field.grid();
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(&MAGIC);
    header.extend_from_slice(&ENDIAN_TAG.to_le_bytes());
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    header.extend_from_slice(&(grid.points() as u32).to_le_bytes());
    header.extend_from_slice(&grid.extent().to_le_bytes());
    header.extend_from_slice(&time.to_le_bytes());
    header.extend_from_slice(&precision.sample_bytes().to_le_bytes());
    header.extend_from_slice(&0u32.to_le_bytes());
    w.write_all(&header)?;

    let values = field.physical();
    let mut body = Vec::with_capacity(values.len() * precision.sample_bytes() as usize);
    for z in values {
        match precision {
            Precision::Complex64 => {
                body.extend_from_slice(&(z.re as f32).to_le_bytes());
                body.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
            Precision::Complex128 => {
                body.extend_from_slice(&z.re.to_le_bytes());
                body.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    w.write_all(&body)
}

fn u32_at(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(buf[at..at + 4].try_into().unwrap())
}

fn f64_at(buf: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(buf[at..at + 8].try_into().unwrap())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot, SnapshotError> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)?;
    if header[..8] != MAGIC {
        return Err(SnapshotError::Magic);
    }
    let tag = u32_at(&header, 8);
    if tag != ENDIAN_TAG {
        return Err(SnapshotError::Endianness(tag));
    }
    let version = u32_at(&header, 12);
    if version != VERSION {
        return Err(SnapshotError::Version(version));
    }
    let dim = u32_at(&header, 16) as usize;
    let points = u32_at(&header, 20) as usize;
    let extent = f64_at(&header, 24);
    let time = f64_at(&header, 32);
    let width = u32_at(&header, 40);
    if width != 8 && width != 16 {
        return Err(SnapshotError::SampleWidth(width));
    }
    let grid = Grid::new(dim, points, extent)?;

    let mut body = vec![0u8; grid.len() * width as usize];
    r.read_exact(&mut body)?;
    let values = body
        .chunks_exact(width as usize)
        .map(|c| {
            if width == 8 {
                let re = f32::from_le_bytes(c[0..4].try_into().unwrap());
                let im = f32::from_le_bytes(c[4..8].try_into().unwrap());
                Complex64::new(re as f64, im as f64)
            } else {
                Complex64::new(f64_at(c, 0), f64_at(c, 8))
            }
        })
        .collect();
    let field = SpectralField::from_physical(&grid, values)?;
    Ok(Snapshot { field, time })
}
