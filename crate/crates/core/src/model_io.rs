//! Little-endian binary model files.
//!
//! ```text
//! "PXFES1"  magic, 6 bytes
//! u8        version (0x01)
//! u8        kind: 0x01 pixel-rr, 0x02 pixel-kr, 0x03 full-rr
//! u16 H, u16 W, u8 C
//! f64       lambda
//! payload:
//!   pixel-rr  H·W·C f64 weights, then H·W·C f64 biases
//!   pixel-kr  u32 N, f64 sigma, then per position: N f64 training inputs, N f64 coefficients
//!   full-rr   K·D f64 weights, row-major
//! ```
//!
//! Positions are ordered row-major with the channel innermost.

use std::io::Write;
use std::path::Path;

use crate::error::{Dims, Error, Result};
use crate::kernel::PixelKrModel;
use crate::linear::{FullRrModel, PixelRrModel};
use crate::model::{AnyModel, Method};
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 6] = b"PXFES1";
pub const VERSION: u8 = 0x01;
const HEADER_LEN: usize = 6 + 1 + 1 + 2 + 2 + 1 + 8;

impl Method {
    pub fn kind_byte(self) -> u8 {
        match self {
            Method::PixelRr => 0x01,
            Method::PixelKr => 0x02,
            Method::FullRr => 0x03,
        }
    }
}

pub fn encode_model<T: Scalar>(model: &AnyModel<T>) -> Result<Vec<u8>> {
    let dims = crate::model::Regressor::dims(model);
    let (h, w, c) = dims;
    let (h16, w16, c8) = match (u16::try_from(h), u16::try_from(w), u8::try_from(c)) {
        (Ok(h), Ok(w), Ok(c)) => (h, w, c),
        _ => return Err(Error::GeometryTooLarge(dims)),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * crate::model::Regressor::stored_values(model) + 12);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(model.method().kind_byte());
    out.extend_from_slice(&h16.to_le_bytes());
    out.extend_from_slice(&w16.to_le_bytes());
    out.push(c8);
    put_f64(&mut out, model.lambda());
    match model {
        AnyModel::PixelRr(m) => {
            m.weights().iter().for_each(|&v| put_f64(&mut out, v));
            m.biases().iter().for_each(|&v| put_f64(&mut out, v));
        }
        AnyModel::PixelKr(m) => {
            let n = u32::try_from(m.n_train()).map_err(|_| Error::GeometryTooLarge(dims))?;
            out.extend_from_slice(&n.to_le_bytes());
            put_f64(&mut out, m.sigma());
            for p in 0..m.positions() {
                m.train_pixels(p).iter().for_each(|&v| put_f64(&mut out, v));
                m.coeffs(p).iter().for_each(|&v| put_f64(&mut out, v));
            }
        }
        AnyModel::FullRr(m) => m.weights().iter().for_each(|&v| put_f64(&mut out, v)),
    }
    Ok(out)
}

fn put_f64<T: Scalar>(out: &mut Vec<u8>, v: T) {
    out.extend_from_slice(&v.to_f64_lossless().to_le_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(Error::TruncatedPayload {
            expected: self.pos.saturating_add(n),
            found: self.bytes.len(),
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// `count` f64 values, checking the full length up front.
    fn f64s<T: Scalar>(&mut self, count: usize) -> Result<Vec<T>> {
        let raw = self.take(count.checked_mul(8).ok_or(Error::TruncatedPayload {
            expected: usize::MAX,
            found: self.bytes.len(),
        })?)?;
        Ok(raw.chunks_exact(8).map(|b| T::from_f64_lossy(f64::from_le_bytes(b.try_into().unwrap()))).collect())
    }
}

pub fn decode_model<T: Scalar>(bytes: &[u8]) -> Result<AnyModel<T>> {
    let mut r = Reader { bytes, pos: 0 };
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(Error::BadMagic);
    }
    r.take(MAGIC.len())?;
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let kind = r.u8()?;
    let dims: Dims = (usize::from(r.u16()?), usize::from(r.u16()?), usize::from(r.u8()?));
    let lambda = T::from_f64_lossy(r.f64()?);
    let positions = dims.0 * dims.1 * dims.2;
    let model = match kind {
        0x01 => {
            let weights = r.f64s(positions)?;
            let biases = r.f64s(positions)?;
            AnyModel::PixelRr(PixelRrModel::new(dims, weights, biases, lambda)?)
        }
        0x02 => {
            let n = r.u32()? as usize;
            let sigma = T::from_f64_lossy(r.f64()?);
            let mut train_pixels = Vec::new();
            let mut coeffs = Vec::new();
            // Fail fast on truncation before allocating per-position blocks.
            let need = positions.saturating_mul(n).saturating_mul(16);
            if bytes.len() - r.pos < need {
                return Err(Error::TruncatedPayload { expected: r.pos.saturating_add(need), found: bytes.len() });
            }
            train_pixels.reserve(positions * n);
            coeffs.reserve(positions * n);
            for _ in 0..positions {
                train_pixels.extend(r.f64s::<T>(n)?);
                coeffs.extend(r.f64s::<T>(n)?);
            }
            AnyModel::PixelKr(PixelKrModel::new(dims, n, sigma, lambda, train_pixels, coeffs)?)
        }
        0x03 => {
            let weights = r.f64s(positions.saturating_mul(positions))?;
            AnyModel::FullRr(FullRrModel::new(dims, weights, lambda)?)
        }
        other => return Err(Error::UnknownKind(other)),
    };
    if r.pos != bytes.len() {
        return Err(Error::TrailingBytes(bytes.len() - r.pos));
    }
    Ok(model)
}

pub fn load_model<T: Scalar>(path: impl AsRef<Path>) -> Result<AnyModel<T>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}

/// Serialize and write atomically.
pub fn save_model<T: Scalar>(model: &AnyModel<T>, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path, &encode_model(model)?)
}

/// Write through a temporary file in the destination directory, then rename over `path`.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::IoFailure { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
