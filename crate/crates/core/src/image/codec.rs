//! Binary PGM (P5) / PPM (P6) read and write, plus 8-bit PNG.

use std::fs;
use std::io::{Cursor, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Scalar;

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    /// Binary PGM (P5) or PPM (P6), picked by channel count.
    Pnm,
    Png,
}

impl ImageFormat {
    /// `.png` selects PNG; anything else is written as PNM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("png") => ImageFormat::Png,
            _ => ImageFormat::Pnm,
        }
    }
}

pub fn load_image<T: Scalar>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Decode an in-memory PGM, PPM or PNG file. Sample `s` maps to `s / 255`.
pub fn decode<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else {
        Err(Error::UnsupportedFormat("unrecognized file signature".into()))
    }
}

/// Write `img` as 8-bit samples `round(v * 255)`, ties to even.
pub fn save_image<T: Scalar>(img: &Image<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode(img, ImageFormat::from_path(path))?;
    fs::write(path, bytes).map_err(|source| Error::IoFailure { path: path.to_path_buf(), source })
}

pub fn encode<T: Scalar>(img: &Image<T>, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Pnm => Ok(encode_pnm(img)),
        ImageFormat::Png => encode_png(img),
    }
}

pub fn encode_pnm<T: Scalar>(img: &Image<T>) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|v| quantize(*v)));
    out
}

pub(crate) fn quantize<T: Scalar>(v: T) -> u8 {
    (v.to_f64_lossless() * 255.0).round_ties_even().clamp(0.0, 255.0) as u8
}

fn dequantize<T: Scalar>(s: u8) -> T {
    T::from_f64_lossy(f64::from(s) / 255.0)
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptHeader(format!("missing or invalid {what}")))
    }
}

fn decode_pnm<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    let channels = if bytes[1] == b'5' { 1 } else { 3 };
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::CorruptHeader(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!("maxval {maxval}, only 255 is supported")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::CorruptHeader("missing separator after maxval".into()));
    }
    let start = cur.pos + 1;
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::CorruptHeader("dimensions overflow".into()))?;
    let payload = &bytes[start..];
    if payload.len() < need {
        return Err(Error::CorruptHeader(format!(
            "header declares {need} samples but payload holds {}",
            payload.len()
        )));
    }
    let data = payload[..need].iter().map(|&s| dequantize(s)).collect();
    Image::new(height, width, channels, data)
}

fn decode_png<T: Scalar>(bytes: &[u8]) -> Result<Image<T>> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| Error::CorruptHeader(format!("png: {e}")))?;
    let info = reader.info();
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => return Err(Error::UnsupportedFormat(format!("png color type {other:?}"))),
    };
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!("png bit depth {:?}", info.bit_depth)));
    }
    if info.trns.is_some() {
        return Err(Error::UnsupportedFormat("png transparency".into()));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptHeader("png: image too large".into()))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(|e| Error::CorruptHeader(format!("png: {e}")))?;
    let row_len = width * channels;
    let mut data = Vec::with_capacity(row_len * height);
    for row in buf.chunks(frame.line_size).take(height) {
        data.extend(row[..row_len].iter().map(|&s| dequantize::<T>(s)));
    }
    Image::new(height, width, channels, data)
}

fn encode_png<T: Scalar>(img: &Image<T>) -> Result<Vec<u8>> {
    let to_err = |e: png::EncodingError| Error::InvalidImage(format!("png encode: {e}"));
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(if img.channels() == 1 { png::ColorType::Grayscale } else { png::ColorType::Rgb });
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc.write_header().map_err(to_err)?;
        let samples: Vec<u8> = img.data().iter().map(|v| quantize(*v)).collect();
        writer.write_image_data(&samples).map_err(to_err)?;
        writer.finish().map_err(to_err)?;
    }
    out.flush().ok();
    Ok(out)
}
