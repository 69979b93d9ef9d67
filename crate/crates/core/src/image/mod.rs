//! Canonical in-memory image representation and its I/O.
//!
//! Pixels are stored row-major with channels interleaved innermost, so the
//! linear position of `(row, col, channel)` is `(row * width + col) * channels + channel`.
//! Every intensity lies in `[0, 1]`.

mod codec;
mod transform;

pub use codec::{decode, encode, encode_pnm, load_image, save_image, ImageFormat};
pub use transform::{center_crop_resize, crop_window, to_grayscale};

use crate::error::{Dims, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Scalar> Image<T> {
    /// Build an image, validating its shape and that every intensity is in `[0, 1]`.
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(format!("zero-sized image {height}x{width}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!("unsupported channel count {channels}")));
        }
        if data.len() != height * width * channels {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match {height}x{width}x{channels}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(**v >= T::zero() && **v <= T::one())) {
            return Err(Error::InvalidImage(format!("intensity {v} outside [0, 1]")));
        }
        Ok(Self { height, width, channels, data })
    }

    /// Build an image by clamping raw values into `[0, 1]`.
    pub fn from_clamped(height: usize, width: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        let data = data.into_iter().map(Scalar::clamp_unit).collect();
        Self::new(height, width, channels, data)
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: T) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(height * width * channels);
        for r in 0..height {
            for c in 0..width {
                for ch in 0..channels {
                    data.push(f(r, c, ch));
                }
            }
        }
        Self::new(height, width, channels, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> Dims {
        (self.height, self.width, self.channels)
    }

    /// Number of scalar positions, `height * width * channels`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn index_of(&self, row: usize, col: usize, channel: usize) -> usize {
        (row * self.width + col) * self.channels + channel
    }

    pub fn get(&self, row: usize, col: usize, channel: usize) -> T {
        self.data[self.index_of(row, col, channel)]
    }

    /// Copy with position `p` replaced by `value` (clamped into `[0, 1]`).
    pub fn with_value(&self, p: usize, value: T) -> Result<Self> {
        if p >= self.data.len() {
            return Err(Error::IndexOutOfRange { index: p, len: self.data.len() });
        }
        let mut out = self.clone();
        out.data[p] = value.clamp_unit();
        Ok(out)
    }

    /// Convert intensities to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Image<U> {
        Image {
            height: self.height,
            width: self.width,
            channels: self.channels,
            data: self
                .data
                .iter()
                .map(|v| U::from_f64_lossy(v.to_f64_lossless()).clamp_unit())
                .collect(),
        }
    }

    pub(crate) fn ensure_dims(&self, expected: Dims) -> Result<()> {
        if self.dims() == expected {
            Ok(())
        } else {
            Err(Error::GeometryMismatch { expected, actual: self.dims() })
        }
    }
}
