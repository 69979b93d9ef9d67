use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Scalar;

const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

/// Luminance `0.299 R + 0.587 G + 0.114 B`. Single-channel input is returned as is.
pub fn to_grayscale<T: Scalar>(img: &Image<T>) -> Image<T> {
    if img.channels() == 1 {
        return img.clone();
    }
    let [wr, wg, wb] = LUMA.map(T::from_f64_lossy);
    let data = img
        .data()
        .chunks_exact(3)
        .map(|px| (wr * px[0] + wg * px[1] + wb * px[2]).clamp_unit())
        .collect();
    Image { height: img.height(), width: img.width(), channels: 1, data }
}

/// Largest centered window with aspect `out_w : out_h`, as `(top, left, height, width)`.
pub fn crop_window(in_h: usize, in_w: usize, out_h: usize, out_w: usize) -> (usize, usize, usize, usize) {
    let (crop_h, crop_w) = if in_w * out_h > in_h * out_w {
        // Input is wider than the target aspect.
        let w = ((in_h * out_w) as f64 / out_h as f64).round() as usize;
        (in_h, w.clamp(1, in_w))
    } else {
        let h = ((in_w * out_h) as f64 / out_w as f64).round() as usize;
        (h.clamp(1, in_h), in_w)
    };
    ((in_h - crop_h) / 2, (in_w - crop_w) / 2, crop_h, crop_w)
}

/// Sample coordinates and blend weight for bilinear resampling along one axis.
fn axis_taps(out_len: usize, in_len: usize) -> Vec<(usize, usize, f64)> {
    let scale = in_len as f64 / out_len as f64;
    (0..out_len)
        .map(|o| {
            let src = ((o as f64 + 0.5) * scale - 0.5).clamp(0.0, (in_len - 1) as f64);
            let lo = src.floor() as usize;
            let hi = (lo + 1).min(in_len - 1);
            (lo, hi, src - lo as f64)
        })
        .collect()
}

/// Center-crop to the target aspect ratio, then bilinearly resample to `out_h x out_w`.
pub fn center_crop_resize<T: Scalar>(img: &Image<T>, out_h: usize, out_w: usize) -> Result<Image<T>> {
    if out_h == 0 || out_w == 0 {
        return Err(Error::InvalidImage(format!("target size {out_h}x{out_w}")));
    }
    if img.height() == out_h && img.width() == out_w {
        return Ok(img.clone());
    }
    let (top, left, crop_h, crop_w) = crop_window(img.height(), img.width(), out_h, out_w);
    let rows = axis_taps(out_h, crop_h);
    let cols = axis_taps(out_w, crop_w);
    let ch = img.channels();
    let lerp = |a: T, b: T, t: T| a + t * (b - a);

    let mut data = Vec::with_capacity(out_h * out_w * ch);
    for &(r0, r1, fr) in &rows {
        let fr = T::from_f64_lossy(fr);
        for &(c0, c1, fc) in &cols {
            let fc = T::from_f64_lossy(fc);
            for k in 0..ch {
                let at = |r: usize, c: usize| img.get(top + r, left + c, k);
                let upper = lerp(at(r0, c0), at(r0, c1), fc);
                let lower = lerp(at(r1, c0), at(r1, c1), fc);
                data.push(lerp(upper, lower, fr).clamp_unit());
            }
        }
    }
    Image::new(out_h, out_w, ch, data)
}
