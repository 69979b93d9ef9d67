use crate::error::{Error, Result};
use crate::image::Image;
use crate::scalar::Scalar;

/// Tile a rectangular grid of same-sized images row-major, separated by
/// `gap`-pixel bands filled with `gap_value`.
pub fn montage<T: Scalar>(rows: &[Vec<Image<T>>], gap: usize, gap_value: T) -> Result<Image<T>> {
    let cols = rows.first().map(Vec::len).filter(|&c| c > 0).ok_or(Error::RaggedGrid)?;
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::RaggedGrid);
    }
    let dims = rows[0][0].dims();
    for img in rows.iter().flatten() {
        img.ensure_dims(dims)?;
    }
    let (h, w, ch) = dims;
    let out_h = rows.len() * h + (rows.len() - 1) * gap;
    let out_w = cols * w + (cols - 1) * gap;
    let mut data = vec![gap_value; out_h * out_w * ch];
    for (gr, row) in rows.iter().enumerate() {
        for (gc, img) in row.iter().enumerate() {
            let (top, left) = (gr * (h + gap), gc * (w + gap));
            for r in 0..h {
                let dst = ((top + r) * out_w + left) * ch;
                data[dst..dst + w * ch].copy_from_slice(&img.data()[r * w * ch..(r + 1) * w * ch]);
            }
        }
    }
    Image::new(out_h, out_w, ch, data)
}
