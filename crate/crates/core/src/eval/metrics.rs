use crate::dataset::PairedDataset;
use crate::error::Result;
use crate::image::Image;
use crate::model::Regressor;
use crate::scalar::Scalar;

/// Mean squared per-pixel difference.
pub fn mse<T: Scalar>(a: &Image<T>, b: &Image<T>) -> Result<f64> {
    b.ensure_dims(a.dims())?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x.to_f64_lossless() - y.to_f64_lossless();
            d * d
        })
        .sum();
    Ok(sum / a.len() as f64)
}

/// PSNR in dB for unit peak; `+∞` when the error is zero.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

pub fn psnr<T: Scalar>(a: &Image<T>, b: &Image<T>) -> Result<f64> {
    mse(a, b).map(psnr_from_mse)
}

/// Learned parameter count of any model kind.
pub fn parameter_count<T: Scalar>(model: &impl Regressor<T>) -> usize {
    model.parameter_count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_pair_mse: Vec<f64>,
    pub mean_mse: f64,
    /// PSNR of `mean_mse`.
    pub mean_psnr: f64,
    pub n_pairs: usize,
}

impl EvalReport {
    pub fn from_errors(per_pair_mse: Vec<f64>) -> Self {
        let n_pairs = per_pair_mse.len();
        let mean_mse = per_pair_mse.iter().sum::<f64>() / n_pairs as f64;
        Self { per_pair_mse, mean_mse, mean_psnr: psnr_from_mse(mean_mse), n_pairs }
    }
}

/// Apply `model` to every input and score against the paired target.
pub fn evaluate<T: Scalar>(model: &impl Regressor<T>, ds: &PairedDataset<T>) -> Result<EvalReport> {
    let errors = ds
        .pairs()
        .iter()
        .map(|(input, target)| mse(&model.apply(input)?, target))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_errors(errors))
}
