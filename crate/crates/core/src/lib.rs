//! Per-pixel regression for paired image-to-image mapping.
//!
//! Three regressors learn a map from source images to target images:
//!
//! * [`linear::train_pixel_rr`]: one ridge-regularized weight and bias per
//!   pixel position, so every output pixel looks at exactly one input pixel.
//! * [`kernel::train_pixel_kr`]: per-position Gaussian kernel ridge regression
//!   over the `N` training values seen at that position.
//! * [`linear::train_full_rr`]: a dense ridge map over whole vectorized images,
//!   kept as a small-scale baseline.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root name the common concrete types.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod image;
pub mod kernel;
pub mod linalg;
pub mod linear;
pub mod model;
pub mod model_io;
pub mod scalar;
pub mod synth;

pub use config::ExpressionMapping;
pub use dataset::{load_dataset_root, load_paired_dataset, ColorMode, PixelSeries};
pub use error::{Dims, Error, Result};
pub use eval::{cross_validate, evaluate, montage, mse, parameter_count, psnr, Candidate, CvResult, EvalReport};
pub use image::{center_crop_resize, load_image, save_image, to_grayscale};
pub use kernel::{gaussian_kernel, kernel_matrix, pixel_kr_objective, train_pixel_kr, train_pixel_kr_raw};
pub use linear::{pixel_rr_objective, train_full_rr, train_pixel_rr, train_pixel_rr_raw};
pub use model::{AnyModel, Method, Regressor};
pub use model_io::{decode_model, encode_model, load_model, save_model};
pub use scalar::Scalar;

pub type Image = image::Image<f64>;
pub type Image32 = image::Image<f32>;
pub type PairedDataset = dataset::PairedDataset<f64>;
pub type PairedDataset32 = dataset::PairedDataset<f32>;
pub type PixelRrModel = linear::PixelRrModel<f64>;
pub type PixelRrModel32 = linear::PixelRrModel<f32>;
pub type PixelKrModel = kernel::PixelKrModel<f64>;
pub type PixelKrModel32 = kernel::PixelKrModel<f32>;
pub type FullRrModel = linear::FullRrModel<f64>;
pub type FullRrModel32 = linear::FullRrModel<f32>;
pub type Model = model::AnyModel<f64>;
