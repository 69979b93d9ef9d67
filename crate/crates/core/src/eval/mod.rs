//! Pixel error metrics, hyperparameter cross-validation and comparison grids.

mod cv;
mod metrics;
mod montage;

pub use cv::{cross_validate, Candidate, CvResult};
pub use metrics::{evaluate, mse, parameter_count, psnr, psnr_from_mse, EvalReport};
pub use montage::montage;

/// One CSV report row.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: crate::model::Method,
    pub lambda: f64,
    pub sigma: Option<f64>,
    pub fold: usize,
    pub mse: f64,
    pub psnr: f64,
}
