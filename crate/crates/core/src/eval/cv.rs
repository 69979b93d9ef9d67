use std::cmp::Ordering;

use crate::dataset::PairedDataset;
use crate::error::{Error, Result};
use crate::eval::metrics::{evaluate, psnr_from_mse};
use crate::eval::ReportRow;
use crate::kernel::train_pixel_kr;
use crate::linear::{train_full_rr, train_pixel_rr};
use crate::model::{AnyModel, Method};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub lambda: f64,
    pub sigma: Option<f64>,
}

impl Candidate {
    /// Order by `lambda`, then `sigma`; used to break score ties.
    fn simplicity(&self, other: &Self) -> Ordering {
        self.lambda.total_cmp(&other.lambda).then_with(|| match (self.sigma, other.sigma) {
            (Some(a), Some(b)) => a.total_cmp(&b),
            (a, b) => a.is_some().cmp(&b.is_some()),
        })
    }

    pub fn train<T: Scalar>(&self, method: Method, ds: &PairedDataset<T>) -> Result<AnyModel<T>> {
        Ok(match method {
            Method::PixelRr => train_pixel_rr(ds, self.lambda)?.into(),
            Method::PixelKr => {
                let sigma = self.sigma.ok_or(Error::EmptyGrid)?;
                train_pixel_kr(ds, self.lambda, sigma)?.into()
            }
            Method::FullRr => train_full_rr(ds, self.lambda)?.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub method: Method,
    pub grid: Vec<Candidate>,
    /// `scores[candidate][fold]`: mean validation MSE.
    pub scores: Vec<Vec<f64>>,
    pub best: Candidate,
    pub best_score: f64,
    pub k: usize,
    pub seed: u64,
}

impl CvResult {
    pub fn mean_score(&self, candidate: usize) -> f64 {
        let s = &self.scores[candidate];
        s.iter().sum::<f64>() / s.len() as f64
    }

    /// One row per `(candidate, fold)`, candidates in grid order.
    pub fn rows(&self) -> Vec<ReportRow> {
        self.grid
            .iter()
            .zip(&self.scores)
            .flat_map(|(c, folds)| {
                folds.iter().enumerate().map(move |(fold, &mse)| ReportRow {
                    method: self.method,
                    lambda: c.lambda,
                    sigma: c.sigma,
                    fold,
                    mse,
                    psnr: psnr_from_mse(mse),
                })
            })
            .collect()
    }
}

/// Grid search by `k`-fold cross-validation on held-out MSE. The best
/// candidate minimizes the fold-mean score; ties go to the smallest
/// `lambda`, then the smallest `sigma`. `sigma_grid` is only used by Pixel-KR.
pub fn cross_validate<T: Scalar>(
    ds: &PairedDataset<T>,
    method: Method,
    lambda_grid: &[f64],
    sigma_grid: Option<&[f64]>,
    k: usize,
    seed: u64,
) -> Result<CvResult> {
    if lambda_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let grid: Vec<Candidate> = match method {
        Method::PixelKr => {
            let sigmas = sigma_grid.filter(|s| !s.is_empty()).ok_or(Error::EmptyGrid)?;
            lambda_grid
                .iter()
                .flat_map(|&lambda| sigmas.iter().map(move |&s| Candidate { lambda, sigma: Some(s) }))
                .collect()
        }
        _ => lambda_grid.iter().map(|&lambda| Candidate { lambda, sigma: None }).collect(),
    };

    let splits = (0..k).map(|fold| ds.kfold_split(k, fold, seed)).collect::<Result<Vec<_>>>()?;
    let mut scores = vec![Vec::with_capacity(k); grid.len()];
    for (train, val) in &splits {
        for (candidate, row) in grid.iter().zip(scores.iter_mut()) {
            let model = candidate.train(method, train)?;
            row.push(evaluate(&model, val)?.mean_mse);
        }
    }

    let means: Vec<f64> = scores.iter().map(|s| s.iter().sum::<f64>() / k as f64).collect();
    let best = select_best(&grid, &means);
    Ok(CvResult { method, best: grid[best], best_score: means[best], grid, scores, k, seed })
}

fn select_best(grid: &[Candidate], means: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..grid.len() {
        let better = means[i] < means[best]
            || (means[i] == means[best] && grid[i].simplicity(&grid[best]) == Ordering::Less);
        if better {
            best = i;
        }
    }
    best
}
