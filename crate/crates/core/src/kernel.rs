//! Per-pixel Gaussian kernel ridge regression.
//!
//! Each position `p` keeps its `N` training inputs `x_p` and a coefficient
//! vector `c_p` solving `c_p (K_p + λI) = t_p`, where `K_p` is the Gaussian
//! kernel matrix over `x_p`. A query intensity `x` maps to `c_p · κ(x)` with
//! `κ(x)_i = k(x_p^i, x)`. The feature-space weights are never formed.

use rayon::prelude::*;

use crate::dataset::{PairedDataset, PixelSeries};
use crate::error::{Dims, Error, Result};
use crate::image::Image;
use crate::linalg::{cholesky_in_place, cholesky_solve_in_place};
use crate::model::Regressor;
use crate::scalar::Scalar;

/// Positions per parallel task.
const CHUNK: usize = 64;

/// `k(a, b) = exp(−(a − b)² / (2σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel<T> {
    sigma: T,
    neg_inv_two_sigma_sq: T,
}

impl<T: Scalar> GaussianKernel<T> {
    pub fn new(sigma: T) -> Result<Self> {
        if !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::InvalidBandwidth(sigma.to_f64_lossless()));
        }
        let two = T::one() + T::one();
        Ok(Self { sigma, neg_inv_two_sigma_sq: -(two * sigma * sigma).recip() })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    #[inline]
    pub fn eval(&self, a: T, b: T) -> T {
        let d = a - b;
        (d * d * self.neg_inv_two_sigma_sq).exp()
    }

    /// Row-major `N x N` matrix `K[i][j] = k(x_i, x_j)`.
    pub fn matrix(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        let mut k = vec![T::zero(); n * n];
        self.fill_matrix(x, &mut k);
        k
    }

    fn fill_matrix(&self, x: &[T], k: &mut [T]) {
        let n = x.len();
        for i in 0..n {
            k[i * n + i] = T::one();
            for j in 0..i {
                let v = self.eval(x[i], x[j]);
                k[i * n + j] = v;
                k[j * n + i] = v;
            }
        }
    }
}

pub fn gaussian_kernel<T: Scalar>(a: T, b: T, sigma: T) -> Result<T> {
    Ok(GaussianKernel::new(sigma)?.eval(a, b))
}

pub fn kernel_matrix<T: Scalar>(x: &[T], sigma: T) -> Result<Vec<T>> {
    Ok(GaussianKernel::new(sigma)?.matrix(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PixelKrModel<T> {
    dims: Dims,
    n_train: usize,
    kernel: GaussianKernel<T>,
    lambda: T,
    /// Position-major `P x N` stored training inputs.
    train_pixels: Vec<T>,
    /// Position-major `P x N` coefficients.
    coeffs: Vec<T>,
}

impl<T: Scalar> PixelKrModel<T> {
    pub fn new(
        dims: Dims,
        n_train: usize,
        sigma: T,
        lambda: T,
        train_pixels: Vec<T>,
        coeffs: Vec<T>,
    ) -> Result<Self> {
        let kernel = GaussianKernel::new(sigma)?;
        let len = dims.0 * dims.1 * dims.2 * n_train;
        if n_train == 0 || train_pixels.len() != len || coeffs.len() != len {
            return Err(Error::InvalidImage(format!(
                "pixel-kr model needs {len} training values and coefficients"
            )));
        }
        Ok(Self { dims, n_train, kernel, lambda, train_pixels, coeffs })
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn sigma(&self) -> T {
        self.kernel.sigma()
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn positions(&self) -> usize {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    pub fn train_pixels(&self, p: usize) -> &[T] {
        &self.train_pixels[p * self.n_train..(p + 1) * self.n_train]
    }

    pub fn coeffs(&self, p: usize) -> &[T] {
        &self.coeffs[p * self.n_train..(p + 1) * self.n_train]
    }

    /// Unclamped prediction `c_p · κ(x)` at position `p`.
    pub fn predict(&self, p: usize, x: T) -> Result<T> {
        if p >= self.positions() {
            return Err(Error::IndexOutOfRange { index: p, len: self.positions() });
        }
        Ok(self.predict_unchecked(p, x))
    }

    #[inline]
    fn predict_unchecked(&self, p: usize, x: T) -> T {
        self.train_pixels(p)
            .iter()
            .zip(self.coeffs(p))
            .fold(T::zero(), |acc, (&xi, &ci)| acc + ci * self.kernel.eval(xi, x))
    }
}

impl<T: Scalar> Regressor<T> for PixelKrModel<T> {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn apply(&self, img: &Image<T>) -> Result<Image<T>> {
        img.ensure_dims(self.dims)?;
        let data = img
            .data()
            .par_iter()
            .enumerate()
            .map(|(p, &x)| self.predict_unchecked(p, x).clamp_unit())
            .collect();
        Image::new(self.dims.0, self.dims.1, self.dims.2, data)
    }

    /// Coefficients only, `H * W * C * N`.
    fn parameter_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients plus stored training inputs.
    fn stored_values(&self) -> usize {
        self.coeffs.len() + self.train_pixels.len()
    }
}

/// Train Pixel-KR with `lambda > 0` and `sigma > 0`.
pub fn train_pixel_kr<T: Scalar>(ds: &PairedDataset<T>, lambda: f64, sigma: f64) -> Result<PixelKrModel<T>> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    train_pixel_kr_raw(ds, lambda, sigma)
}

/// [`train_pixel_kr`] accepting `lambda = 0` for exact interpolation. Duplicate
/// training values then make `K_p` singular and the solve fails.
pub fn train_pixel_kr_raw<T: Scalar>(ds: &PairedDataset<T>, lambda: f64, sigma: f64) -> Result<PixelKrModel<T>> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    let kernel = GaussianKernel::new(T::from_f64_lossy(sigma))?;
    let lam = T::from_f64_lossy(lambda);
    let n = ds.len();
    let positions = ds.positions();

    let mut train_pixels = vec![T::zero(); positions * n];
    let mut coeffs = vec![T::zero(); positions * n];
    train_pixels
        .par_chunks_mut(CHUNK * n)
        .zip(coeffs.par_chunks_mut(CHUNK * n))
        .enumerate()
        .try_for_each(|(chunk, (xs, cs))| {
            let start = chunk * CHUNK;
            for (n_idx, (input, target)) in ds.pairs().iter().enumerate() {
                let (inp, tgt) = (input.data(), target.data());
                for local in 0..xs.len() / n {
                    xs[local * n + n_idx] = inp[start + local];
                    cs[local * n + n_idx] = tgt[start + local];
                }
            }
            let mut gram = vec![T::zero(); n * n];
            for (local, (x, c)) in xs.chunks_exact(n).zip(cs.chunks_exact_mut(n)).enumerate() {
                kernel.fill_matrix(x, &mut gram);
                for i in 0..n {
                    gram[i * n + i] = gram[i * n + i] + lam;
                }
                cholesky_in_place(&mut gram, n).map_err(|_| Error::SolveFailure(start + local))?;
                // K + λI is symmetric, so c (K + λI) = t is the same system as (K + λI) cᵀ = tᵀ.
                cholesky_solve_in_place(&gram, n, c);
                if c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SolveFailure(start + local));
                }
            }
            Ok(())
        })?;
    Ok(PixelKrModel { dims: ds.dims(), n_train: n, kernel, lambda: lam, train_pixels, coeffs })
}

/// `½‖cK − t‖² + (λ/2) c K cᵀ` with `K = kernel_matrix(series.x, σ)`.
pub fn pixel_kr_objective<T: Scalar>(c: &[T], series: &PixelSeries<T>, lambda: T, sigma: T) -> Result<T> {
    let k = kernel_matrix(&series.x, sigma)?;
    let ck = row_times(c, &k);
    let half = T::from_f64_lossy(0.5);
    let fit: T = ck.iter().zip(&series.t).map(|(&a, &t)| (a - t) * (a - t)).sum();
    let penalty: T = ck.iter().zip(c).map(|(&a, &ci)| a * ci).sum();
    Ok(half * fit + half * lambda * penalty)
}

/// Gradient `(cK − t)K + λcK` of [`pixel_kr_objective`].
pub fn pixel_kr_gradient<T: Scalar>(c: &[T], series: &PixelSeries<T>, lambda: T, sigma: T) -> Result<Vec<T>> {
    let k = kernel_matrix(&series.x, sigma)?;
    let ck = row_times(c, &k);
    let residual: Vec<T> = ck.iter().zip(&series.t).map(|(&a, &t)| a - t).collect();
    let rk = row_times(&residual, &k);
    Ok(rk.iter().zip(&ck).map(|(&r, &a)| r + lambda * a).collect())
}

/// Row vector times the symmetric row-major matrix `k`.
fn row_times<T: Scalar>(v: &[T], k: &[T]) -> Vec<T> {
    let n = v.len();
    (0..n).map(|j| (0..n).fold(T::zero(), |acc, i| acc + v[i] * k[i * n + j])).collect()
}
