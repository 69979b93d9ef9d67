//! Closed-form ridge regressors: the per-pixel model (one weight and bias per
//! position) and the dense full-image baseline.

use rayon::prelude::*;

use crate::dataset::{PairedDataset, PixelSeries};
use crate::error::{Dims, Error, Result};
use crate::image::Image;
use crate::linalg::{cholesky_in_place, cholesky_solve_in_place};
use crate::model::Regressor;
use crate::scalar::Scalar;

/// Largest vectorized image dimension accepted by [`train_full_rr`].
pub const FULL_RR_MAX_DIM: usize = 4096;

/// Positions handled per parallel task. Results do not depend on it.
const CHUNK: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct PixelRrModel<T> {
    dims: Dims,
    weights: Vec<T>,
    biases: Vec<T>,
    lambda: T,
}

impl<T: Scalar> PixelRrModel<T> {
    pub fn new(dims: Dims, weights: Vec<T>, biases: Vec<T>, lambda: T) -> Result<Self> {
        let len = dims.0 * dims.1 * dims.2;
        if weights.len() != len || biases.len() != len {
            return Err(Error::InvalidImage(format!(
                "pixel-rr model needs {len} weights and biases, got {} and {}",
                weights.len(),
                biases.len()
            )));
        }
        Ok(Self { dims, weights, biases, lambda })
    }

    /// `w = 1, b = 0` everywhere.
    pub fn identity(dims: Dims) -> Self {
        let len = dims.0 * dims.1 * dims.2;
        Self { dims, weights: vec![T::one(); len], biases: vec![T::zero(); len], lambda: T::zero() }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn biases(&self) -> &[T] {
        &self.biases
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// Raw (unclamped) prediction `w_p x + b_p`.
    pub fn predict(&self, p: usize, x: T) -> T {
        self.weights[p] * x + self.biases[p]
    }
}

impl<T: Scalar> Regressor<T> for PixelRrModel<T> {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn apply(&self, img: &Image<T>) -> Result<Image<T>> {
        img.ensure_dims(self.dims)?;
        let data = img.data().iter().enumerate().map(|(p, &x)| self.predict(p, x).clamp_unit()).collect();
        Image::new(self.dims.0, self.dims.1, self.dims.2, data)
    }

    fn parameter_count(&self) -> usize {
        2 * self.weights.len()
    }
}

/// Sufficient statistics of one pixel series, accumulated in `f64`.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sx: f64,
    sxx: f64,
    st: f64,
    sxt: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64, t: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sxx += x * x;
        self.st += t;
        self.sxt += x * t;
    }

    /// Solve `[[Σx²+λ, Σx], [Σx, N+λ]] [w, b]ᵀ = [Σxt, Σt]ᵀ` by the adjugate.
    fn solve(&self, lambda: f64) -> Option<(f64, f64)> {
        let a = self.sxx + lambda;
        let d = self.n + lambda;
        let det = a * d - self.sx * self.sx;
        if !det.is_finite() || det <= 1e-12 * a * d {
            return None;
        }
        let w = (d * self.sxt - self.sx * self.st) / det;
        let b = (a * self.st - self.sx * self.sxt) / det;
        (w.is_finite() && b.is_finite()).then_some((w, b))
    }
}

/// Solve the per-pixel normal equations for one series. Accepts `lambda = 0`;
/// a constant series is then rank deficient and yields `SingularSystem`.
pub fn fit_pixel_series<T: Scalar>(series: &PixelSeries<T>, lambda: f64) -> Result<(T, T)> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    let mut m = Moments::default();
    for (&x, &t) in series.x.iter().zip(&series.t) {
        m.push(x.to_f64_lossless(), t.to_f64_lossless());
    }
    let (w, b) = m.solve(lambda).ok_or(Error::SingularSystem(series.position))?;
    Ok((T::from_f64_lossy(w), T::from_f64_lossy(b)))
}

/// Train Pixel-RR with `lambda > 0`.
pub fn train_pixel_rr<T: Scalar>(ds: &PairedDataset<T>, lambda: f64) -> Result<PixelRrModel<T>> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    train_pixel_rr_raw(ds, lambda)
}

/// [`train_pixel_rr`] without the `lambda > 0` guard; `lambda = 0` is allowed and
/// rank-deficient positions fail with `SingularSystem`.
pub fn train_pixel_rr_raw<T: Scalar>(ds: &PairedDataset<T>, lambda: f64) -> Result<PixelRrModel<T>> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    let len = ds.positions();
    let mut weights = vec![T::zero(); len];
    let mut biases = vec![T::zero(); len];
    weights
        .par_chunks_mut(CHUNK)
        .zip(biases.par_chunks_mut(CHUNK))
        .enumerate()
        .try_for_each(|(chunk, (ws, bs))| {
            let start = chunk * CHUNK;
            let end = start + ws.len();
            let mut moments = vec![Moments::default(); ws.len()];
            for (input, target) in ds.pairs() {
                let xs = &input.data()[start..end];
                let ts = &target.data()[start..end];
                for ((m, &x), &t) in moments.iter_mut().zip(xs).zip(ts) {
                    m.push(x.to_f64_lossless(), t.to_f64_lossless());
                }
            }
            for (i, m) in moments.iter().enumerate() {
                let (w, b) = m.solve(lambda).ok_or(Error::SingularSystem(start + i))?;
                ws[i] = T::from_f64_lossy(w);
                bs[i] = T::from_f64_lossy(b);
            }
            Ok(())
        })?;
    Ok(PixelRrModel { dims: ds.dims(), weights, biases, lambda: T::from_f64_lossy(lambda) })
}

/// `½‖w·x + b·1 − t‖² + (λ/2)(w² + b²)`.
pub fn pixel_rr_objective<T: Scalar>(w: T, b: T, series: &PixelSeries<T>, lambda: T) -> T {
    let half = T::from_f64_lossy(0.5);
    let sq: T = series
        .x
        .iter()
        .zip(&series.t)
        .map(|(&x, &t)| {
            let r = w * x + b - t;
            r * r
        })
        .sum();
    half * sq + half * lambda * (w * w + b * b)
}

/// Gradient of [`pixel_rr_objective`] with respect to `(w, b)`.
pub fn pixel_rr_gradient<T: Scalar>(w: T, b: T, series: &PixelSeries<T>, lambda: T) -> (T, T) {
    let (mut gw, mut gb) = (lambda * w, lambda * b);
    for (&x, &t) in series.x.iter().zip(&series.t) {
        let r = w * x + b - t;
        gw = gw + r * x;
        gb = gb + r;
    }
    (gw, gb)
}

/// Dense `K x D` ridge map over vectorized images, with no bias term.
#[derive(Debug, Clone, PartialEq)]
pub struct FullRrModel<T> {
    dims: Dims,
    /// Row-major `K x D`.
    weights: Vec<T>,
    lambda: T,
}

impl<T: Scalar> FullRrModel<T> {
    pub fn new(dims: Dims, weights: Vec<T>, lambda: T) -> Result<Self> {
        let d = dims.0 * dims.1 * dims.2;
        if weights.len() != d * d {
            return Err(Error::InvalidImage(format!("full-rr model needs {} weights, got {}", d * d, weights.len())));
        }
        Ok(Self { dims, weights, lambda })
    }

    /// Vectorized dimension `D = K = H * W * C`.
    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, row: usize, col: usize) -> T {
        self.weights[row * self.dim() + col]
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn frobenius_norm(&self) -> T {
        self.weights.iter().map(|&w| w * w).sum::<T>().sqrt()
    }
}

impl<T: Scalar> Regressor<T> for FullRrModel<T> {
    fn dims(&self) -> Dims {
        self.dims
    }

    fn apply(&self, img: &Image<T>) -> Result<Image<T>> {
        img.ensure_dims(self.dims)?;
        let x = img.data();
        let data = self
            .weights
            .chunks_exact(self.dim())
            .map(|row| row.iter().zip(x).map(|(&w, &v)| w * v).sum::<T>().clamp_unit())
            .collect();
        Image::new(self.dims.0, self.dims.1, self.dims.2, data)
    }

    fn parameter_count(&self) -> usize {
        self.weights.len()
    }
}

/// `W = [(XᵀX + λI)⁻¹ XᵀT]ᵀ` with rows of `X`/`T` the vectorized inputs/targets.
pub fn train_full_rr<T: Scalar>(ds: &PairedDataset<T>, lambda: f64) -> Result<FullRrModel<T>> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidRegularization(lambda));
    }
    let d = ds.positions();
    if d > FULL_RR_MAX_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    let lam = T::from_f64_lossy(lambda);

    // Lower triangle of the Gram matrix XᵀX + λI.
    let mut gram = vec![T::zero(); d * d];
    gram.par_chunks_mut(d).enumerate().for_each(|(i, row)| {
        for input in ds.inputs() {
            let x = input.data();
            let xi = x[i];
            for (g, &xj) in row[..=i].iter_mut().zip(x) {
                *g = *g + xi * xj;
            }
        }
        row[i] = row[i] + lam;
    });
    cholesky_in_place(&mut gram, d).map_err(|e| Error::SingularSystem(e.pivot))?;

    // Column k of XᵀT is the right-hand side for row k of W.
    let mut weights = vec![T::zero(); d * d];
    weights.par_chunks_mut(d).enumerate().for_each(|(k, row)| {
        for (input, target) in ds.pairs() {
            let tk = target.data()[k];
            for (r, &x) in row.iter_mut().zip(input.data()) {
                *r = *r + x * tk;
            }
        }
        cholesky_solve_in_place(&gram, d, row);
    });
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::SingularSystem(0));
    }
    Ok(FullRrModel { dims: ds.dims(), weights, lambda: lam })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(x: &[f64], t: &[f64]) -> PixelSeries<f64> {
        PixelSeries::new(0, x.to_vec(), t.to_vec())
    }

    fn single_pixel_ds(pairs: &[(f64, f64)]) -> PairedDataset<f64> {
        PairedDataset::from_pairs(
            pairs
                .iter()
                .map(|&(x, t)| (Image::filled(1, 1, 1, x).unwrap(), Image::filled(1, 1, 1, t).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn line_through_two_points() {
        let m = train_pixel_rr_raw(&single_pixel_ds(&[(0.0, 0.0), (1.0, 1.0)]), 0.0).unwrap();
        assert!((m.weights()[0] - 1.0).abs() < 1e-12 && m.biases()[0].abs() < 1e-12);

        let m = train_pixel_rr_raw(&single_pixel_ds(&[(0.2, 0.5), (0.4, 0.9)]), 0.0).unwrap();
        assert!((m.weights()[0] - 2.0).abs() < 1e-12);
        assert!((m.biases()[0] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn constant_series_needs_regularization() {
        let ds = single_pixel_ds(&[(0.3, 0.1), (0.3, 0.5), (0.3, 0.9)]);
        assert!(matches!(train_pixel_rr_raw(&ds, 0.0), Err(Error::SingularSystem(0))));
        let m = train_pixel_rr(&ds, 0.4).unwrap();
        assert!(m.weights()[0].is_finite() && m.biases()[0].is_finite());
        assert!(matches!(train_pixel_rr(&ds, 0.0), Err(Error::InvalidRegularization(_))));
        assert!(matches!(train_pixel_rr(&ds, f64::NAN), Err(Error::InvalidRegularization(_))));
    }

    #[test]
    fn parameter_count_is_two_per_position() {
        let dims = (128, 128, 1);
        assert_eq!(PixelRrModel::<f64>::identity(dims).parameter_count(), 32_768);
        assert_eq!(PixelRrModel::<f32>::identity((1, 1, 1)).parameter_count(), 2);
    }

    #[test]
    fn apply_identity_and_clamps() {
        let img = Image::<f64>::from_fn(3, 4, 1, |r, c, _| (r * 4 + c) as f64 / 11.0).unwrap();
        let id = PixelRrModel::identity(img.dims());
        assert_eq!(id.apply(&img).unwrap(), img);

        let m = PixelRrModel::<f64>::new((1, 1, 1), vec![2.0], vec![0.1], 0.4).unwrap();
        let out = m.apply(&Image::filled(1, 1, 1, 0.9).unwrap()).unwrap();
        assert_eq!(out.data(), &[1.0]);
        assert!((m.predict(0, 0.9) - 1.9).abs() < 1e-12);

        let wrong = Image::<f64>::filled(2, 2, 1, 0.0).unwrap();
        assert!(matches!(m.apply(&wrong), Err(Error::GeometryMismatch { .. })));
    }

    #[test]
    fn objective_values() {
        assert!((pixel_rr_objective(0.0, 0.0, &series(&[0.1], &[0.5]), 0.0) - 0.125).abs() < 1e-15);
        assert!((pixel_rr_objective(1.0, 0.0, &series(&[0.3, 0.7], &[0.3, 0.7]), 2.0) - 1.0).abs() < 1e-15);
        let s = series(&[0.1, 0.2, 0.6], &[0.3, 0.4, 0.8]);
        assert!(pixel_rr_objective(1.0, 0.2, &s, 0.0).abs() < 1e-15);
    }

    #[test]
    fn full_rr_identity_and_zero_maps() {
        let dims = (1, 2, 1);
        let id = FullRrModel::new(dims, vec![1.0, 0.0, 0.0, 1.0], 0.0).unwrap();
        let img = Image::<f64>::new(1, 2, 1, vec![0.25, 0.75]).unwrap();
        assert_eq!(id.apply(&img).unwrap(), img);
        let zero = FullRrModel::new(dims, vec![0.0; 4], 0.0).unwrap();
        assert_eq!(zero.apply(&img).unwrap().data(), &[0.0, 0.0]);
        assert_eq!(id.parameter_count(), 4);
    }

    #[test]
    fn full_rr_rejects_large_dimension() {
        let img = Image::<f32>::filled(65, 64, 1, 0.5).unwrap();
        let ds = PairedDataset::from_pairs(vec![(img.clone(), img)]).unwrap();
        assert!(matches!(train_full_rr(&ds, 0.4), Err(Error::DimensionTooLarge(4160))));
    }

    #[test]
    fn full_rr_singular_without_regularization() {
        // One pair, D = 2: XᵀX has rank 1.
        let img = Image::<f64>::new(1, 2, 1, vec![0.2, 0.4]).unwrap();
        let ds = PairedDataset::from_pairs(vec![(img.clone(), img)]).unwrap();
        assert!(matches!(train_full_rr(&ds, 0.0), Err(Error::SingularSystem(_))));
        assert!(train_full_rr(&ds, 0.4).is_ok());
    }
}
