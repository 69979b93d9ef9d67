//! Procedural paired images with a known per-pixel affine map.
//!
//! Inputs are smooth random interference patterns in `[0.2, 0.8]`. Targets
//! are `a(p)·x + b(p)` plus Gaussian noise, where the slope field `a` lies in
//! `[0.6, 1.4]` and the offset field `b` in `[-0.2, 0.2]`; both vary smoothly
//! over the image.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::PairedDataset;
use crate::error::Result;
use crate::image::Image;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct AffineSynth {
    pub height: usize,
    pub width: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SynthData<T> {
    pub train: PairedDataset<T>,
    pub test: PairedDataset<T>,
    /// Ground-truth slope per position.
    pub slope: Vec<f64>,
    /// Ground-truth offset per position.
    pub offset: Vec<f64>,
}

impl AffineSynth {
    pub fn new(height: usize, width: usize, noise_sigma: f64, seed: u64) -> Self {
        Self { height, width, noise_sigma, seed }
    }

    pub fn generate<T: Scalar>(&self, n_train: usize, n_test: usize) -> Result<SynthData<T>> {
        let (h, w) = (self.height, self.width);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let field = |rng: &mut ChaCha8Rng| {
            let (fr, fc) = (rng.random_range(0.5..1.5), rng.random_range(0.5..1.5));
            let (pr, pc) = (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            move |r: usize, c: usize| {
                (TAU * fr * r as f64 / h as f64 + pr).sin() * (TAU * fc * c as f64 / w as f64 + pc).cos()
            }
        };
        let slope_shape = field(&mut rng);
        let offset_shape = field(&mut rng);
        let mut slope = Vec::with_capacity(h * w);
        let mut offset = Vec::with_capacity(h * w);
        for r in 0..h {
            for c in 0..w {
                let a = 1.0 + 0.4 * slope_shape(r, c);
                slope.push(a);
                offset.push((0.5 * (1.0 - a) + 0.05 * offset_shape(r, c)).clamp(-0.2, 0.2));
            }
        }

        let noise = Normal::new(0.0, self.noise_sigma).expect("noise sigma must be finite and non-negative");
        let mut make_pairs = |count: usize| -> Result<Vec<(Image<T>, Image<T>)>> {
            (0..count)
                .map(|_| {
                    let waves: Vec<(f64, f64, f64)> = (0..3)
                        .map(|_| (rng.random_range(0.5..3.0), rng.random_range(0.5..3.0), rng.random_range(0.0..TAU)))
                        .collect();
                    let mut xs = Vec::with_capacity(h * w);
                    let mut ts = Vec::with_capacity(h * w);
                    for r in 0..h {
                        for c in 0..w {
                            let s: f64 = waves
                                .iter()
                                .map(|&(u, v, phi)| (TAU * (u * r as f64 / h as f64 + v * c as f64 / w as f64) + phi).cos())
                                .sum::<f64>()
                                / 3.0;
                            let x = 0.5 + 0.3 * s;
                            let p = r * w + c;
                            let t = slope[p] * x + offset[p] + noise.sample(&mut rng);
                            xs.push(T::from_f64_lossy(x));
                            ts.push(T::from_f64_lossy(t));
                        }
                    }
                    Ok((Image::from_clamped(h, w, 1, xs)?, Image::from_clamped(h, w, 1, ts)?))
                })
                .collect()
        };
        let train = PairedDataset::from_pairs(make_pairs(n_train)?)?;
        let test = PairedDataset::from_pairs(make_pairs(n_test)?)?;
        Ok(SynthData { train, test, slope, offset })
    }
}
