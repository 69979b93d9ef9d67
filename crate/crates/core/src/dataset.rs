//! Paired `(input, target)` image collections and the per-position pixel
//! series extracted from them.
//!
//! On disk a dataset is two directories, `<root>/input` and `<root>/target`,
//! whose image files are paired by identical file name.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Dims, Error, Result};
use crate::image::{center_crop_resize, load_image, to_grayscale, Image};
use crate::scalar::Scalar;

const IMAGE_EXTENSIONS: [&str; 3] = ["pgm", "ppm", "png"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ColorMode {
    /// Convert to luminance; one regression per spatial position.
    #[default]
    Grayscale,
    /// Keep RGB; one independent regression per channel position.
    PerChannel,
}

impl ColorMode {
    pub fn channels(self) -> usize {
        match self {
            ColorMode::Grayscale => 1,
            ColorMode::PerChannel => 3,
        }
    }
}

/// `N >= 1` aligned image pairs that all share one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset<T> {
    pairs: Vec<(Image<T>, Image<T>)>,
    names: Vec<String>,
    dims: Dims,
}

/// Input and target values at one position across every pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelSeries<T> {
    pub position: usize,
    pub x: Vec<T>,
    pub t: Vec<T>,
}

impl<T: Scalar> PixelSeries<T> {
    pub fn new(position: usize, x: Vec<T>, t: Vec<T>) -> Self {
        assert_eq!(x.len(), t.len(), "pixel series input/target lengths differ");
        Self { position, x, t }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

impl<T: Scalar> PairedDataset<T> {
    /// Build from in-memory pairs. Names default to the pair index.
    pub fn from_pairs(pairs: Vec<(Image<T>, Image<T>)>) -> Result<Self> {
        let names = (0..pairs.len()).map(|i| format!("{i:06}")).collect();
        Self::from_named_pairs(pairs, names)
    }

    pub fn from_named_pairs(pairs: Vec<(Image<T>, Image<T>)>, names: Vec<String>) -> Result<Self> {
        let first = pairs.first().ok_or(Error::EmptyDataset)?;
        let dims = first.0.dims();
        for (input, target) in &pairs {
            input.ensure_dims(dims)?;
            target.ensure_dims(dims)?;
        }
        assert_eq!(pairs.len(), names.len(), "one name per pair");
        Ok(Self { pairs, names, dims })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Number of regression positions, `H * W * C`.
    pub fn positions(&self) -> usize {
        self.dims.0 * self.dims.1 * self.dims.2
    }

    pub fn pairs(&self) -> &[(Image<T>, Image<T>)] {
        &self.pairs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn inputs(&self) -> impl Iterator<Item = &Image<T>> {
        self.pairs.iter().map(|(i, _)| i)
    }

    pub fn targets(&self) -> impl Iterator<Item = &Image<T>> {
        self.pairs.iter().map(|(_, t)| t)
    }

    pub fn pixel_series(&self, p: usize) -> Result<PixelSeries<T>> {
        if p >= self.positions() {
            return Err(Error::IndexOutOfRange { index: p, len: self.positions() });
        }
        let (x, t) = self.pairs.iter().map(|(i, t)| (i.data()[p], t.data()[p])).unzip();
        Ok(PixelSeries { position: p, x, t })
    }

    /// Subset by pair indices, preserving the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let pairs = indices.iter().map(|&i| self.pairs[i].clone()).collect();
        let names = indices.iter().map(|&i| self.names[i].clone()).collect();
        Self::from_named_pairs(pairs, names)
    }

    /// Deterministic `k`-fold split. Pairs are shuffled by `seed`, cut into `k`
    /// contiguous folds (the first `N mod k` folds get one extra pair), and
    /// fold `fold` is returned as validation. Both halves keep dataset order.
    pub fn kfold_split(&self, k: usize, fold: usize, seed: u64) -> Result<(Self, Self)> {
        let assignment = fold_assignment(self.len(), k, seed)
            .ok_or(Error::InvalidFoldSpec { k, fold, n: self.len() })?;
        if fold >= k {
            return Err(Error::InvalidFoldSpec { k, fold, n: self.len() });
        }
        let (val, train): (Vec<usize>, Vec<usize>) = (0..self.len()).partition(|&i| assignment[i] == fold);
        Ok((self.select(&train)?, self.select(&val)?))
    }

    pub fn cast<U: Scalar>(&self) -> PairedDataset<U> {
        PairedDataset {
            pairs: self.pairs.iter().map(|(i, t)| (i.cast(), t.cast())).collect(),
            names: self.names.clone(),
            dims: self.dims,
        }
    }
}

/// Fold index for each of `n` items, or `None` when `k` is not in `2..=n`.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Option<Vec<usize>> {
    if k < 2 || k > n {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut assignment = vec![0; n];
    let mut cursor = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &item in &order[cursor..cursor + size] {
            assignment[item] = fold;
        }
        cursor += size;
    }
    Some(assignment)
}

fn image_names(dir: &Path) -> Result<Vec<String>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)));
        if is_image && path.is_file() {
            if let Some(name) = path.file_name().and_then(|n| n.to_str()) {
                names.push(name.to_owned());
            }
        }
    }
    names.sort();
    Ok(names)
}

fn prepare<T: Scalar>(img: Image<T>, height: usize, width: usize, color: ColorMode) -> Result<Image<T>> {
    let img = match color {
        ColorMode::Grayscale => to_grayscale(&img),
        ColorMode::PerChannel if img.channels() == 1 => {
            return Err(Error::UnsupportedFormat("per-channel mode needs RGB images".into()))
        }
        ColorMode::PerChannel => img,
    };
    center_crop_resize(&img, height, width)
}

/// Load pairs from two directories matched by file name, sorted lexicographically.
/// Each image is converted per `color` and center-crop-resized to `height x width`.
pub fn load_paired_dataset<T: Scalar>(
    input_dir: impl AsRef<Path>,
    target_dir: impl AsRef<Path>,
    height: usize,
    width: usize,
    color: ColorMode,
) -> Result<PairedDataset<T>> {
    let (input_dir, target_dir) = (input_dir.as_ref(), target_dir.as_ref());
    let inputs = image_names(input_dir)?;
    let targets = image_names(target_dir)?;
    if let Some(orphan) = inputs.iter().find(|n| targets.binary_search(n).is_err()) {
        return Err(Error::MissingCounterpart(orphan.clone()));
    }
    if let Some(orphan) = targets.iter().find(|n| inputs.binary_search(n).is_err()) {
        return Err(Error::MissingCounterpart(orphan.clone()));
    }
    if inputs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut pairs = Vec::with_capacity(inputs.len());
    for name in &inputs {
        let input = prepare(load_image(input_dir.join(name))?, height, width, color)?;
        let target = prepare(load_image(target_dir.join(name))?, height, width, color)?;
        pairs.push((input, target));
    }
    PairedDataset::from_named_pairs(pairs, inputs)
}

/// [`load_paired_dataset`] on the `<root>/input`, `<root>/target` layout.
pub fn load_dataset_root<T: Scalar>(
    root: impl AsRef<Path>,
    height: usize,
    width: usize,
    color: ColorMode,
) -> Result<PairedDataset<T>> {
    let root = root.as_ref();
    load_paired_dataset(root.join("input"), root.join("target"), height, width, color)
}
