use crate::error::{Dims, Result};
use crate::image::Image;
use crate::kernel::PixelKrModel;
use crate::linear::{FullRrModel, PixelRrModel};
use crate::scalar::Scalar;

/// A trained image-to-image mapping.
pub trait Regressor<T: Scalar> {
    fn dims(&self) -> Dims;

    /// Map one input image; outputs are clamped into `[0, 1]`.
    fn apply(&self, img: &Image<T>) -> Result<Image<T>>;

    /// Learned parameter count as reported for model-size comparisons.
    fn parameter_count(&self) -> usize;

    /// Scalars stored in the serialized payload, excluding header fields.
    fn stored_values(&self) -> usize {
        self.parameter_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    PixelRr,
    PixelKr,
    FullRr,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::PixelRr => "pixel-rr",
            Method::PixelKr => "pixel-kr",
            Method::FullRr => "full-rr",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Any of the three model kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel<T> {
    PixelRr(PixelRrModel<T>),
    PixelKr(PixelKrModel<T>),
    FullRr(FullRrModel<T>),
}

impl<T: Scalar> AnyModel<T> {
    pub fn method(&self) -> Method {
        match self {
            AnyModel::PixelRr(_) => Method::PixelRr,
            AnyModel::PixelKr(_) => Method::PixelKr,
            AnyModel::FullRr(_) => Method::FullRr,
        }
    }

    pub fn lambda(&self) -> T {
        match self {
            AnyModel::PixelRr(m) => m.lambda(),
            AnyModel::PixelKr(m) => m.lambda(),
            AnyModel::FullRr(m) => m.lambda(),
        }
    }

    pub fn sigma(&self) -> Option<T> {
        match self {
            AnyModel::PixelKr(m) => Some(m.sigma()),
            _ => None,
        }
    }

    fn inner(&self) -> &dyn Regressor<T> {
        match self {
            AnyModel::PixelRr(m) => m,
            AnyModel::PixelKr(m) => m,
            AnyModel::FullRr(m) => m,
        }
    }
}

impl<T: Scalar> Regressor<T> for AnyModel<T> {
    fn dims(&self) -> Dims {
        self.inner().dims()
    }

    fn apply(&self, img: &Image<T>) -> Result<Image<T>> {
        self.inner().apply(img)
    }

    fn parameter_count(&self) -> usize {
        self.inner().parameter_count()
    }

    fn stored_values(&self) -> usize {
        self.inner().stored_values()
    }
}

impl<T> From<PixelRrModel<T>> for AnyModel<T> {
    fn from(m: PixelRrModel<T>) -> Self {
        AnyModel::PixelRr(m)
    }
}

impl<T> From<PixelKrModel<T>> for AnyModel<T> {
    fn from(m: PixelKrModel<T>) -> Self {
        AnyModel::PixelKr(m)
    }
}

impl<T> From<FullRrModel<T>> for AnyModel<T> {
    fn from(m: FullRrModel<T>) -> Self {
        AnyModel::FullRr(m)
    }
}
