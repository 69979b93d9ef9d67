//! Protocol defaults.

/// Regularization used when none is given.
pub const DEFAULT_LAMBDA: f64 = 0.4;
pub const DEFAULT_HEIGHT: usize = 128;
pub const DEFAULT_WIDTH: usize = 128;
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_SEED: u64 = 7;

pub const DEFAULT_LAMBDA_GRID: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6];
pub const DEFAULT_SIGMA_GRID: [f64; 6] = [0.5, 1.0, 2.0, 3.0, 5.0, 10.0];

/// Which expression pair a model maps between; selects the default bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExpressionMapping {
    #[default]
    NeutralToHappy,
    Other,
}

impl ExpressionMapping {
    pub fn default_sigma(self) -> f64 {
        match self {
            ExpressionMapping::NeutralToHappy => 3.0,
            ExpressionMapping::Other => 10.0,
        }
    }
}
