use thiserror::Error;

/// Errors produced by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScemError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("kernel of size {kernel:?} does not fit target {target:?}")]
    KernelTooLarge {
        kernel: (usize, usize),
        target: (usize, usize),
    },

    #[error("negative input value {0} where non-negative values are required")]
    NegativeInput(f64),

    #[error("image {found:?} is smaller than the {window}x{window} window")]
    ImageTooSmall { found: (usize, usize), window: usize },

    #[error("timestep {t} outside 1..={t_max}")]
    TimestepOutOfRange { t: usize, t_max: usize },

    #[error("unexpected channel count: expected {expected}, found {found}")]
    ChannelCount { expected: usize, found: usize },

    #[error("denoiser failed: {0}")]
    Denoiser(String),

    #[error("feature extractor failed: {0}")]
    FeatureExtractor(String),
}

pub type Result<T> = std::result::Result<T, ScemError>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> ScemError {
    ScemError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
