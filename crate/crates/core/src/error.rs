use thiserror::Error;

/// Failures surfaced by buffer construction and the recursion driver.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("invalid dimensions {width}x{height}: both must be at least 1")]
    InvalidDimensions { width: usize, height: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),
}
