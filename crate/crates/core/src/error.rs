//! Crate-wide error type.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension {got} unsupported here (need at least {need})")]
    DimensionTooLow { need: usize, got: usize },

    #[error("grid cell size {h} too coarse for radius {eps} (need h <= eps/4)")]
    GridTooCoarse { h: f64, eps: f64 },

    #[error("mesh {mesh} too coarse to resolve separation {sep} (need mesh < sep/4)")]
    MeshTooCoarse { mesh: f64, sep: f64 },

    #[error("path has no points")]
    EmptyPath,

    #[error("operation requires a {expected} path")]
    WrongPathKind { expected: &'static str },

    #[error("({a}, {b}) is not a vertex of the pre-gasket")]
    InvalidGasketAddress { a: i64, b: i64 },

    #[error("occupancy cell index out of the packable range")]
    CellIndexOverflow,

    #[error("least-squares design matrix is singular")]
    SingularFit,
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
