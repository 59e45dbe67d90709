use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("invalid space parameters: {0}")]
    Params(String),

    #[error("point {point:?} is outside the {chart} chart domain")]
    Domain { chart: &'static str, point: [f64; 4] },

    #[error("degenerate immersion at ({u}, {v}): |phi_u ^ phi_v| = {norm:e}")]
    Rank { u: f64, v: f64, norm: f64 },

    #[error("coordinates are not isothermal at ({u}, {v}): residual {residual:e}")]
    NotIsothermal { u: f64, v: f64, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("grid too small: need at least {need} nodes per axis, got {nu}x{nv}")]
    SmallGrid { need: usize, nu: usize, nv: usize },

    #[error("curve is not regular at s = {s}")]
    Irregular { s: f64 },

    #[error("intersection traces disagree by {gap:e} at sample {index}")]
    TraceMismatch { index: usize, gap: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("bad specification: {0}")]
    Spec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GeomError>;
