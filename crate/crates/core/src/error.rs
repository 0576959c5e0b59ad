use thiserror::Error;

/// Everything that can go wrong while building bodies or running a check.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested constant normal curvature is not attained by any compact
    /// geodesic sphere of the model space.
    #[error(
        "no compact comparison sphere: curvature {lambda} in M({c}) requires lambda > sqrt(-c) = {bound}"
    )]
    NoCompactSphere { c: f64, lambda: f64, bound: f64 },

    /// The reference point sits deeper inside the body than the comparison
    /// sphere allows.
    #[error(
        "comparison point too deep: d = {d} exceeds the comparison radius {r}; \
         choose O closer to the boundary (for instance an offset body)"
    )]
    Feasibility { d: f64, r: f64 },

    /// A theorem hypothesis does not hold for the configured body.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Sampling is too coarse to resolve the geometry.
    #[error("under-resolved: {0}")]
    Resolution(String),

    /// A point left the regularity region of the polar chart.
    #[error("chart error: {0}")]
    Chart(String),

    /// Malformed or inconsistent scene description.
    #[error("scene error: {0}")]
    Scene(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code class: 1 for failed hypotheses, 2 for bad input or IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Feasibility { .. } | Error::Hypothesis(_) => 1,
            _ => 2,
        }
    }

    /// Short machine-readable label used in reports.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::NoCompactSphere { .. } => "no_compact_sphere",
            Error::Feasibility { .. } => "feasibility",
            Error::Hypothesis(_) => "hypothesis",
            Error::Resolution(_) => "resolution",
            Error::Chart(_) => "chart",
            Error::Scene(_) => "scene",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
