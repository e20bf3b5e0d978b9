use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("continua E and F overlap ({cells} shared grid cells)")]
    OverlappingContinua { cells: usize },
    #[error("degenerate shape: {0}")]
    DegenerateShape(String),
    #[error("shape lies outside the grid bounds: {0}")]
    OutOfBounds(String),
    #[error("invalid capacitor spec: {0}")]
    InvalidSpec(String),
    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("interior does not separate E from F")]
    DisconnectedDomain,
    #[error("|z| = {modulus} lies outside the annulus [{inner}, {outer}]")]
    OutOfAnnulus { modulus: f64, inner: f64, outer: f64 },
    #[error("no closed level curve separating E from F at level {0}")]
    LevelNotFound(f64),
    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("validity condition failed: {0}")]
    ValidityCondition(String),
    #[error("stage {stage} ({name}) received a point outside its domain: {detail}")]
    DomainViolation {
        stage: usize,
        name: &'static str,
        detail: String,
    },
    #[error("non-positive Jacobian {0:e}")]
    DegenerateJacobian(f64),
    #[error("quadrature failed to reach tolerance {tolerance:e} (estimate {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },
    #[error("level {0} is not present in the report")]
    MissingLevel(f64),
    #[error("report has no level curves")]
    EmptyReport,
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through stage attribution.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for errors caused by bad numerics rather than bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NonConvergence { .. }
                | Error::DisconnectedDomain
                | Error::LevelNotFound(_)
                | Error::DegenerateJacobian(_)
                | Error::QuadratureFailure { .. }
                | Error::ResolutionTooCoarse(_)
                | Error::DegenerateCurve(_)
        )
    }
}
