use thiserror::Error;

/// Every failure the analysis and verification layers can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown family tag `{0}`")]
    UnknownFamily(String),

    #[error("polynomial degree {0} exceeds the cap of 4")]
    DegreeTooHigh(usize),

    #[error("cannot parse coefficient `{0}`")]
    BadCoefficient(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("angular speed {theta_dot:.3e} fell below omega/2 (r = {r}, eps = {eps})")]
    ScalingSingularity { theta_dot: f64, r: f64, eps: f64 },

    #[error("parameters are not in family {family}: {detail}")]
    FamilyMismatch { family: String, detail: String },

    #[error("order {requested} unavailable, system carries order {available}")]
    OrderUnavailable { requested: usize, available: usize },

    #[error("no closed form tabulated for family {family} at order {order}")]
    NotTabulated { family: String, order: usize },

    #[error("lower-right Jacobian block is degenerate ({0:.3e})")]
    DegenerateDelta(f64),

    #[error("first bifurcation function vanishes identically")]
    FlatF1,

    #[error("real part of the eigenvalue path does not change sign on the scan interval")]
    NoCrossing,

    #[error("transversality fails: |alpha'(mu0)| = {0:.3e}")]
    TransversalityFail(f64),

    #[error("determinant of the coefficient Jacobian is degenerate ({0:.3e})")]
    DegenerateDet(f64),

    #[error("step limit of {0} exceeded")]
    StepLimitExceeded(usize),

    #[error("step size collapsed to {h:.3e} at t = {t}")]
    StiffnessSuspected { t: f64, h: f64 },

    #[error("section crossing speed {0:.3e} too small")]
    LostTransversality(f64),

    #[error("no section crossing before t = {0}")]
    NoReturn(f64),

    #[error("Newton iteration failed after {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("return-map iterate left the bounding box at index {0}")]
    Diverged(usize),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
