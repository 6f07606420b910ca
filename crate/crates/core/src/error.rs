use thiserror::Error;

/// Errors raised by the approximation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arc parameter {t} outside [{lo}, {hi}]")]
    ParameterOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("degenerate arc: {0}")]
    DegenerateArc(String),

    #[error("unsupported arc shape: {0}")]
    UnsupportedArc(String),

    #[error("conformal map reached accuracy {achieved:e}, requested {requested:e}")]
    MapAccuracy { achieved: f64, requested: f64 },

    #[error("point {0} lies on the arc; a side tag is required")]
    OnArc(String),

    #[error("|w| = {0} is inside the closed unit disk")]
    InsideDisk(f64),

    #[error("no derivative mismatch up to order {0}: analytic continuation suspected")]
    AnalyticContinuation(usize),

    #[error("compact set touches the lemniscate (d = {0:e})")]
    TouchesLemniscate(f64),

    #[error("lemniscate not admissible: {0}")]
    InadmissibleLemniscate(String),

    #[error("degree {requested} exceeds the stability budget {budget}")]
    DegreeBudget { requested: usize, budget: usize },

    #[error("degree budget violated: {0}")]
    DegreeViolation(String),

    #[error("damping exponent is zero for n = {n} (threshold n_min = {n_min})")]
    ZeroExponent { n: usize, n_min: usize },

    #[error("division anchor invalid: g(zeta) = 0")]
    DivisionAnchor,

    #[error("rank deficient basis: {0}")]
    RankDeficient(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("fit unreliable: {0}")]
    UnreliableFit(String),

    #[error("no admissible parameters: {0}")]
    NoAdmissibleParameters(String),

    #[error("classification failed: {0}")]
    Classification(String),

    #[error("solver failed: {0}")]
    Solver(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
