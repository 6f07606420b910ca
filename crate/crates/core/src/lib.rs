//! Near-best polynomial approximation of piecewise analytic functions on
//! arcs in the complex plane.

pub mod bestapprox;
pub mod conformal;
pub mod constructor;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod real;

pub use error::{Error, Result};
pub use real::Real;

pub type Complex = num_complex::Complex<f64>;

/// Double-precision instantiations.
pub type Arc = geometry::Arc<f64>;
pub type PiecewiseAnalyticFunction = geometry::PiecewiseAnalyticFunction<f64>;
pub type Branch = geometry::Branch<f64>;
pub type Lemniscate = geometry::Lemniscate<f64>;
pub type ExteriorMap = conformal::ExteriorMap<f64>;
pub type MinimaxProblem = bestapprox::MinimaxProblem<f64>;
pub type MinimaxResult = bestapprox::MinimaxResult<f64>;
pub type Scenario = constructor::Scenario<f64>;
pub type NearBestPolynomial = constructor::NearBestPolynomial<f64>;
pub type StraighteningMap = constructor::StraighteningMap<f64>;
pub type Mode = constructor::Mode<f64>;
