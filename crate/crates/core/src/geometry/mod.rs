//! Arcs, piecewise analytic functions and lemniscates.

pub mod arc;
pub mod function;
pub mod lemniscate;

pub use arc::{Arc, Piece};
pub use function::{Branch, BranchFn, PiecewiseAnalyticFunction};
pub use lemniscate::{Lemniscate, LemniscateSide};
