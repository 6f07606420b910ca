use num_complex::Complex;

use super::basis::OrthonormalBasis;
use crate::error::Result;
use crate::linalg::least_squares;
use crate::real::{lit, Real};

/// Default stopping tolerance on the relative change of the maximal residual.
pub const LAWSON_TOL: f64 = 1e-8;
pub const LAWSON_MAX_ITER: usize = 500;
/// Relative bracket width at which the iteration stops early.
pub const BRACKET_STOP: f64 = 1e-2;
/// Relative bracket width below which a result counts as converged.
pub const BRACKET_ACCEPT: f64 = 0.05;

/// Outcome of a Lawson solve.
#[derive(Debug, Clone)]
pub struct MinimaxResult<T> {
    pub degree: usize,
    /// Coefficients in the orthonormal basis.
    pub coeffs: Vec<Complex<T>>,
    /// Discrete sup-norm error of the returned coefficients.
    pub e_n: T,
    /// Lawson lower bound on the discrete minimax error.
    pub lower: T,
    pub residual: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> MinimaxResult<T> {
    /// `(E_n − lower)/E_n`.
    pub fn bracket_width(&self) -> T {
        if self.e_n > T::zero() {
            (self.e_n - self.lower) / self.e_n
        } else {
            T::zero()
        }
    }
}

/// Iteratively reweighted least squares with updates `w ← w·|r|^γ`,
/// `γ ∈ [1, 2]` raised while progress stalls. Each pass solves the weighted
/// problem by Householder QR on rows with non-negligible weight.
pub fn lawson_minimax<T: Real>(
    values: &[Complex<T>],
    basis: &OrthonormalBasis<T>,
    n: usize,
    tol: T,
    max_iter: usize,
) -> Result<MinimaxResult<T>> {
    let m = values.len();
    let scale = values.iter().map(|v| v.norm()).fold(T::zero(), T::max);
    let floor = scale.max(T::min_positive_value()) * lit(1e-14);
    let mut w = vec![T::one() / T::from(m).unwrap(); m];
    let mut best: Option<(T, Vec<Complex<T>>, Vec<T>)> = None;
    let mut best_lower = T::zero();
    let mut gamma = T::one();
    let mut last_e = T::infinity();
    let mut stall = 0usize;
    let mut iterations = 0usize;
    for it in 0..max_iter.max(1) {
        iterations = it + 1;
        let wmax = w.iter().copied().fold(T::zero(), T::max);
        let active: Vec<usize> = (0..m).filter(|&i| w[i] > wmax * lit(1e-16)).collect();

        let wsum: T = active.iter().map(|&i| w[i]).sum();
        let cols: Vec<Vec<Complex<T>>> = basis.columns[..=n]
            .iter()
            .map(|q| active.iter().map(|&i| q[i] * (w[i] / wsum).sqrt()).collect())
            .collect();
        let rhs: Vec<Complex<T>> = active.iter().map(|&i| values[i] * (w[i] / wsum).sqrt()).collect();
        let coeffs = if active.len() > n {
            match least_squares(&cols, &rhs) {
                Ok(ls) => ls.x,
                Err(_) => break,
            }
        } else {
            break;
        };
        let fit = basis.combine(&coeffs);
        let r: Vec<T> = values.iter().zip(&fit).map(|(v, p)| (v - p).norm()).collect();
        let e = r.iter().copied().fold(T::zero(), T::max);
        let lower = active.iter().map(|&i| w[i] / wsum * r[i] * r[i]).sum::<T>().sqrt();
        best_lower = best_lower.max(lower.min(e));
        if best.as_ref().is_none_or(|b| e < b.0) {
            best = Some((e, coeffs, r.clone()));
        }
        let upper = best.as_ref().map(|b| b.0).unwrap_or(e);
        if upper <= floor {
            best_lower = best_lower.min(upper);
            break;
        }
        if (upper - best_lower) / upper < lit(BRACKET_STOP) {
            break;
        }
        let change = (last_e - e).abs() / e;
        if change < tol {
            break;
        }
        if e >= last_e * (T::one() - lit(1e-3)) {
            stall += 1;
            if stall >= 3 {
                gamma = (gamma * lit(1.25)).min(lit(2.0));
                stall = 0;
            }
        } else {
            stall = 0;
        }
        if e > last_e {
            gamma = (gamma / lit(1.5)).max(T::one());
        }
        last_e = e;
        let rmax = e.max(T::min_positive_value());
        let mut total = T::zero();
        for (wi, ri) in w.iter_mut().zip(&r) {
            *wi *= (*ri / rmax).powf(gamma);
            total += *wi;
        }
        if !(total > T::zero()) {
            break;
        }
        for wi in w.iter_mut() {
            *wi /= total;
        }
    }
    let (e_n, coeffs, residual) = best.unwrap_or_else(|| (scale, vec![Complex::new(T::zero(), T::zero()); n + 1], vec![]));
    let lower = best_lower.min(e_n);
    let width = if e_n > T::zero() { (e_n - lower) / e_n } else { T::zero() };
    let converged = e_n <= floor || width < lit(BRACKET_ACCEPT);
    Ok(MinimaxResult { degree: n, coeffs, e_n, lower, residual, iterations, converged })
}
