//! Small dense linear algebra: complex Householder least squares and a real
//! pivoted solver. Matrices are stored column by column.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Solution of a least-squares problem `min ‖A x − b‖₂`.
#[derive(Debug, Clone)]
pub struct LeastSquares<T> {
    pub x: Vec<Complex<T>>,
    pub residual_norm: T,
    /// `max |R_kk| / min |R_kk|`, a cheap conditioning indicator.
    pub diag_ratio: T,
}

/// Householder QR least squares. `cols[j]` is column `j` of `A`; every column
/// must have the same length `m ≥ cols.len()`.
pub fn least_squares<T: Real>(cols: &[Vec<Complex<T>>], b: &[Complex<T>]) -> Result<LeastSquares<T>> {
    let n = cols.len();
    let m = b.len();
    if n == 0 {
        return Ok(LeastSquares { x: vec![], residual_norm: norm2(b), diag_ratio: T::one() });
    }
    if m < n || cols.iter().any(|c| c.len() != m) {
        return Err(Error::InvalidArgument(format!(
            "least squares needs {n} columns of equal length ≥ {n}, right-hand side has {m}"
        )));
    }
    let mut a: Vec<Vec<Complex<T>>> = cols.to_vec();
    let mut rhs = b.to_vec();
    let mut diag = vec![Complex::new(T::zero(), T::zero()); n];
    for k in 0..n {
        let (head, tail) = a.split_at_mut(k + 1);
        let col = &mut head[k];
        let norm = norm2(&col[k..]);
        if norm == T::zero() {
            diag[k] = Complex::new(T::zero(), T::zero());
            continue;
        }
        let x0 = col[k];
        let phase = if x0.norm() > T::zero() { x0 / x0.norm() } else { Complex::new(T::one(), T::zero()) };
        let alpha = -phase * norm;
        col[k] -= alpha;
        let vnorm = norm2(&col[k..]);
        for v in col[k..].iter_mut() {
            *v = *v / vnorm;
        }
        let v = &col[k..];
        for other in tail.iter_mut() {
            reflect(v, &mut other[k..]);
        }
        reflect(v, &mut rhs[k..]);
        diag[k] = alpha;
    }
    let dmax = diag.iter().map(|d| d.norm()).fold(T::zero(), T::max);
    let dmin = diag.iter().map(|d| d.norm()).fold(T::infinity(), T::min);
    if dmin <= dmax * T::epsilon() * lit(16.0) {
        return Err(Error::RankDeficient(format!(
            "triangular factor has diagonal ratio {:e}",
            (dmin / dmax).to_f64().unwrap_or(0.0)
        )));
    }
    // back substitution; R's strict upper part lives in a[j][i] for i < j
    let mut x = vec![Complex::new(T::zero(), T::zero()); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= a[j][i] * x[j];
        }
        x[i] = s / diag[i];
    }
    let residual_norm = norm2(&rhs[n..]);
    Ok(LeastSquares { x, residual_norm, diag_ratio: dmax / dmin })
}

fn reflect<T: Real>(v: &[Complex<T>], y: &mut [Complex<T>]) {
    let mut dot = Complex::new(T::zero(), T::zero());
    for (vi, yi) in v.iter().zip(y.iter()) {
        dot += vi.conj() * yi;
    }
    let two = dot * lit::<T>(2.0);
    for (vi, yi) in v.iter().zip(y.iter_mut()) {
        *yi -= vi * two;
    }
}

/// Euclidean norm with scaling against overflow.
pub fn norm2<T: Real>(v: &[Complex<T>]) -> T {
    let scale = v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(T::zero(), T::max);
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = v.iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// `Σ conj(a_i) b_i`.
pub fn dot<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Solves the real square system `A x = b` (row-major `a`) by Gaussian
/// elimination with partial pivoting.
pub fn solve_real<T: Real>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("solve_real expects a square system".into()));
    }
    let scale = a.iter().flatten().map(|x| x.abs()).fold(T::zero(), T::max);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().partial_cmp(&a[j][k].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(k);
        if a[p][k].abs() <= scale * T::epsilon() * lit(8.0) || !a[p][k].is_finite() {
            return Err(Error::RankDeficient("singular real system".into()));
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
            let t = b[k];
            b[i] -= f * t;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}

/// Ordinary least-squares line `y ≈ a + b x` with coefficient of determination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    Some(LineFit { intercept, slope, r_squared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn least_squares_recovers_exact_solution() {
        let cols = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)],
        ];
        let truth = [Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.25)];
        let b: Vec<_> = (0..3).map(|i| cols[0][i] * truth[0] + cols[1][i] * truth[1]).collect();
        let ls = least_squares(&cols, &b).unwrap();
        for (x, t) in ls.x.iter().zip(truth) {
            assert!((x - t).norm() < 1e-14);
        }
        assert!(ls.residual_norm < 1e-14);
    }

    #[test]
    fn least_squares_residual_is_orthogonal_complement() {
        // fit a constant to {0, 1, 2}: mean 1, residual √2
        let cols = vec![vec![Complex64::new(1.0, 0.0); 3]];
        let b = [0.0, 1.0, 2.0].map(|v| Complex64::new(v, 0.0));
        let ls = least_squares(&cols, &b).unwrap();
        assert!((ls.x[0].re - 1.0).abs() < 1e-15);
        assert!((ls.residual_norm - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rank_deficiency_detected() {
        let c = vec![Complex64::new(1.0, 0.0); 4];
        assert!(matches!(least_squares(&[c.clone(), c], &[Complex64::new(1.0, 0.0); 4]), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn real_solver_pivots() {
        let x: Vec<f64> = solve_real(vec![vec![0.0, 2.0], vec![3.0, 1.0]], vec![4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn line_fit_exact() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14 && (f.intercept - 3.0).abs() < 1e-14);
        assert_eq!(f.r_squared, 1.0);
    }
}
