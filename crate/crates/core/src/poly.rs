//! Polynomials represented in degree-graded bases generated by a Hessenberg
//! recurrence `z·q_k = Σ_{j≤k+1} H[j,k]·q_j`.
//!
//! Monomials, discretely orthonormal (Arnoldi) bases and Faber polynomials
//! are all instances; evaluation runs the recurrence, which stays stable
//! at degrees where monomial coefficients are useless.

use std::sync::Arc as Shared;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{from_usize, Real};

/// Which recurrence produced a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    Monomial,
    Orthonormal,
    Faber,
}

impl BasisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BasisKind::Monomial => "monomial",
            BasisKind::Orthonormal => "orthonormal",
            BasisKind::Faber => "faber",
        }
    }
}

/// Basis `q_0, …, q_n` with `q_0` constant.
#[derive(Debug, Clone)]
pub struct HessenbergBasis<T> {
    kind: BasisKind,
    q0: Complex<T>,
    /// `cols[k][j] = H[j,k]` for `j ≤ k+1`.
    cols: Vec<Vec<Complex<T>>>,
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

impl<T: Real> HessenbergBasis<T> {
    /// Builds a basis from its recurrence columns; every subdiagonal entry
    /// must be nonzero so that `q_k` has exact degree `k`.
    pub fn from_columns(kind: BasisKind, q0: Complex<T>, cols: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if q0 == zero() {
            return Err(Error::InvalidArgument("q_0 must be nonzero".into()));
        }
        for (k, c) in cols.iter().enumerate() {
            if c.len() != k + 2 {
                return Err(Error::InvalidArgument(format!("column {k} must have {} entries", k + 2)));
            }
            if c[k + 1] == zero() || !crate::real::is_finite(c[k + 1]) {
                return Err(Error::InvalidArgument(format!("subdiagonal entry {k} is zero or not finite")));
            }
        }
        Ok(Self { kind, q0, cols })
    }

    pub fn monomial(n: usize) -> Self {
        let cols = (0..n)
            .map(|k| {
                let mut c = vec![zero(); k + 2];
                c[k + 1] = one();
                c
            })
            .collect();
        Self { kind: BasisKind::Monomial, q0: one(), cols }
    }

    /// Faber polynomials of the exterior map `Ψ(w) = cap·w + c_0 + c_1/w + …`
    /// from the coefficients `laurent = [c_0, c_1, …]`; requires at least `n`
    /// coefficients.
    pub fn faber(cap: T, laurent: &[Complex<T>], n: usize) -> Result<Self> {
        if laurent.len() < n.max(1) {
            return Err(Error::InvalidArgument(format!(
                "Faber basis of degree {n} needs {} Laurent coefficients, got {}",
                n.max(1),
                laurent.len()
            )));
        }
        let cap_c = Complex::new(cap, T::zero());
        let mut cols = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = vec![zero(); k + 2];
            c[k + 1] = cap_c;
            c[k] = laurent[0];
            for j in 1..k {
                c[k - j] = laurent[j];
            }
            if k >= 1 {
                c[0] = laurent[k] * from_usize::<T>(k + 1);
            }
            cols.push(c);
        }
        Self::from_columns(BasisKind::Faber, one(), cols)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Highest degree available.
    pub fn max_degree(&self) -> usize {
        self.cols.len()
    }

    pub fn q0(&self) -> Complex<T> {
        self.q0
    }

    /// Recurrence entry `H[j,k]` (zero outside the Hessenberg pattern).
    pub fn h(&self, j: usize, k: usize) -> Complex<T> {
        self.cols.get(k).and_then(|c| c.get(j)).copied().unwrap_or_else(zero)
    }

    pub fn columns(&self) -> &[Vec<Complex<T>>] {
        &self.cols
    }

    /// Restriction to degrees `≤ n`.
    pub fn truncated(&self, n: usize) -> Self {
        Self { kind: self.kind, q0: self.q0, cols: self.cols[..n.min(self.cols.len())].to_vec() }
    }

    /// Leading monomial coefficient of `q_k`.
    pub fn leading_coefficient(&self, k: usize) -> Complex<T> {
        self.cols[..k].iter().enumerate().fold(self.q0, |acc, (j, c)| acc / c[j + 1])
    }

    /// Writes `q_0(z), …, q_n(z)` into `out` (length `n+1`).
    pub fn eval_into(&self, z: Complex<T>, out: &mut [Complex<T>]) {
        let n = out.len() - 1;
        assert!(n <= self.max_degree(), "basis degree {} exceeded", self.max_degree());
        out[0] = self.q0;
        for k in 0..n {
            let c = &self.cols[k];
            let mut s = z * out[k];
            for j in 0..=k {
                s -= c[j] * out[j];
            }
            out[k + 1] = s / c[k + 1];
        }
    }

    pub fn eval_all(&self, z: Complex<T>, n: usize) -> Vec<Complex<T>> {
        let mut out = vec![zero(); n + 1];
        self.eval_into(z, &mut out);
        out
    }

    /// Divided differences `δ_k = (q_k(z) − q_k(ζ))/(z − ζ)` for `k ≤ n`,
    /// valid also at `z = ζ` where they become derivatives.
    pub fn divided_differences(&self, z: Complex<T>, zeta: Complex<T>, n: usize) -> Vec<Complex<T>> {
        let qz = self.eval_all(zeta, n);
        let mut d = vec![zero(); n + 1];
        for k in 0..n {
            let c = &self.cols[k];
            let mut s = z * d[k] + qz[k];
            for j in 0..=k {
                s -= c[j] * d[j];
            }
            d[k + 1] = s / c[k + 1];
        }
        d
    }

    /// Monomial coefficients of every `q_k`, `k ≤ n`; row `k` has length `k+1`.
    pub fn monomial_table(&self, n: usize) -> Vec<Vec<Complex<T>>> {
        let mut rows: Vec<Vec<Complex<T>>> = Vec::with_capacity(n + 1);
        rows.push(vec![self.q0]);
        for k in 0..n {
            let c = &self.cols[k];
            let mut next = vec![zero(); k + 2];
            for (i, a) in rows[k].iter().enumerate() {
                next[i + 1] += *a;
            }
            for (j, row) in rows.iter().enumerate().take(k + 1) {
                for (i, a) in row.iter().enumerate() {
                    next[i] -= c[j] * a;
                }
            }
            for v in next.iter_mut() {
                *v = *v / c[k + 1];
            }
            rows.push(next);
        }
        rows
    }
}

/// Polynomial `Σ a_k q_k` in a shared Hessenberg basis.
#[derive(Debug, Clone)]
pub struct BasisPoly<T> {
    basis: Shared<HessenbergBasis<T>>,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> BasisPoly<T> {
    pub fn new(basis: Shared<HessenbergBasis<T>>, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        if coeffs.len() > basis.max_degree() + 1 {
            return Err(Error::DegreeBudget { requested: coeffs.len() - 1, budget: basis.max_degree() });
        }
        Ok(Self { basis, coeffs })
    }

    /// Monomial-basis polynomial from coefficients `[a_0, a_1, …]`.
    pub fn from_monomial(coeffs: Vec<Complex<T>>) -> Self {
        let n = coeffs.len().max(1) - 1;
        let coeffs = if coeffs.is_empty() { vec![zero()] } else { coeffs };
        Self { basis: Shared::new(HessenbergBasis::monomial(n)), coeffs }
    }

    pub fn zero_in(basis: Shared<HessenbergBasis<T>>) -> Self {
        Self { basis, coeffs: vec![zero()] }
    }

    pub fn basis(&self) -> &Shared<HessenbergBasis<T>> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Length of the coefficient vector minus one.
    pub fn nominal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Index of the last nonzero coefficient; `None` for the zero polynomial.
    /// Since `q_k` has exact degree `k`, this is the exact degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != zero())
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let q = self.basis.eval_all(z, self.nominal_degree());
        q.iter().zip(&self.coeffs).fold(zero(), |acc, (a, b)| acc + a * b)
    }

    /// `(p(z) − p(ζ))/(z − ζ)` evaluated through the divided-difference
    /// recurrence; finite at `z = ζ`.
    pub fn divided_difference(&self, z: Complex<T>, zeta: Complex<T>) -> Complex<T> {
        let d = self.basis.divided_differences(z, zeta, self.nominal_degree());
        d.iter().zip(&self.coeffs).fold(zero(), |acc, (a, b)| acc + a * b)
    }

    /// Exact quotient `(p(z) − p(ζ))/(z − ζ)` in the same basis, by
    /// back substitution on the recurrence (synthetic division).
    pub fn divide_at(&self, zeta: Complex<T>) -> Self {
        let n = self.nominal_degree();
        if n == 0 {
            return Self { basis: self.basis.clone(), coeffs: vec![zero()] };
        }
        let mut b = vec![zero(); n];
        for j in (1..=n).rev() {
            // a_j = Σ_{k ≥ j−1} b_k H[j,k] − ζ b_j
            let mut s = self.coeffs[j];
            if j < n {
                s += zeta * b[j];
            }
            for (k, bk) in b.iter().enumerate().skip(j) {
                s -= *bk * self.basis.h(j, k);
            }
            b[j - 1] = s / self.basis.h(j, j - 1);
        }
        Self { basis: self.basis.clone(), coeffs: b }
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Monomial coefficients (ill-conditioned at high degree for most bases).
    pub fn monomial_coefficients(&self) -> Vec<Complex<T>> {
        let n = self.nominal_degree();
        let table = self.basis.monomial_table(n);
        let mut out = vec![zero(); n + 1];
        for (a, row) in self.coeffs.iter().zip(&table) {
            for (i, c) in row.iter().enumerate() {
                out[i] += a * c;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn monomial_recurrence_gives_powers() {
        let b = HessenbergBasis::<f64>::monomial(5);
        let z = c(0.3, -1.1);
        let q = b.eval_all(z, 5);
        for (k, v) in q.iter().enumerate() {
            assert!((v - z.powu(k as u32)).norm() < 1e-14);
        }
    }

    #[test]
    fn segment_faber_is_twice_chebyshev() {
        let laurent = vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let b = HessenbergBasis::faber(0.5, &laurent, 5).unwrap();
        let x = 0.37f64;
        let q = b.eval_all(c(x, 0.0), 5);
        assert_eq!(q[0], c(1.0, 0.0));
        for k in 1..=5 {
            let t = (k as f64 * x.acos()).cos();
            assert!((q[k].re - 2.0 * t).abs() < 1e-13, "k={k}");
        }
        let table = b.monomial_table(2);
        assert_eq!(table[2], vec![c(-2.0, 0.0), c(0.0, 0.0), c(4.0, 0.0)]);
        assert!((b.leading_coefficient(3) - c(8.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn divided_difference_matches_quotient() {
        let p = BasisPoly::from_monomial(vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5), c(0.25, 0.0)]);
        let z = c(0.4, 0.9);
        let zeta = c(-1.3, 0.2);
        let direct = (p.eval(z) - p.eval(zeta)) / (z - zeta);
        assert!((p.divided_difference(z, zeta) - direct).norm() < 1e-13);
        let q = p.divide_at(zeta);
        assert!((q.eval(z) - direct).norm() < 1e-13);
        assert_eq!(q.degree(), Some(2));
    }

    #[test]
    fn synthetic_division_in_faber_basis() {
        let laurent: Vec<C> = (0..8).map(|k| c(0.1 / (k as f64 + 1.0), 0.05 * k as f64)).collect();
        let basis = Shared::new(HessenbergBasis::faber(0.7, &laurent, 7).unwrap());
        let coeffs: Vec<C> = (0..8).map(|k| c((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let p = BasisPoly::new(basis, coeffs).unwrap();
        let zeta = c(0.2, 1.4);
        let q = p.divide_at(zeta);
        for z in [c(0.1, 0.1), c(-0.5, 0.3), c(0.9, -0.2)] {
            let lhs = q.eval(z) * (z - zeta);
            let rhs = p.eval(z) - p.eval(zeta);
            assert!((lhs - rhs).norm() < 1e-11 * rhs.norm().max(1.0));
        }
        // at z = ζ the quotient is p'(ζ)
        let h = 1e-6;
        let fd = (p.eval(zeta + h) - p.eval(zeta - h)) / (2.0 * h);
        assert!((q.eval(zeta) - fd).norm() < 1e-6 * fd.norm());
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        let p = BasisPoly::from_monomial(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(p.nominal_degree(), 2);
        let z = BasisPoly::from_monomial(vec![c(0.0, 0.0)]);
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn monomial_round_trip_through_table() {
        let laurent: Vec<C> = vec![c(0.2, 0.0), c(0.3, 0.1), c(0.0, 0.0), c(0.1, 0.0)];
        let basis = Shared::new(HessenbergBasis::faber(1.5, &laurent, 4).unwrap());
        let p = BasisPoly::new(basis, vec![c(1.0, 0.0), c(0.5, 0.0), c(0.0, 1.0), c(0.25, 0.0), c(0.1, 0.0)]).unwrap();
        let mono = BasisPoly::from_monomial(p.monomial_coefficients());
        let z = c(0.7, -0.4);
        assert!((mono.eval(z) - p.eval(z)).norm() < 1e-12);
    }
}
