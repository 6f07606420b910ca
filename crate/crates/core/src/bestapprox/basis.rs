use std::sync::Arc as Shared;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
use crate::poly::{BasisKind, BasisPoly, HessenbergBasis};
use crate::real::{from_usize, lit, Real};

/// Degree-graded basis orthonormal for `⟨u, v⟩ = Σ_i conj(u(z_i)) v(z_i)`
/// over a node set, built by Arnoldi iteration with full
/// reorthogonalization. Columns hold the basis values at the nodes.
#[derive(Debug, Clone)]
pub struct OrthonormalBasis<T> {
    pub recurrence: Shared<HessenbergBasis<T>>,
    pub columns: Vec<Vec<Complex<T>>>,
}

impl<T: Real> OrthonormalBasis<T> {
    pub fn new(nodes: &[Complex<T>], n: usize) -> Result<Self> {
        let m = nodes.len();
        if m < n + 1 {
            return Err(Error::RankDeficient(format!("{m} nodes cannot carry degree {n}")));
        }
        let q0 = Complex::new(T::one() / from_usize::<T>(m).sqrt(), T::zero());
        let mut columns = vec![vec![q0; m]];
        let mut hcols = Vec::with_capacity(n);
        for k in 0..n {
            let mut v: Vec<Complex<T>> = nodes.iter().zip(&columns[k]).map(|(z, q)| z * q).collect();
            let mut h = vec![Complex::new(T::zero(), T::zero()); k + 2];
            for _ in 0..2 {
                for (j, qj) in columns.iter().enumerate() {
                    let c = dot(qj, &v);
                    h[j] += c;
                    for (vi, qi) in v.iter_mut().zip(qj) {
                        *vi -= qi * c;
                    }
                }
            }
            let nv = norm2(&v);
            let scale = nodes.iter().map(|z| z.norm()).fold(T::zero(), T::max).max(T::one());
            if !(nv > scale * T::epsilon() * lit(1e3)) {
                return Err(Error::RankDeficient(format!("Arnoldi breakdown at degree {}", k + 1)));
            }
            h[k + 1] = Complex::new(nv, T::zero());
            for vi in v.iter_mut() {
                *vi = *vi / nv;
            }
            columns.push(v);
            hcols.push(h);
        }
        let recurrence = Shared::new(HessenbergBasis::from_columns(BasisKind::Orthonormal, q0, hcols)?);
        Ok(Self { recurrence, columns })
    }

    pub fn degree(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.columns[0].len()
    }

    /// `max |G − I|` for the Gram matrix `G = QᴴQ`.
    pub fn gram_deviation(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.columns.iter().enumerate() {
            for (j, b) in self.columns.iter().enumerate() {
                let g = dot(a, b);
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g - Complex::new(target, T::zero())).norm());
            }
        }
        worst
    }

    /// Condition number of the Gram matrix, `(1+δ)/(1−δ)` with `δ` the Gram
    /// deviation bound (Gershgorin).
    pub fn gram_condition(&self) -> T {
        let k = from_usize::<T>(self.columns.len());
        let delta = self.gram_deviation() * k;
        if delta >= T::one() {
            T::infinity()
        } else {
            (T::one() + delta) / (T::one() - delta)
        }
    }

    /// Orthogonal projection coefficients `Qᴴ v` onto degrees `≤ n`.
    pub fn project(&self, values: &[Complex<T>], n: usize) -> Vec<Complex<T>> {
        self.columns[..=n].iter().map(|q| dot(q, values)).collect()
    }

    /// Values `Σ c_k q_k` at the nodes.
    pub fn combine(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let m = self.node_count();
        let mut out = vec![Complex::new(T::zero(), T::zero()); m];
        for (c, q) in coeffs.iter().zip(&self.columns) {
            for (o, v) in out.iter_mut().zip(q) {
                *o += v * c;
            }
        }
        out
    }

    /// Polynomial with the given coefficients in this basis.
    pub fn poly(&self, coeffs: Vec<Complex<T>>) -> Result<BasisPoly<T>> {
        BasisPoly::new(self.recurrence.clone(), coeffs)
    }
}
