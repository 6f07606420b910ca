//! Polynomial kernels in `z` approximating the Cauchy kernel `1/(ζ − z)`:
//! the truncated Faber expansion, and its lemniscate- and wedge-damped
//! assemblies.
//!
//! The damped kernels are kept in factored form: the first term
//! `(1 − g(z))/(ζ − z)` with `g = w^m` is evaluated as
//! `DD(z,ζ)/den · Σ_{i<m} w^i` using a divided difference of the underlying
//! polynomial, so no cancellation occurs near `z = ζ`. Explicit coefficients
//! are available for checking at moderate degree.

use std::sync::Arc as Shared;

use num_complex::Complex;

use crate::conformal::ExteriorMap;
use crate::error::{Error, Result};
use crate::geometry::Lemniscate;
use crate::poly::{BasisPoly, HessenbergBasis};
use crate::real::Real;

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Coefficients `Φ'(ζ)/Φ(ζ)^{k+1}`, `k = 0..=n`, of the truncated Faber
/// expansion of the Cauchy kernel, from `w = Φ(ζ)` and `Φ'(ζ)`.
pub fn faber_kernel_coefficients<T: Real>(w: Complex<T>, dphi: Complex<T>, n: usize) -> Vec<Complex<T>> {
    let inv = w.inv();
    let mut c = Vec::with_capacity(n + 1);
    let mut a = dphi * inv;
    for _ in 0..=n {
        c.push(a);
        a *= inv;
    }
    c
}

/// Polynomial kernel `K_n(ζ, ·)` with explicit coefficients in a tagged basis.
#[derive(Debug, Clone)]
pub struct PolynomialKernel<T> {
    pub zeta: Complex<T>,
    pub degree_bound: usize,
    pub poly: BasisPoly<T>,
}

impl<T: Real> PolynomialKernel<T> {
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.poly.eval(z)
    }

    /// Exact degree from the coefficient vector.
    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }
}

/// Truncated Faber kernel `Σ_{k≤n} F_k(z)·Φ'(ζ)/Φ(ζ)^{k+1}`.
pub fn dzyadyk_kernel<T: Real>(
    map: &ExteriorMap<T>,
    basis: &Shared<HessenbergBasis<T>>,
    zeta: Complex<T>,
    n: usize,
) -> Result<PolynomialKernel<T>> {
    let w = map.phi(zeta)?;
    if w.norm() <= T::one() + map.accuracy() {
        return Err(Error::InvalidArgument("ζ lies on the closure of the slit".into()));
    }
    let dphi = map.psi_prime(w)?.inv();
    dzyadyk_kernel_from(basis, zeta, w, dphi, n)
}

/// Same kernel when `Φ(ζ)` and `Φ'(ζ)` are already known.
pub fn dzyadyk_kernel_from<T: Real>(
    basis: &Shared<HessenbergBasis<T>>,
    zeta: Complex<T>,
    w: Complex<T>,
    dphi: Complex<T>,
    n: usize,
) -> Result<PolynomialKernel<T>> {
    if n > basis.max_degree() {
        return Err(Error::DegreeBudget { requested: n, budget: basis.max_degree() });
    }
    let coeffs = faber_kernel_coefficients(w, dphi, n);
    Ok(PolynomialKernel { zeta, degree_bound: n, poly: BasisPoly::new(basis.clone(), coeffs)? })
}

/// `(1 − g(z)/g(ζ))/(ζ − z)` as an explicit polynomial, by synthetic division.
pub fn poly_divide_vanishing<T: Real>(g: &BasisPoly<T>, zeta: Complex<T>) -> Result<BasisPoly<T>> {
    let gz = g.eval(zeta);
    if gz == zero() || !crate::real::is_finite(gz) {
        return Err(Error::DivisionAnchor);
    }
    Ok(g.divide_at(zeta).scaled(gz.inv()))
}

/// Damping variant and its exponent data.
#[derive(Debug, Clone, PartialEq)]
pub enum DampingKind {
    Lemniscate { n_roots: usize },
    Wedge { kappa: usize, beta: f64, zeta0: f64, q_degree: usize },
}

/// Damping factor `g(z, ζ) = w(z, ζ)^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DampingFactor {
    pub kind: DampingKind,
    pub n: usize,
    pub m: usize,
    /// Degree of `g` in `z`.
    pub degree: usize,
    /// Smallest `n` with `m ≥ 1`.
    pub n_min: usize,
}

impl DampingFactor {
    /// `m = ⌊n/(2N)⌋`.
    pub fn lemniscate(n_roots: usize, n: usize) -> Result<Self> {
        if n_roots == 0 {
            return Err(Error::InvalidArgument("lemniscate needs N ≥ 1".into()));
        }
        let m = n / (2 * n_roots);
        let n_min = 2 * n_roots;
        if m == 0 {
            return Err(Error::ZeroExponent { n, n_min });
        }
        Ok(Self { kind: DampingKind::Lemniscate { n_roots }, n, m, degree: n_roots * m, n_min })
    }

    /// `d = ⌊n^β⌋`, `m = ⌊n^{1−β}/(2κ)⌋`; the budget `κ·d·m + ⌊n/2⌋ ≤ n`
    /// is verified.
    pub fn wedge(kappa: usize, beta: f64, zeta0: f64, n: usize) -> Result<Self> {
        if kappa < 2 || !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidArgument("wedge damping needs κ ≥ 2 and β ∈ (0, 1)".into()));
        }
        let q_degree = wedge_q_degree(n, beta);
        let m = wedge_exponent(n, beta, kappa);
        let n_min = (1..=1usize << 24).find(|&k| wedge_exponent(k, beta, kappa) >= 1).unwrap_or(usize::MAX);
        if m == 0 {
            return Err(Error::ZeroExponent { n, n_min });
        }
        let degree = kappa * q_degree * m;
        if degree + n / 2 > n {
            return Err(Error::DegreeViolation(format!(
                "κ·⌊n^β⌋·m + ⌊n/2⌋ = {kappa}·{q_degree}·{m} + {} = {} > n = {n}",
                n / 2,
                degree + n / 2
            )));
        }
        Ok(Self { kind: DampingKind::Wedge { kappa, beta, zeta0, q_degree }, n, m, degree, n_min })
    }

    /// Degree of the first term `(1 − g)/(ζ − z)`.
    pub fn first_term_degree(&self) -> usize {
        self.degree - 1
    }

    /// Degree bound of the whole assembled kernel with a Faber part of
    /// degree `⌊n/2⌋`.
    pub fn total_degree(&self) -> usize {
        self.degree + self.n / 2
    }
}

/// `⌊n^β⌋`, guarded against `n^β` landing just below an integer.
pub fn wedge_q_degree(n: usize, beta: f64) -> usize {
    let x = (n as f64).powf(beta);
    let r = x.round();
    if (x - r).abs() < 1e-9 { r as usize } else { x.floor() as usize }
}

/// `⌊n^{1−β}/(2κ)⌋`, with the same guard.
pub fn wedge_exponent(n: usize, beta: f64, kappa: usize) -> usize {
    let x = (n as f64).powf(1.0 - beta) / (2 * kappa) as f64;
    let r = x.round();
    if (x - r).abs() < 1e-9 { r as usize } else { x.floor() as usize }
}

/// Underlying polynomial `u` of a damping factor: `w(z,ζ) = (u(z) − a)/(u(ζ) − a)`.
#[derive(Debug, Clone)]
pub enum DampingBase<T> {
    /// `u = P/R^N`, `a = 0`.
    Lemniscate(BasisPoly<T>),
    /// `u = Q^κ`, `a = ζ₀`.
    Wedge { q: BasisPoly<T>, kappa: usize, zeta0: T },
}

impl<T: Real> DampingBase<T> {
    pub fn lemniscate(lem: &Lemniscate<T>) -> Self {
        DampingBase::Lemniscate(lem.normalized_poly())
    }

    fn anchor(&self) -> T {
        match self {
            DampingBase::Lemniscate(_) => T::zero(),
            DampingBase::Wedge { zeta0, .. } => *zeta0,
        }
    }

    /// `(u(z), DD_u(z, ζ))` given the precomputed inner values at `z` and `ζ`.
    fn u_and_dd(&self, z: Complex<T>, zeta: Complex<T>) -> (Complex<T>, Complex<T>) {
        match self {
            DampingBase::Lemniscate(p) => (p.eval(z), p.divided_difference(z, zeta)),
            DampingBase::Wedge { q, kappa, .. } => {
                let qz = q.eval(z);
                let qs = q.eval(zeta);
                let dq = q.divided_difference(z, zeta);
                (qz.powu(*kappa as u32), dq * geometric_mix(qz, qs, *kappa))
            }
        }
    }

    pub fn u(&self, z: Complex<T>) -> Complex<T> {
        match self {
            DampingBase::Lemniscate(p) => p.eval(z),
            DampingBase::Wedge { q, kappa, .. } => q.eval(z).powu(*kappa as u32),
        }
    }

    /// `u` as an explicit polynomial in the monomial basis (for checks).
    pub fn explicit_u(&self) -> BasisPoly<T> {
        match self {
            DampingBase::Lemniscate(p) => BasisPoly::from_monomial(p.monomial_coefficients()),
            DampingBase::Wedge { q, kappa, .. } => {
                let base = q.monomial_coefficients();
                let mut acc = vec![Complex::new(T::one(), T::zero())];
                for _ in 0..*kappa {
                    acc = mul(&acc, &base);
                }
                BasisPoly::from_monomial(acc)
            }
        }
    }
}

/// `Σ_{i<κ} b^i a^{κ−1−i}`, the divided difference factor of `x ↦ x^κ`.
fn geometric_mix<T: Real>(a: Complex<T>, b: Complex<T>, kappa: usize) -> Complex<T> {
    let mut s = zero();
    let mut bi = Complex::new(T::one(), T::zero());
    for i in 0..kappa {
        s += bi * a.powu((kappa - 1 - i) as u32);
        bi *= b;
    }
    s
}

fn mul<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Damped kernel `(1 − g(z))/(ζ − z) + g(z)·K(z)` with
/// `g = ((u(z) − a)/(u(ζ) − a))^m`, kept in factored form.
#[derive(Debug, Clone)]
pub struct DampedKernel<T> {
    pub zeta: Complex<T>,
    pub factor: DampingFactor,
    base: DampingBase<T>,
    den: Complex<T>,
    faber: Option<PolynomialKernel<T>>,
}

impl<T: Real> DampedKernel<T> {
    /// `faber = None` keeps only the first term.
    pub fn new(
        base: DampingBase<T>,
        factor: DampingFactor,
        zeta: Complex<T>,
        faber: Option<PolynomialKernel<T>>,
    ) -> Result<Self> {
        let den = base.u(zeta) - Complex::new(base.anchor(), T::zero());
        if den == zero() || !crate::real::is_finite(den) {
            return Err(Error::DivisionAnchor);
        }
        if let Some(k) = &faber {
            if k.degree_bound > factor.n / 2 {
                return Err(Error::DegreeViolation(format!(
                    "Faber part degree {} exceeds ⌊n/2⌋ = {}",
                    k.degree_bound,
                    factor.n / 2
                )));
            }
        }
        Ok(Self { zeta, factor, base, den, faber })
    }

    /// Lemniscate kernel with the admissibility precondition `|P(ζ)| > R^N`.
    pub fn lemniscate(lem: &Lemniscate<T>, n: usize, zeta: Complex<T>, faber: Option<PolynomialKernel<T>>) -> Result<Self> {
        let factor = DampingFactor::lemniscate(lem.order(), n)?;
        if !(lem.eval_normalized(zeta).norm() > T::one()) {
            return Err(Error::InadmissibleLemniscate("|P(ζ)| ≤ R^N at the kernel source point".into()));
        }
        Self::new(DampingBase::lemniscate(lem), factor, zeta, faber)
    }

    /// `w(z, ζ)`.
    pub fn ratio(&self, z: Complex<T>) -> Complex<T> {
        (self.base.u(z) - Complex::new(self.base.anchor(), T::zero())) / self.den
    }

    /// `g(z) = w^m`.
    pub fn damping(&self, z: Complex<T>) -> Complex<T> {
        self.ratio(z).powu(self.factor.m as u32)
    }

    /// First term `(1 − w^m)/(ζ − z)`, stable at `z = ζ`.
    pub fn first_term(&self, z: Complex<T>) -> Complex<T> {
        let (uz, dd) = self.base.u_and_dd(z, self.zeta);
        let w = (uz - Complex::new(self.base.anchor(), T::zero())) / self.den;
        let mut s = zero();
        let mut wi = Complex::new(T::one(), T::zero());
        for _ in 0..self.factor.m {
            s += wi;
            wi *= w;
        }
        dd / self.den * s
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let first = self.first_term(z);
        match &self.faber {
            Some(k) => first + self.damping(z) * k.eval(z),
            None => first,
        }
    }

    /// Degree bound from exact arithmetic on the factor degrees.
    pub fn degree_bound(&self) -> usize {
        match &self.faber {
            Some(k) => self.factor.first_term_degree().max(self.factor.degree + k.degree_bound),
            None => self.factor.first_term_degree(),
        }
    }

    /// The kernel as one explicit polynomial in the monomial basis:
    /// synthetic division for the first term plus `g·K`.
    pub fn explicit(&self) -> Result<BasisPoly<T>> {
        let u = self.base.explicit_u();
        let mut w = u.monomial_coefficients();
        w[0] -= Complex::new(self.base.anchor(), T::zero());
        let inv = self.den.inv();
        for c in w.iter_mut() {
            *c *= inv;
        }
        let mut g = vec![Complex::new(T::one(), T::zero())];
        for _ in 0..self.factor.m {
            g = mul(&g, &w);
        }
        let g_poly = BasisPoly::from_monomial(g.clone());
        let first = poly_divide_vanishing(&g_poly, self.zeta)?;
        let mut total = first.monomial_coefficients();
        if let Some(k) = &self.faber {
            let prod = mul(&g, &k.poly.monomial_coefficients());
            if prod.len() > total.len() {
                total.resize(prod.len(), zero());
            }
            for (t, p) in total.iter_mut().zip(prod) {
                *t += p;
            }
        }
        Ok(BasisPoly::from_monomial(total))
    }
}

/// `|1/(ζ − z) − K(z)|` over the samples: `(sup, profile)`.
pub fn kernel_error_profile<T, F>(kernel: F, zeta: Complex<T>, samples: &[Complex<T>]) -> (T, Vec<T>)
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    let curve: Vec<T> = samples.iter().map(|&z| ((zeta - z).inv() - kernel(z)).norm()).collect();
    let sup = curve.iter().copied().fold(T::zero(), T::max);
    (sup, curve)
}

/// Least-squares slope of `log err` against `n`.
pub fn log_slope<T: Real>(ns: &[usize], errs: &[T]) -> Option<f64> {
    let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let y: Vec<f64> = errs.iter().map(|e| e.to_f64().unwrap_or(f64::NAN).ln()).collect();
    crate::linalg::fit_line(&x, &y).map(|f| f.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn divide_vanishing_examples() {
        let g = BasisPoly::from_monomial(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let q = poly_divide_vanishing(&g, c(2.0, 0.0)).unwrap();
        assert_eq!(q.degree(), Some(0));
        assert!((q.eval(c(5.0, 1.0)) - c(0.5, 0.0)).norm() < 1e-15);
        let g2 = BasisPoly::from_monomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let q2 = poly_divide_vanishing(&g2, c(1.0, 0.0)).unwrap();
        let mono = q2.monomial_coefficients();
        assert!((mono[0] - c(1.0, 0.0)).norm() < 1e-15 && (mono[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(matches!(poly_divide_vanishing(&g, c(0.0, 0.0)), Err(Error::DivisionAnchor)));
    }

    #[test]
    fn lemniscate_degree_arithmetic() {
        let f = DampingFactor::lemniscate(4, 40).unwrap();
        assert_eq!(f.m, 5);
        assert_eq!(f.first_term_degree(), 19);
        assert_eq!(f.total_degree(), 40);
        assert!(matches!(DampingFactor::lemniscate(4, 7), Err(Error::ZeroExponent { n: 7, n_min: 8 })));
    }

    #[test]
    fn wedge_degree_arithmetic() {
        let f = DampingFactor::wedge(2, 0.5, 2.0, 256).unwrap();
        assert_eq!((f.m, f.degree), (4, 128));
        assert!(f.total_degree() <= 256);
        assert_eq!(wedge_q_degree(256, 0.5), 16);
    }

    #[test]
    fn wedge_first_term_by_hand() {
        // κ=2, Q(z)=z, ζ₀=2, ζ=1, m=1: g(z) = (z²−2)/(−1), first term −(1+z)
        let q = BasisPoly::from_monomial(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let base = DampingBase::Wedge { q, kappa: 2, zeta0: 2.0 };
        let factor = DampingFactor { kind: DampingKind::Wedge { kappa: 2, beta: 0.5, zeta0: 2.0, q_degree: 1 }, n: 4, m: 1, degree: 2, n_min: 4 };
        let k = DampedKernel::new(base, factor, c(1.0, 0.0), None).unwrap();
        for z in [c(0.3, 0.2), c(-1.0, 0.5), c(1.0, 0.0)] {
            assert!((k.first_term(z) + (c(1.0, 0.0) + z)).norm() < 1e-14);
        }
        let e = k.explicit().unwrap().monomial_coefficients();
        assert!((e[0] + 1.0).norm() < 1e-14 && (e[1] + 1.0).norm() < 1e-14);
    }
}
