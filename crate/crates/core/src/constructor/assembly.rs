//! Quadrature sums of damped kernels, evaluated in factored form.
//!
//! With `u(z) = v(z)^κ − a` and `w(z, ζ) = u(z)/u(ζ)`, a ray contributes
//! `Σ_q c_q (1 − w^m)/(ζ_q − z) + u(z)^m Σ_{q∈γ} c_q u(ζ_q)^{−m} K(z, ζ_q)`;
//! the second sum is collapsed into one polynomial in the Faber basis.

use std::sync::Arc as Shared;

use num_complex::Complex;

use super::contour::RayContour;
use crate::error::{Error, Result};
use crate::kernels::{faber_kernel_coefficients, DampingFactor};
use crate::poly::{BasisPoly, HessenbergBasis};
use crate::real::{lit, Real};

/// `u = v^κ − a` together with the exponent data.
#[derive(Debug, Clone)]
pub struct DampingSpec<T> {
    pub v: BasisPoly<T>,
    pub kappa: usize,
    pub anchor: T,
    pub factor: DampingFactor,
}

impl<T: Real> DampingSpec<T> {
    pub fn u(&self, z: Complex<T>) -> Complex<T> {
        self.v.eval(z).powu(self.kappa as u32) - Complex::new(self.anchor, T::zero())
    }

    /// Degree bound of `(1 − w^m)/(ζ − z)`.
    pub fn first_term_degree(&self) -> usize {
        (self.v.nominal_degree() * self.kappa * self.factor.m).saturating_sub(1)
    }

    pub fn damping_degree(&self) -> usize {
        self.v.nominal_degree() * self.kappa * self.factor.m
    }
}

/// Per-ray quadrature data.
#[derive(Debug, Clone)]
pub struct RayAssembly<T> {
    pub spec: DampingSpec<T>,
    zeta: Vec<Complex<T>>,
    v_zeta: Vec<Complex<T>>,
    den: Vec<Complex<T>>,
    coef: Vec<Complex<T>>,
    faber: BasisPoly<T>,
    /// Degree of the Faber part.
    pub faber_degree: usize,
    /// Below this `|z − ζ|` divided differences use the exact recurrence.
    near: T,
}

impl<T: Real> RayAssembly<T> {
    /// `charges[q] = weight·jump(ζ_q)/(2πi)`. Outer nodes get the full
    /// kernel with a Faber part of degree `faber_degree`; inner nodes the
    /// first term only.
    pub fn new(
        spec: DampingSpec<T>,
        contour: &RayContour<T>,
        charges: &[Complex<T>],
        faber: &Shared<HessenbergBasis<T>>,
        faber_degree: usize,
        scale: T,
    ) -> Result<Self> {
        if faber_degree > faber.max_degree() {
            return Err(Error::DegreeBudget { requested: faber_degree, budget: faber.max_degree() });
        }
        let m = spec.factor.m as i32;
        let mut zeta = Vec::with_capacity(contour.nodes.len());
        let mut v_zeta = Vec::with_capacity(contour.nodes.len());
        let mut den = Vec::with_capacity(contour.nodes.len());
        let mut coef = Vec::with_capacity(contour.nodes.len());
        let mut combined = vec![Complex::new(T::zero(), T::zero()); faber_degree + 1];
        for (q, &c) in contour.nodes.iter().zip(charges) {
            let vz = spec.v.eval(q.zeta);
            let d = vz.powu(spec.kappa as u32) - Complex::new(spec.anchor, T::zero());
            if d == Complex::new(T::zero(), T::zero()) || !crate::real::is_finite(d) {
                return Err(Error::DivisionAnchor);
            }
            zeta.push(q.zeta);
            v_zeta.push(vz);
            den.push(d);
            coef.push(c / d);
            if q.outer {
                let scale_q = c * d.powi(-m);
                for (acc, k) in combined.iter_mut().zip(faber_kernel_coefficients(q.w, q.dphi, faber_degree)) {
                    *acc += k * scale_q;
                }
            }
        }
        let faber = BasisPoly::new(faber.clone(), combined)?;
        Ok(Self { spec, zeta, v_zeta, den, coef, faber, faber_degree, near: scale * lit(1e-2) })
    }

    pub fn node_count(&self) -> usize {
        self.zeta.len()
    }

    /// Structural degree bound of this ray's contribution.
    pub fn degree_bound(&self) -> usize {
        self.spec.first_term_degree().max(self.spec.damping_degree() + self.faber_degree)
    }

    /// Contribution of the ray at `z`.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let vz = self.spec.v.eval(z);
        let uz = vz.powu(self.spec.kappa as u32) - Complex::new(self.spec.anchor, T::zero());
        let m = self.spec.factor.m;
        let mut first = Complex::new(T::zero(), T::zero());
        for q in 0..self.zeta.len() {
            let w = uz / self.den[q];
            let mut s = Complex::new(T::zero(), T::zero());
            let mut wi = Complex::new(T::one(), T::zero());
            for _ in 0..m {
                s += wi;
                wi *= w;
            }
            let diff = z - self.zeta[q];
            let dv = if diff.norm() > self.near {
                (vz - self.v_zeta[q]) / diff
            } else {
                self.spec.v.divided_difference(z, self.zeta[q])
            };
            let du = dv * power_mix(vz, self.v_zeta[q], self.spec.kappa);
            // (1 − w^m)/(ζ − z) = DD_u(z, ζ)/u(ζ) · Σ w^i
            first += self.coef[q] * du * s;
        }
        first + uz.powu(m as u32) * self.faber.eval(z)
    }

    /// `max_q |w(z, ζ_q)|`.
    pub fn max_ratio(&self, z: Complex<T>) -> T {
        let uz = self.spec.u(z);
        self.den.iter().map(|d| (uz / d).norm()).fold(T::zero(), T::max)
    }
}

/// `Σ_{i<κ} b^i a^{κ−1−i}`.
fn power_mix<T: Real>(a: Complex<T>, b: Complex<T>, kappa: usize) -> Complex<T> {
    let mut s = Complex::new(T::zero(), T::zero());
    let mut bi = Complex::new(T::one(), T::zero());
    for i in 0..kappa {
        s += bi * a.powu((kappa - 1 - i) as u32);
        bi *= b;
    }
    s
}
