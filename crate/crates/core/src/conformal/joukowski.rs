//! Closed-form exterior map of a single segment.

use num_complex::Complex;

use crate::real::{cis, Real};

/// `Ψ(w) = c + (ℓ/2)(w + e^{2iα}/w)` for the segment with midpoint `c`,
/// half-length `ℓ` and direction `α`.
#[derive(Debug, Clone, Copy)]
pub struct Joukowski<T> {
    pub center: Complex<T>,
    pub half_length: T,
    pub angle: T,
}

impl<T: Real> Joukowski<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Self {
        let two = T::one() + T::one();
        let d = b - a;
        Self { center: (a + b) / two, half_length: d.norm() / two, angle: d.arg() }
    }

    pub fn capacity(&self) -> T {
        self.half_length / (T::one() + T::one())
    }

    fn rot(&self) -> Complex<T> {
        cis(self.angle)
    }

    pub fn psi(&self, w: Complex<T>) -> Complex<T> {
        let e2 = cis(self.angle + self.angle);
        self.center + (w + e2 / w) * self.capacity()
    }

    pub fn psi_prime(&self, w: Complex<T>) -> Complex<T> {
        let e2 = cis(self.angle + self.angle);
        (Complex::new(T::one(), T::zero()) - e2 / (w * w)) * self.capacity()
    }

    /// `Φ(z) = e^{iα}(x + √(x²−1))`, `x = e^{−iα}(z−c)/ℓ`, with the square
    /// root sign chosen by explicit comparison so that `|Φ| ≥ 1`.
    pub fn phi(&self, z: Complex<T>) -> Complex<T> {
        let x = (z - self.center) / self.rot() / self.half_length;
        let one = Complex::new(T::one(), T::zero());
        let s = (x - one).sqrt() * (x + one).sqrt();
        let a = x + s;
        let b = x - s;
        let j = if a.norm() >= b.norm() { a } else { b };
        self.rot() * j
    }

    /// Normalized coordinate `x ∈ [−1, 1]` of a point on the segment.
    pub fn coordinate(&self, z: Complex<T>) -> T {
        ((z - self.center) / self.rot() / self.half_length).re
    }

    /// Laurent coefficients `c_0, c_1, …` (only two are nonzero).
    pub fn laurent(&self, count: usize) -> Vec<Complex<T>> {
        let mut c = vec![Complex::new(T::zero(), T::zero()); count.max(2)];
        c[0] = self.center;
        c[1] = cis(self.angle + self.angle) * self.capacity();
        c
    }
}
